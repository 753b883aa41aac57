#include "cavtun/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace cavtun {

namespace {

// FFTW plan creation is not thread safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<complex> transform(const std::vector<complex>& x, int sign) {
  if (x.empty()) throw std::domain_error("fft: empty input");
  const int n = static_cast<int>(x.size());
  std::vector<complex> out(x.size());
  // FFTW_ESTIMATE keeps the plan deterministic (no runtime measurement).
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(
        n,
        reinterpret_cast<fftw_complex*>(const_cast<complex*>(x.data())),
        reinterpret_cast<fftw_complex*>(out.data()), sign,
        FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  }
  if (plan == nullptr) throw std::runtime_error("fft: planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

std::vector<complex> fft_forward(const std::vector<complex>& x) {
  return transform(x, FFTW_FORWARD);
}

std::vector<complex> fft_inverse(const std::vector<complex>& x) {
  auto out = transform(x, FFTW_BACKWARD);
  const double inv = 1.0 / static_cast<double>(x.size());
  for (auto& v : out) v *= inv;
  return out;
}

Spectrum power_spectrum(const std::vector<double>& samples, double dt,
                        Window window) {
  if (samples.size() < 4) throw std::domain_error("power_spectrum: too short");
  if (!(dt > 0.0)) throw std::domain_error("power_spectrum: dt must be > 0");
  const std::size_t n = samples.size();

  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);

  std::vector<complex> buf(n);
  for (std::size_t j = 0; j < n; ++j) {
    double w = 1.0;
    if (window == Window::hann) {
      w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                               static_cast<double>(j) /
                               static_cast<double>(n - 1));
    }
    buf[j] = complex{(samples[j] - mean) * w, 0.0};
  }
  auto X = fft_forward(buf);

  Spectrum spec;
  const std::size_t half = n / 2;
  spec.frequency.resize(half + 1);
  spec.power.resize(half + 1);
  const double domega = 2.0 * std::numbers::pi / (dt * static_cast<double>(n));
  for (std::size_t k = 0; k <= half; ++k) {
    spec.frequency[k] = domega * static_cast<double>(k);
    spec.power[k] = std::norm(X[k]);
  }
  return spec;
}

std::vector<SpectralPeak> dominant_peaks(const Spectrum& spec,
                                         double threshold) {
  const std::size_t n = spec.power.size();
  if (n < 3) return {};
  double pmax = 0.0;
  for (double p : spec.power) pmax = std::max(pmax, p);
  if (pmax <= 0.0) return {};

  std::vector<SpectralPeak> peaks;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double p = spec.power[k];
    if (p < threshold * pmax) continue;
    if (p <= spec.power[k - 1] || p < spec.power[k + 1]) continue;
    // Parabolic refinement in log power; exact for a Gaussian line shape
    // and accurate to a small fraction of a bin for window main lobes.
    const double lm = std::log(std::max(spec.power[k - 1], 1e-300));
    const double l0 = std::log(std::max(p, 1e-300));
    const double lp = std::log(std::max(spec.power[k + 1], 1e-300));
    double shift = 0.0;
    const double denom = lm - 2.0 * l0 + lp;
    if (denom < 0.0) shift = 0.5 * (lm - lp) / denom;
    shift = std::clamp(shift, -0.5, 0.5);
    const double dw = spec.frequency[1] - spec.frequency[0];
    peaks.push_back({spec.frequency[k] + shift * dw, p / pmax});
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const SpectralPeak& a, const SpectralPeak& b) {
              return a.power > b.power;
            });
  return peaks;
}

std::vector<double> analytic_envelope(const std::vector<double>& samples) {
  if (samples.size() < 4)
    throw std::domain_error("analytic_envelope: too short");
  const std::size_t n = samples.size();

  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);

  std::vector<complex> buf(n);
  for (std::size_t j = 0; j < n; ++j) buf[j] = complex{samples[j] - mean, 0.0};
  auto X = fft_forward(buf);

  // Analytic-signal filter: keep DC and (for even n) Nyquist, double the
  // positive frequencies, zero the negative ones.
  for (std::size_t k = 1; k < (n + 1) / 2; ++k) X[k] *= 2.0;
  for (std::size_t k = n / 2 + 1; k < n; ++k) X[k] = complex{0.0, 0.0};
  auto z = fft_inverse(X);

  std::vector<double> env(n);
  for (std::size_t j = 0; j < n; ++j) env[j] = std::abs(z[j]);
  return env;
}

std::vector<double> moving_average(const std::vector<double>& samples,
                                   int half_width) {
  if (half_width <= 0) return samples;
  const int n = static_cast<int>(samples.size());
  std::vector<double> out(samples.size());
  // Prefix sums make the smoothing O(n) regardless of window size.
  std::vector<double> prefix(samples.size() + 1, 0.0);
  for (int j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + samples[j];
  for (int j = 0; j < n; ++j) {
    const int lo = std::max(0, j - half_width);
    const int hi = std::min(n - 1, j + half_width);
    out[j] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace cavtun
