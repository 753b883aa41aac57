#ifndef CAVTUN_FFT_HPP
#define CAVTUN_FFT_HPP

#include <complex>
#include <vector>

namespace cavtun {

using complex = std::complex<double>;

// Forward complex DFT, X[k] = sum_j x[j] exp(-2*pi*i*j*k/n). Unnormalized,
// matching the usual engineering convention; callers divide by n where a
// normalized spectrum is wanted.
std::vector<complex> fft_forward(const std::vector<complex>& x);

// Inverse complex DFT including the 1/n factor, so ifft(fft(x)) == x.
std::vector<complex> fft_inverse(const std::vector<complex>& x);

enum class Window { rectangular, hann };

struct Spectrum {
  std::vector<double> frequency;  // angular frequency, rad per unit time
  std::vector<double> power;      // |X[k]|^2, one-sided (k = 0..n/2)
};

// One-sided power spectrum of a real series sampled at spacing dt.
// The mean is subtracted before windowing so the DC bin does not mask
// low-frequency structure.
Spectrum power_spectrum(const std::vector<double>& samples, double dt,
                        Window window = Window::hann);

struct SpectralPeak {
  double frequency;  // parabolically refined angular frequency
  double power;      // peak bin power, relative to the strongest peak
};

// Local maxima of the one-sided spectrum above `threshold` times the
// strongest bin, sorted by descending power. Peak positions are refined
// by fitting a parabola through the peak bin and its neighbours.
std::vector<SpectralPeak> dominant_peaks(const Spectrum& spec,
                                         double threshold);

// Magnitude of the analytic signal of a real series (its envelope),
// computed by zeroing negative frequencies. The input mean is removed
// first so the envelope tracks the oscillation amplitude rather than
// the offset.
std::vector<double> analytic_envelope(const std::vector<double>& samples);

// Centered moving average; the window is clipped at the ends.
std::vector<double> moving_average(const std::vector<double>& samples,
                                   int half_width);

}  // namespace cavtun

#endif
