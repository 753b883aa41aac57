#include "cavtun/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cavtun/control.hpp"
#include "cavtun/envelope.hpp"
#include "cavtun/grid.hpp"
#include "cavtun/observables.hpp"
#include "cavtun/sector.hpp"
#include "cavtun/version.hpp"

namespace cavtun {
namespace {

constexpr double pi = 3.14159265358979323846;

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_e(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::islower(static_cast<unsigned char>(c)) ||
          std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  return true;
}

// One key=value line of a config, with its 1-based source position.
struct Entry {
  std::string value;
  int line = 0;
  int column = 0;
  bool used = false;
};

// Parsed config with typed, default-aware accessors. Every consumed key
// (explicit or defaulted) is echoed into the report so a run is fully
// reproducible from its report alone.
class Config {
public:
  explicit Config(const std::string& path) : path_(path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, 0, "cannot open config file '" + path + "'");
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = raw;
      size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      size_t first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      int col = static_cast<int>(first) + 1;
      size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(line_no, col, "expected key=value");
      std::string key = trim(line.substr(0, eq));
      if (key.empty())
        throw ConfigError(line_no, col, "missing key before '='");
      if (!valid_key(key))
        throw ConfigError(line_no, col,
                          "invalid key '" + key +
                              "' (lowercase letters, digits, '_' only)");
      std::string value = trim(line.substr(eq + 1));
      if (value.empty())
        throw ConfigError(line_no, static_cast<int>(eq) + 2,
                          "missing value for key '" + key + "'");
      if (entries_.count(key))
        throw ConfigError(line_no, col, "duplicate key '" + key + "'");
      entries_[key] = Entry{value, line_no, col, false};
      order_.push_back(key);
    }
    if (entries_.empty())
      throw ConfigError(1, 1, "config is empty (no key=value lines)");
    last_line_ = line_no;
  }

  const std::string& path() const { return path_; }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string require_str(const std::string& key) {
    Entry* e = find(key);
    if (!e)
      throw ConfigError(last_line_, 1,
                        "missing required key '" + key + "'" + kind_note());
    e->used = true;
    echo_.emplace_back(key, e->value);
    return e->value;
  }

  std::string get_str(const std::string& key, const std::string& def) {
    Entry* e = find(key);
    if (!e) {
      echo_.emplace_back(key, def);
      return def;
    }
    e->used = true;
    echo_.emplace_back(key, e->value);
    return e->value;
  }

  double require_num(const std::string& key) { return to_num(key, require_str(key)); }
  double get_num(const std::string& key, double def) {
    Entry* e = find(key);
    if (!e) {
      echo_.emplace_back(key, fmt_g(def));
      return def;
    }
    e->used = true;
    double v = to_num(key, e->value);
    echo_.emplace_back(key, fmt_g(v));
    return v;
  }

  int require_int(const std::string& key) { return to_int(key, require_str(key)); }
  int get_int(const std::string& key, int def) {
    Entry* e = find(key);
    if (!e) {
      echo_.emplace_back(key, std::to_string(def));
      return def;
    }
    e->used = true;
    int v = to_int(key, e->value);
    echo_.emplace_back(key, std::to_string(v));
    return v;
  }

  // After a scenario consumed its keys, anything left is a typo or a key
  // of a different kind; reject it at its own source position.
  void reject_unknown(const std::string& kind) {
    for (const std::string& key : order_) {
      const Entry& e = entries_.at(key);
      if (!e.used)
        throw ConfigError(e.line, e.column,
                          "unknown key '" + key + "' for scenario kind '" +
                              kind + "'");
    }
    kind_ = kind;
  }

  void set_kind(const std::string& kind) { kind_ = kind; }

  const std::vector<std::pair<std::string, std::string>>& echo() const {
    return echo_;
  }

  ConfigError error_at(const std::string& key, const std::string& msg) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return ConfigError(last_line_, 1, msg);
    return ConfigError(it->second.line, it->second.column, msg);
  }

private:
  Entry* find(const std::string& key) {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::string kind_note() const {
    return kind_.empty() ? std::string{} : " for scenario kind '" + kind_ + "'";
  }

  double to_num(const std::string& key, const std::string& text) const {
    const Entry& e = entries_.at(key);
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(v))
      throw ConfigError(e.line, e.column,
                        "key '" + key + "': expected a finite number, got '" +
                            text + "'");
    return v;
  }

  int to_int(const std::string& key, const std::string& text) const {
    const Entry& e = entries_.at(key);
    char* end = nullptr;
    long v = std::strtol(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size() || v < -2147483647L || v > 2147483647L)
      throw ConfigError(e.line, e.column,
                        "key '" + key + "': expected an integer, got '" + text +
                            "'");
    return static_cast<int>(v);
  }

  std::string path_;
  std::string kind_;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  std::vector<std::pair<std::string, std::string>> echo_;
  int last_line_ = 1;
};

WellState parse_well(Config& cfg, const std::string& key, const std::string& text) {
  if (text == "left") return WellState::left;
  if (text == "right") return WellState::right;
  if (text == "plus") return WellState::plus;
  if (text == "minus") return WellState::minus;
  throw cfg.error_at(key, "key '" + key +
                              "': expected left|right|plus|minus, got '" +
                              text + "'");
}

InternalState parse_internal(Config& cfg, const std::string& key,
                             const std::string& text) {
  if (text == "ground") return InternalState::ground;
  if (text == "excited") return InternalState::excited;
  throw cfg.error_at(key, "key '" + key + "': expected ground|excited, got '" +
                              text + "'");
}

double normalize_kappa(double kappa, std::vector<std::string>& warnings) {
  if (kappa >= 0.0 && kappa < 2.0 * pi) return kappa;
  double w = std::fmod(kappa, 2.0 * pi);
  if (w < 0.0) w += 2.0 * pi;
  warnings.push_back("kappa = " + fmt_g(kappa) +
                     " lies outside [0, 2*pi); normalized to " + fmt_g(w));
  return w;
}

// The CLI owns the sampling-rate guard: the fastest populated sector phase
// Omega_plus(N_max) must be resolved by the sample grid or the CSV would
// alias it.
void check_nyquist(const SystemParams& p, int n_max, double gt_max,
                   int samples) {
  if (n_max < 1 || samples < 2) return;
  double omega = eigenfrequencies(p, n_max).omega_plus;
  if (!(omega > 0.0)) return;
  double step = gt_max / (samples - 1);
  double bound = pi / omega;
  if (!(step < bound))
    throw std::domain_error(
        "sampling step g*dt = " + fmt_g(step) +
        " violates the Nyquist bound pi/Omega_plus(N=" + std::to_string(n_max) +
        ") = " + fmt_g(bound) + "; increase samples or shorten gt_max");
}

void check_positive(const char* what, double v) {
  if (!(v > 0.0))
    throw std::domain_error(std::string(what) + " must be > 0, got " + fmt_g(v));
}

void check_samples(int samples) {
  if (samples < 2)
    throw std::domain_error("samples must be >= 2, got " +
                            std::to_string(samples));
}

// ---------------------------------------------------------------- output --

class Report {
public:
  Report(const Config& cfg, const std::string& kind,
         const std::vector<std::string>& warnings) {
    lines_.push_back(std::string("# cavtun ") + version + " report");
    lines_.push_back("# config " +
                     std::filesystem::path(cfg.path()).filename().string());
    for (const auto& w : warnings) lines_.push_back("# warning: " + w);
    lines_.push_back("kind = " + kind);
    for (const auto& [k, v] : cfg.echo())
      if (k != "kind") lines_.push_back(k + " = " + v);
    lines_.push_back("");
  }

  void kv(const std::string& key, const std::string& value) {
    lines_.push_back(key + " = " + value);
  }
  void kv(const std::string& key, double value) { kv(key, fmt_g(value)); }
  void kv(const std::string& key, bool value) {
    kv(key, std::string(value ? "true" : "false"));
  }
  void note(const std::string& text) { lines_.push_back("# " + text); }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    for (const auto& l : lines_) out << l << '\n';
    if (!out.good())
      throw std::runtime_error("cannot write report file '" + path + "'");
  }

private:
  std::vector<std::string> lines_;
};

void write_csv(const std::string& path, const std::string& schema,
               const std::vector<std::string>& columns,
               const std::vector<const std::vector<double>*>& data) {
  std::ofstream out(path, std::ios::binary);
  out << "# cavtun " << version << ' ' << schema << '\n';
  for (size_t c = 0; c < columns.size(); ++c)
    out << columns[c] << (c + 1 < columns.size() ? ',' : '\n');
  size_t rows = data.empty() ? 0 : data[0]->size();
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < data.size(); ++c)
      out << fmt_e((*data[c])[r]) << (c + 1 < data.size() ? ',' : '\n');
  if (!out.good())
    throw std::runtime_error("cannot write output file '" + path + "'");
}

void write_series(ScenarioOutcome& out, const std::string& prefix,
                  const std::vector<double>& gt, const SeriesBundle& b,
                  double half_sep) {
  std::vector<double> x_ratio(b.x_mean.values.size());
  for (size_t i = 0; i < x_ratio.size(); ++i)
    x_ratio[i] = b.x_mean.values[i] / half_sep;
  std::string path = prefix + "_series.csv";
  write_csv(path, series_schema,
            {"gt", "rho_LL", "rho_RR", "rho_ee", "x_mean_over_halfb"},
            {&gt, &b.rho_LL.values, &b.rho_RR.values, &b.rho_ee.values,
             &x_ratio});
  out.files_written.push_back(path);
}

// ------------------------------------------------------------- scenarios --

struct RunContext {
  Config cfg;
  std::string prefix;
  bool execute = true;
  ScenarioOutcome outcome;
};

// Shared key block of the sector-model scenarios.
struct ModelKeys {
  SystemParams params;
  WellState well = WellState::right;
  InternalState internal = InternalState::excited;
  double gt_max = 0.0;
  int samples = 0;
};

ModelKeys read_model_keys(RunContext& ctx, double default_delta,
                          const std::string& default_well) {
  ModelKeys m;
  double tunnel = ctx.cfg.require_num("tunnel_split_over_g");
  double delta = default_delta;
  if (std::isnan(default_delta))
    delta = ctx.cfg.require_num("delta_over_g");
  else
    delta = ctx.cfg.get_num("delta_over_g", default_delta);
  double kappa =
      normalize_kappa(ctx.cfg.get_num("kappa", pi / 4), ctx.outcome.warnings);
  double chi = ctx.cfg.get_num("chi", -pi / 4);
  m.well = parse_well(ctx.cfg, "well", ctx.cfg.get_str("well", default_well));
  m.internal = parse_internal(ctx.cfg, "internal",
                              ctx.cfg.get_str("internal", "excited"));
  m.gt_max = ctx.cfg.require_num("gt_max");
  m.samples = ctx.cfg.get_int("samples", 4096);
  m.params = make_params(1.0, delta, tunnel, kappa, chi);
  return m;
}

void run_fock_kind(RunContext& ctx, bool resonant_kind) {
  const char* kind = resonant_kind ? "resonant" : "detuned";
  ModelKeys m =
      read_model_keys(ctx, resonant_kind ? 0.0 :
                      std::numeric_limits<double>::quiet_NaN(),
                      resonant_kind ? "right" : "minus");
  int n_photons = ctx.cfg.get_int("n_photons", 0);
  ctx.cfg.reject_unknown(kind);

  if (n_photons < 0)
    throw std::domain_error("n_photons must be >= 0, got " +
                            std::to_string(n_photons));
  check_positive("gt_max", m.gt_max);
  check_samples(m.samples);

  FieldSpec field;
  field.kind = FieldSpec::Kind::fock;
  field.n_photons = n_photons;
  CompositeState s0 = initial_state(field, m.well, m.internal);
  check_nyquist(m.params, s0.max_sector(), m.gt_max, m.samples);
  if (!ctx.execute) return;

  TimeGrid grid{m.gt_max, m.samples};
  SeriesBundle b = trace_series(field, m.well, m.internal, m.params, grid);
  write_series(ctx.outcome, ctx.prefix, b.rho_LL.times, b, m.params.half_sep);

  Report rep(ctx.cfg, kind, ctx.outcome.warnings);
  int n_sector = s0.max_sector();
  rep.kv("sectors_kept", std::to_string(n_sector));
  if (n_sector >= 1) {
    EigenFrequencies f = eigenfrequencies(m.params, n_sector);
    rep.kv("omega_plus_over_g", f.omega_plus);
    rep.kv("omega_minus_over_g", f.omega_minus);
    rep.kv("omega_aux_over_g", f.omega_sq);
  }

  // Closed-form cross-checks where the respective formula domain applies.
  bool fock_single = (n_sector >= 1);
  if (resonant_kind) {
    bool on_domain = fock_single && m.well == WellState::right &&
                     m.internal == InternalState::excited;
    double dev_LL = 0.0, dev_ee = 0.0;
    if (on_domain) {
      try {
        rep.kv("omega_tun_over_g", resonant_omega_tun(m.params, n_sector));
        double amp = m.params.tunnel_split * m.params.tunnel_split /
                     (m.params.tunnel_split * m.params.tunnel_split +
                      n_sector * m.params.g * m.params.g);
        rep.kv("closed_form_amplitude", amp);
        for (size_t i = 0; i < b.rho_LL.times.size(); ++i) {
          double t = b.rho_LL.times[i];
          dev_LL = std::max(dev_LL, std::abs(b.rho_LL.values[i] -
                                             resonant_rho_LL(m.params, n_sector, t)));
          dev_ee = std::max(dev_ee, std::abs(b.rho_ee.values[i] -
                                             resonant_rho_ee(m.params, n_sector, t)));
        }
        rep.kv("max_dev_rho_LL", dev_LL);
        rep.kv("max_dev_rho_ee", dev_ee);
      } catch (const std::domain_error&) {
        on_domain = false;
      }
    }
    if (!on_domain)
      rep.note("closed-form check skipped (needs delta = 0, kappa = pi/4, "
               "analytic chi, Fock field, initial |N-1,R,e>)");
  } else {
    bool on_domain = fock_single && m.well == WellState::minus &&
                     m.internal == InternalState::excited;
    double rho_ee_min = 1.0;
    for (double v : b.rho_ee.values) rho_ee_min = std::min(rho_ee_min, v);
    rep.kv("rho_ee_min", rho_ee_min);
    if (on_domain) {
      try {
        rep.kv("omega_bar_over_g", far_detuned_effective(m.params, n_sector));
        double dev = 0.0;
        for (size_t i = 0; i < b.rho_LL.times.size(); ++i)
          dev = std::max(dev, std::abs(b.rho_LL.values[i] -
                                       far_detuned_rho_LL(m.params, n_sector,
                                                          b.rho_LL.times[i])));
        rep.kv("max_dev_rho_LL", dev);
      } catch (const std::domain_error&) {
        on_domain = false;
      }
    }
    if (!on_domain)
      rep.note("far-detuned check skipped (needs delta != 0, Fock field, "
               "initial |N-1,-,e>)");
  }
  std::string rep_path = ctx.prefix + "_report.txt";
  rep.write(rep_path);
  ctx.outcome.files_written.push_back(rep_path);
}

void run_collapse_revival(RunContext& ctx) {
  ModelKeys m = read_model_keys(ctx, 0.0, "right");
  double alpha = ctx.cfg.require_num("alpha");
  double tail = ctx.cfg.get_num("truncation_tail", 1e-12);
  ctx.cfg.reject_unknown("collapse_revival");

  check_positive("alpha", alpha);
  if (!(tail > 0.0 && tail < 1.0))
    throw std::domain_error("truncation_tail must lie in (0, 1), got " +
                            fmt_g(tail));
  check_positive("gt_max", m.gt_max);
  check_samples(m.samples);

  FieldSpec field;
  field.kind = FieldSpec::Kind::coherent;
  field.alpha = alpha;
  field.truncation_tail = tail;
  CompositeState s0 = initial_state(field, m.well, m.internal);
  check_nyquist(m.params, s0.max_sector(), m.gt_max, m.samples);

  // Coverage precheck, so `validate` flags a too-short window without
  // simulating; detect_revival re-enforces it on the actual series.
  double n_mean = field_n_mean(field);
  TimePair t_r = revival_time(m.params, n_mean);
  if (m.gt_max < 1.5 * t_r.exact)
    throw std::domain_error(
        "series covers gt_max = " + fmt_g(m.gt_max) +
        " < 1.5 * predicted revival time = " + fmt_g(1.5 * t_r.exact));
  if (!ctx.execute) return;

  TimeGrid grid{m.gt_max, m.samples};
  SeriesBundle b = trace_series(field, m.well, m.internal, m.params, grid);
  write_series(ctx.outcome, ctx.prefix, b.rho_LL.times, b, m.params.half_sep);

  RevivalReport rev = detect_revival(b.x_mean);

  Report rep(ctx.cfg, "collapse_revival", ctx.outcome.warnings);
  rep.kv("n_mean", n_mean);
  rep.kv("sectors_kept", std::to_string(s0.max_sector()));
  rep.kv("truncation_dropped", s0.truncation_tail);
  rep.kv("t_c_formula", rev.t_c_formula);
  rep.kv("t_c_exact", rev.t_c_exact);
  rep.kv("t_r_formula", rev.t_r_formula);
  rep.kv("t_r_exact", rev.t_r_exact);
  rep.kv("t_r_measured", rev.t_r_measured);
  rep.kv("initial_amplitude", rev.initial_amplitude);
  rep.kv("min_before_peak", rev.min_before_peak);
  rep.kv("collapsed", rev.collapsed);
  std::string rep_path = ctx.prefix + "_report.txt";
  rep.write(rep_path);
  ctx.outcome.files_written.push_back(rep_path);
}

std::vector<ProtocolStep> parse_protocol_file(
    const std::string& path, std::vector<std::string>& warnings) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(0, 0, "cannot open protocol file '" + path + "'");
  std::vector<ProtocolStep> steps;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream tok(line);
    std::string word;
    if (!(tok >> word)) continue;
    if (word == "pulse") {
      std::string extra;
      if (tok >> extra)
        throw ConfigError(line_no, 1, "'pulse' takes no arguments");
      ProtocolStep s;
      s.kind = ProtocolStep::Kind::pi_pulse;
      steps.push_back(s);
    } else if (word == "evolve") {
      double vals[5];
      for (int i = 0; i < 5; ++i)
        if (!(tok >> vals[i]))
          throw ConfigError(
              line_no, 1,
              "'evolve' needs 5 numbers: <gt> <delta/g> <Delta/g> <kappa> <chi>");
      std::string extra;
      if (tok >> extra)
        throw ConfigError(line_no, 1, "'evolve' takes exactly 5 numbers");
      ProtocolStep s;
      s.kind = ProtocolStep::Kind::free_evolve;
      s.gt = vals[0];
      s.params = make_params(1.0, vals[1], vals[2],
                             normalize_kappa(vals[3], warnings), vals[4]);
      steps.push_back(s);
    } else {
      throw ConfigError(line_no, 1,
                        "unknown protocol step '" + word +
                            "' (expected 'pulse' or 'evolve ...')");
    }
  }
  return steps;
}

// State of the schedule at cumulative free-evolution time gt: pulses are
// instantaneous, so the walk applies them as soon as they are reached.
CompositeState protocol_state_at(const std::vector<ProtocolStep>& steps,
                                 const CompositeState& initial, double gt) {
  CompositeState cur = initial;
  double consumed = 0.0;
  for (const auto& step : steps) {
    if (step.kind == ProtocolStep::Kind::pi_pulse) {
      cur = apply_pi_pulse(cur);
      continue;
    }
    if (gt - consumed < step.gt) {
      double local = std::max(0.0, gt - consumed);
      return evolve(cur, step.params, local / step.params.g);
    }
    cur = evolve(cur, step.params, step.gt / step.params.g);
    consumed += step.gt;
  }
  return cur;
}

void run_protocol_kind(RunContext& ctx) {
  double tunnel = ctx.cfg.require_num("tunnel_split_over_g");
  double theta = ctx.cfg.get_num("theta", pi);
  int samples = ctx.cfg.get_int("samples", 512);
  std::string file = ctx.cfg.get_str("protocol_file", "");
  WellState well =
      parse_well(ctx.cfg, "well", ctx.cfg.get_str("well", "minus"));
  InternalState internal = parse_internal(
      ctx.cfg, "internal", ctx.cfg.get_str("internal", "ground"));
  int n_photons = ctx.cfg.get_int("n_photons", 0);
  WellState t_well = parse_well(ctx.cfg, "target_well",
                                ctx.cfg.get_str("target_well", "left"));
  InternalState t_internal = parse_internal(
      ctx.cfg, "target_internal", ctx.cfg.get_str("target_internal", "ground"));
  int t_photons = ctx.cfg.get_int("target_n_photons", 0);
  ctx.cfg.reject_unknown("protocol");

  check_samples(samples);
  if (n_photons < 0 || t_photons < 0)
    throw std::domain_error("photon numbers must be >= 0");

  SystemParams base = make_params(1.0, 0.0, tunnel, pi / 4, -pi / 4);
  std::vector<ProtocolStep> steps =
      file.empty() ? superposition_schedule(theta, base)
                   : parse_protocol_file(file, ctx.outcome.warnings);

  FieldSpec f0;
  f0.n_photons = n_photons;
  CompositeState initial = initial_state(f0, well, internal);
  FieldSpec ft;
  ft.n_photons = t_photons;
  CompositeState target = initial_state(ft, t_well, t_internal);

  double total_gt = 0.0;
  int pulses = 0;
  for (const auto& s : steps)
    if (s.kind == ProtocolStep::Kind::free_evolve)
      total_gt += s.gt;
    else
      ++pulses;
  if (total_gt > 0.0) {
    // Each pulse can push population one sector up, so bound the fastest
    // phase by the highest sector the walk can reach.
    int n_bound = initial.max_sector() + pulses + 1;
    double omega_max = 0.0;
    for (const auto& s : steps)
      if (s.kind == ProtocolStep::Kind::free_evolve)
        omega_max =
            std::max(omega_max, eigenfrequencies(s.params, n_bound).omega_plus);
    if (omega_max > 0.0 && !(total_gt / (samples - 1) < pi / omega_max))
      throw std::domain_error(
          "sampling step g*dt = " + fmt_g(total_gt / (samples - 1)) +
          " violates the Nyquist bound pi/Omega_plus = " +
          fmt_g(pi / omega_max) + "; increase samples");
  }
  if (!ctx.execute) return;

  ProtocolResult result = run_protocol(steps, initial, target);

  // Series: the schedule sampled on its cumulative free-evolution clock.
  std::vector<double> gts;
  std::vector<CompositeState> snaps;
  if (total_gt > 0.0) {
    gts.resize(samples);
    snaps.reserve(samples);
    for (int i = 0; i < samples; ++i) {
      gts[i] = total_gt * i / (samples - 1);
      snaps.push_back(i + 1 == samples
                          ? result.final_state
                          : protocol_state_at(steps, initial, gts[i]));
    }
  } else {
    gts.assign(result.intermediates.size() + 1, 0.0);
    snaps.push_back(initial);
    for (const auto& st : result.intermediates) snaps.push_back(st);
  }
  SeriesBundle b;
  size_t rows = snaps.size();
  b.rho_LL.values.resize(rows);
  b.rho_RR.values.resize(rows);
  b.rho_ee.values.resize(rows);
  b.x_mean.values.resize(rows);
  for (size_t i = 0; i < rows; ++i) {
    Eigen::Matrix2cd ext = reduce_external(snaps[i]);
    Eigen::Matrix2cd inl = reduce_internal(snaps[i]);
    b.rho_LL.values[i] = ext(0, 0).real();
    b.rho_RR.values[i] = ext(1, 1).real();
    b.rho_ee.values[i] = inl(1, 1).real();
    b.x_mean.values[i] = mean_position(snaps[i], base);
  }
  write_series(ctx.outcome, ctx.prefix, gts, b, base.half_sep);

  Report rep(ctx.cfg, "protocol", ctx.outcome.warnings);
  rep.kv("steps", std::to_string(steps.size()));
  rep.kv("pulses", std::to_string(pulses));
  rep.kv("total_gt", total_gt);
  rep.kv("fidelity", result.fidelity);
  rep.kv("leakage", result.leakage);
  Eigen::Matrix2cd ext = reduce_external(result.final_state);
  rep.kv("rho_LL_final", ext(0, 0).real());
  rep.kv("rho_RR_final", ext(1, 1).real());
  rep.kv("rho_ee_final", reduce_internal(result.final_state)(1, 1).real());
  rep.kv("norm_final", result.final_state.norm());
  std::string rep_path = ctx.prefix + "_report.txt";
  rep.write(rep_path);
  ctx.outcome.files_written.push_back(rep_path);
}

void run_grid_validation(RunContext& ctx) {
  DoubleWellSpec spec;
  spec.quartic = ctx.cfg.get_num("well_quartic", 0.08);
  spec.quadratic = ctx.cfg.get_num("well_quadratic", 1.0);
  spec.mass = ctx.cfg.get_num("mass", 1.0);
  spec.x_min = ctx.cfg.get_num("grid_min", -8.0);
  spec.x_max = ctx.cfg.get_num("grid_max", 8.0);
  spec.points = ctx.cfg.get_int("grid_points", 1024);
  spec.retained_states = ctx.cfg.get_int("retained_states", 8);
  double g = ctx.cfg.require_num("g");
  double delta_over_g = ctx.cfg.get_num("delta_over_g", 3.0);
  double kappa =
      normalize_kappa(ctx.cfg.get_num("kappa", pi / 4), ctx.outcome.warnings);
  double chi = ctx.cfg.get_num("chi", -pi / 4);
  int sector = ctx.cfg.get_int("sector", 1);
  WellState well =
      parse_well(ctx.cfg, "well", ctx.cfg.get_str("well", "right"));
  InternalState internal = parse_internal(
      ctx.cfg, "internal", ctx.cfg.get_str("internal", "excited"));
  double gt_max = ctx.cfg.get_num("gt_max", 40.0);
  int samples = ctx.cfg.get_int("samples", 401);
  PropagationOptions opts;
  opts.time_step = ctx.cfg.get_num("time_step", 0.02);
  opts.order = ctx.cfg.get_int("integrator_order", 4);
  ctx.cfg.reject_unknown("grid_validation");

  check_positive("g", g);
  check_positive("gt_max", gt_max);
  check_samples(samples);
  check_positive("time_step", opts.time_step);
  if (opts.order != 2 && opts.order != 4)
    throw std::domain_error("integrator_order must be 2 or 4, got " +
                            std::to_string(opts.order));
  if (sector < 1)
    throw std::domain_error("sector must be >= 1, got " +
                            std::to_string(sector));
  check_positive("well_quartic", spec.quartic);
  check_positive("well_quadratic", spec.quadratic);
  check_positive("mass", spec.mass);
  if (!(spec.x_max > spec.x_min))
    throw std::domain_error("grid_max must exceed grid_min");
  if (!ctx.execute) return; // the spectral gates need the actual solve

  SpectralResult spectral = solve_double_well(spec);
  SectorCoupling coupling =
      coupling_from_angles(g, delta_over_g * g, kappa, chi, sector, spectral);
  SectorWavefunction psi0 = initial_doublet_state(spectral, well, internal);

  SystemParams model = make_params(g, delta_over_g * g, spectral.tunnel_split,
                                   kappa, chi, spectral.well_separation / 2);
  double t_max = gt_max / g;
  double sample_dt = t_max / (samples - 1);
  double omega_fast = eigenfrequencies(model, sector).omega_plus;
  if (omega_fast > 0.0 && !(sample_dt < pi / omega_fast))
    throw std::domain_error(
        "sampling step dt = " + fmt_g(sample_dt) +
        " violates the Nyquist bound pi/Omega_plus = " + fmt_g(pi / omega_fast) +
        "; increase samples or shorten gt_max");

  GridSeries series =
      propagate_sector(spec, spectral, coupling, psi0, t_max, samples, opts);

  // The reduced sector model evaluated at the same physical instants.
  int n_photons = internal == InternalState::excited ? sector - 1 : sector;
  FieldSpec field;
  field.n_photons = n_photons;
  CompositeState s0 = initial_state(field, well, internal);
  size_t rows = series.times.size();
  std::vector<double> gt(rows), an_LL(rows), an_RR(rows), an_ee(rows),
      an_x(rows), x_ratio(rows);
  double dev_RR = 0.0, dev_ee = 0.0;
  for (size_t i = 0; i < rows; ++i) {
    double t = series.times[i];
    gt[i] = g * t;
    CompositeState st = evolve(s0, model, t);
    Eigen::Matrix2cd ext = reduce_external(st);
    an_LL[i] = ext(0, 0).real();
    an_RR[i] = ext(1, 1).real();
    an_ee[i] = reduce_internal(st)(1, 1).real();
    an_x[i] = 1.0 - 2.0 * an_LL[i];
    x_ratio[i] = series.x_mean[i] / (spectral.well_separation / 2);
    dev_RR = std::max(dev_RR, std::abs(series.rho_RR[i] - an_RR[i]));
    dev_ee = std::max(dev_ee, std::abs(series.rho_ee[i] - an_ee[i]));
  }

  std::string grid_path = ctx.prefix + "_series.csv";
  write_csv(grid_path, series_schema,
            {"gt", "rho_LL", "rho_RR", "rho_ee", "x_mean_over_halfb",
             "rho_RR_raw"},
            {&gt, &series.rho_LL, &series.rho_RR, &series.rho_ee, &x_ratio,
             &series.rho_RR_raw});
  ctx.outcome.files_written.push_back(grid_path);
  std::string an_path = ctx.prefix + "_analytic_series.csv";
  write_csv(an_path, series_schema,
            {"gt", "rho_LL", "rho_RR", "rho_ee", "x_mean_over_halfb"},
            {&gt, &an_LL, &an_RR, &an_ee, &an_x});
  ctx.outcome.files_written.push_back(an_path);

  Report rep(ctx.cfg, "grid_validation", ctx.outcome.warnings);
  rep.kv("tunnel_split", spectral.tunnel_split);
  rep.kv("tunnel_split_over_g", spectral.tunnel_split / g);
  rep.kv("doublet_gap", spectral.doublet_gap);
  double omega_two_level =
      std::sqrt(4.0 * sector * g * g + delta_over_g * g * delta_over_g * g);
  rep.kv("gap_ratio", spectral.doublet_gap / omega_two_level);
  rep.kv("half_separation", spectral.well_separation / 2);
  rep.kv("wavenumber", coupling.wavenumber);
  rep.kv("offset", coupling.offset);
  try {
    WkbEstimate wkb = wkb_splitting(spec, spectral.eigenvalues.at(0));
    rep.kv("wkb_oscillator_frequency", wkb.oscillator_frequency);
    rep.kv("wkb_turning_point", wkb.turning_point);
    rep.kv("wkb_action", wkb.action);
    rep.kv("wkb_splitting", wkb.splitting);
    rep.kv("wkb_over_exact", wkb.splitting / spectral.tunnel_split);
  } catch (const std::domain_error& e) {
    rep.note(std::string("wkb estimate unavailable: ") + e.what());
  }
  rep.kv("max_dev_rho_RR", dev_RR);
  rep.kv("max_dev_rho_ee", dev_ee);
  rep.kv("max_norm_error", series.max_norm_error);
  rep.kv("energy_drift", series.energy_drift);
  rep.kv("max_doublet_residual", series.max_doublet_residual);
  // Sensitivity of the doublet picture to the initial-state choice: mass a
  // minimum-uncertainty packet at the right minimum leaves outside the
  // doublet.
  double minimum = std::sqrt(spec.quadratic / (2.0 * spec.quartic));
  SectorWavefunction gauss = initial_gaussian_state(spec, spectral, minimum);
  rep.kv("gaussian_initial_residual",
         project_to_doublet(gauss, spectral).residual);
  std::string rep_path = ctx.prefix + "_report.txt";
  rep.write(rep_path);
  ctx.outcome.files_written.push_back(rep_path);
}

void run_spectrum(RunContext& ctx) {
  double tunnel = ctx.cfg.require_num("tunnel_split_over_g");
  double delta = ctx.cfg.get_num("delta_over_g", 0.0);
  double kappa = normalize_kappa(ctx.cfg.require_num("kappa"),
                                 ctx.outcome.warnings);
  double chi = ctx.cfg.require_num("chi");
  int n_min = ctx.cfg.get_int("sector_min", 1);
  int n_max = ctx.cfg.require_int("sector_max");
  ctx.cfg.reject_unknown("spectrum");

  if (n_min < 1 || n_max < n_min)
    throw std::domain_error("need 1 <= sector_min <= sector_max, got [" +
                            std::to_string(n_min) + ", " +
                            std::to_string(n_max) + "]");
  SystemParams p = make_params(1.0, delta, tunnel, kappa, chi);
  if (!ctx.execute) return;

  std::string csv_path = ctx.prefix + "_spectrum.csv";
  {
    std::ofstream out(csv_path, std::ios::binary);
    out << "# cavtun " << version << ' ' << spectrum_schema << '\n';
    out << "N,omega_plus,omega_minus,omega_aux,lambda_0,lambda_1,lambda_2,"
           "lambda_3\n";
    for (int n = n_min; n <= n_max; ++n) {
      EigenFrequencies f = eigenfrequencies(p, n);
      out << n << ',' << fmt_e(f.omega_plus) << ',' << fmt_e(f.omega_minus)
          << ',' << fmt_e(f.omega_sq);
      for (double l : f.lambdas) out << ',' << fmt_e(l);
      out << '\n';
    }
    if (!out.good())
      throw std::runtime_error("cannot write output file '" + csv_path + "'");
  }
  ctx.outcome.files_written.push_back(csv_path);

  Report rep(ctx.cfg, "spectrum", ctx.outcome.warnings);
  rep.kv("rows", std::to_string(n_max - n_min + 1));
  std::string rep_path = ctx.prefix + "_report.txt";
  rep.write(rep_path);
  ctx.outcome.files_written.push_back(rep_path);
}

ScenarioOutcome drive(const std::string& config_path, bool execute) {
  RunContext ctx{Config(config_path), {}, execute, {}};
  std::string kind = ctx.cfg.require_str("kind");
  ctx.cfg.set_kind(kind);
  ctx.prefix = ctx.cfg.get_str(
      "prefix", std::filesystem::path(config_path).stem().string());

  if (kind == "resonant")
    run_fock_kind(ctx, true);
  else if (kind == "detuned")
    run_fock_kind(ctx, false);
  else if (kind == "collapse_revival")
    run_collapse_revival(ctx);
  else if (kind == "protocol")
    run_protocol_kind(ctx);
  else if (kind == "grid_validation")
    run_grid_validation(ctx);
  else if (kind == "spectrum")
    run_spectrum(ctx);
  else
    throw ctx.cfg.error_at(
        "kind", "unknown scenario kind '" + kind +
                    "' (expected resonant|detuned|collapse_revival|protocol|"
                    "grid_validation|spectrum)");
  return std::move(ctx.outcome);
}

} // namespace

ScenarioOutcome run_scenario(const std::string& config_path) {
  return drive(config_path, true);
}

std::vector<std::string> validate_config(const std::string& config_path) {
  return drive(config_path, false).warnings;
}

std::string scenario_catalog() {
  return R"(Scenario kinds (flat key=value configs, '#' comments)

Common keys
  kind      one of the scenario kinds below (required)
  prefix    output path prefix (default: config file stem); every run
            writes <prefix>_report.txt plus the CSVs listed per kind

resonant -- single-sector Rabi tunneling, Fock field
  tunnel_split_over_g*  bare tunnel splitting, units of g
  gt_max*               trace length, units of 1/g
  samples     (4096)    sample count, endpoints included
  n_photons   (0)       Fock photon number
  delta_over_g (0)      cavity-atom detuning, units of g
  kappa       (pi/4)    k*b/2; normalized into [0, 2*pi) with a warning
  chi         (-pi/4)   k*x0
  well        (right)   initial well state: left|right|plus|minus
  internal    (excited) initial internal state: ground|excited
  writes <prefix>_series.csv; report cross-checks the resonant closed form
  on its domain (delta = 0, kappa = pi/4, initial |N-1,R,e>)

detuned -- far-detuned effective tunneling, Fock field
  keys as `resonant`, but delta_over_g is required and the default initial
  state is |N-1,-,e> (well = minus); report cross-checks the effective-rate
  closed form

collapse_revival -- coherent field, envelope analysis of <x>(t)
  tunnel_split_over_g*, gt_max*, samples (4096), delta_over_g (0),
  kappa (pi/4), chi (-pi/4), well (right), internal (excited)
  alpha*                coherent amplitude (n_mean = alpha^2)
  truncation_tail (1e-12) dropped Poisson tail mass
  gt_max must cover >= 1.5x the predicted revival time; report carries
  collapse/revival predictions and the measured envelope peak

protocol -- pulse / free-evolution schedule
  tunnel_split_over_g*  bare tunnel splitting, units of g
  theta        (pi)     built-in schedule rotation angle, [0, pi]
  protocol_file ()      optional text schedule overriding the built-in one;
                        lines: `pulse` or
                        `evolve <gt> <delta/g> <Delta/g> <kappa> <chi>`
  samples      (512)    series samples on the free-evolution clock
  well (minus), internal (ground), n_photons (0)          initial state
  target_well (left), target_internal (ground), target_n_photons (0)
  report carries fidelity (global-phase insensitive) and leakage

grid_validation -- spatial-grid propagation vs the reduced sector model
  g*                    physical coupling strength
  well_quartic (0.08), well_quadratic (1.0), mass (1.0)   V = A x^4 - B x^2
  grid_min (-8), grid_max (8), grid_points (1024), retained_states (8)
  delta_over_g (3), kappa (pi/4), chi (-pi/4), sector (1)
  well (right), internal (excited)
  gt_max (40), samples (401)
  time_step (0.02)      physical splitting step (shrunk to land on samples)
  integrator_order (4)  2 = Strang, 4 = Yoshida composition
  writes <prefix>_series.csv (with rho_RR_raw column) and
  <prefix>_analytic_series.csv at the same instants; report carries the
  well spectrum, WKB estimate, deviations, norm/energy diagnostics

spectrum -- sector eigenfrequency table
  tunnel_split_over_g*, kappa*, chi*, delta_over_g (0)
  sector_min (1), sector_max*
  writes <prefix>_spectrum.csv (N, omega_plus, omega_minus, omega_aux,
  lambda_0..lambda_3, frequencies in units of g)

(*) required. Exit codes: 0 success, 2 config error, 3 domain violation.
CAVTUN_THREADS caps the sampling worker count (default: hardware threads);
the output bytes do not depend on it.
)";
}

} // namespace cavtun
