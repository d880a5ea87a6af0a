// Named scenarios, parameter sweeps, and CSV/JSON output of sweep rows.

#pragma once

#include "pkr/channels.hpp"
#include "pkr/estimator.hpp"
#include "pkr/keyrate.hpp"
#include "pkr/states.hpp"

#include "json.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace pkr {

// ---------------------------------------------------------------------------
// Text parsing

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view s, std::string_view what) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

/// "0.25", "0.005pi", "pi", "-pi", "pi/3", "2pi/5".
inline double parse_angle(std::string_view text) {
  const std::string_view s = detail::trim(text);
  const auto at = s.find("pi");
  if (at == std::string_view::npos) return detail::parse_number(s, "angle");
  std::string_view coef = s.substr(0, at);
  std::string_view rest = s.substr(at + 2);
  double k = 1.0;
  if (coef == "-") {
    k = -1.0;
  } else if (!coef.empty() && coef != "+") {
    if (coef.back() == '*') coef.remove_suffix(1);
    k = detail::parse_number(coef, "angle");
  }
  if (!rest.empty()) {
    if (rest.front() != '/') throw std::invalid_argument("cannot parse angle '" + std::string(s) + "'");
    const double den = detail::parse_number(rest.substr(1), "angle");
    if (den == 0.0) throw std::invalid_argument("angle '" + std::string(s) + "' divides by zero");
    k /= den;
  }
  return k * std::numbers::pi;
}

/// Compact decimal with π factored out when it is a simple multiple.
inline std::string format_angle(double a) {
  const double k = a / std::numbers::pi;
  for (int den : {1, 2, 3, 4, 5, 6, 7, 8, 10, 100, 1000, 10000}) {
    const double num = k * den;
    if (std::abs(num - std::round(num)) < 1e-9 && std::round(num) != 0) {
      std::ostringstream os;
      const auto n = static_cast<long>(std::round(num));
      if (den == 1) {
        os << (n == 1 ? "" : std::to_string(n)) << "pi";
      } else if (den <= 8) {
        os << (n == 1 ? "" : std::to_string(n)) << "pi/" << den;
      } else {
        os << k << "pi";
      }
      return os.str();
    }
  }
  std::ostringstream os;
  os << a;
  return os.str();
}

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return {buf, end};
}

inline double parse_double_field(std::string_view s) {
  s = detail::trim(s);
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return detail::parse_number(s, "number");
}

// ---------------------------------------------------------------------------
// Channels and base states by name

struct ChannelSpec {
  enum class Kind { none, depolarizing, phaseflip, pauli, trig };
  Kind kind = Kind::none;
  double p = 0.0;
  PauliParams pauli;
  TrigParams trig;

  [[nodiscard]] std::optional<KrausChannel> build() const {
    switch (kind) {
      case Kind::none: return std::nullopt;
      case Kind::depolarizing: return depolarizing(p);
      case Kind::phaseflip: return phase_flip(p);
      case Kind::pauli: return pauli_channel(pauli);
      case Kind::trig: return trig_channel(trig);
    }
    return std::nullopt;
  }

  [[nodiscard]] std::string to_string() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::none: return "none";
      case Kind::depolarizing: os << "depolarizing:p=" << format_double(p); break;
      case Kind::phaseflip: os << "phaseflip:p=" << format_double(p); break;
      case Kind::pauli:
        os << "pauli:p1=" << format_double(pauli.p1) << ",p2=" << format_double(pauli.p2)
           << ",p3=" << format_double(pauli.p3) << ",p4=" << format_double(pauli.p4);
        break;
      case Kind::trig: os << "trig:u=" << format_angle(trig.u) << ",v=" << format_angle(trig.v); break;
    }
    return os.str();
  }
};

namespace detail {

/// "name:k=v,k=v" split into name and key/value pairs.
inline std::pair<std::string, std::vector<std::pair<std::string, std::string>>> parse_kv_spec(
    std::string_view text) {
  text = trim(text);
  const auto colon = text.find(':');
  std::string name(trim(text.substr(0, colon)));
  std::vector<std::pair<std::string, std::string>> kv;
  if (colon != std::string_view::npos) {
    for (auto item : split(text.substr(colon + 1), ',')) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw std::invalid_argument("expected key=value in '" + std::string(text) + "'");
      }
      kv.emplace_back(std::string(trim(item.substr(0, eq))), std::string(trim(item.substr(eq + 1))));
    }
  }
  return {std::move(name), std::move(kv)};
}

inline double take(std::vector<std::pair<std::string, std::string>>& kv, const std::string& key,
                   const std::string& spec, bool angle = false) {
  for (auto it = kv.begin(); it != kv.end(); ++it) {
    if (it->first == key) {
      const double v = angle ? parse_angle(it->second) : parse_number(it->second, key);
      kv.erase(it);
      return v;
    }
  }
  throw std::invalid_argument("'" + spec + "' is missing parameter '" + key + "'");
}

inline void require_consumed(const std::vector<std::pair<std::string, std::string>>& kv,
                             const std::string& spec) {
  if (!kv.empty()) {
    throw std::invalid_argument("'" + spec + "' has unknown parameter '" + kv.front().first + "'");
  }
}

}  // namespace detail

/// depolarizing:p=0.1 | phaseflip:p=0.3 | pauli:p1=..,p2=..,p3=..,p4=.. |
/// trig:u=0.1pi,v=0.05pi | none
inline ChannelSpec parse_channel_spec(std::string_view text) {
  const std::string spec(detail::trim(text));
  auto [name, kv] = detail::parse_kv_spec(spec);
  ChannelSpec c;
  if (name == "none" || name == "identity") {
    c.kind = ChannelSpec::Kind::none;
  } else if (name == "depolarizing") {
    c.kind = ChannelSpec::Kind::depolarizing;
    c.p = detail::take(kv, "p", spec);
  } else if (name == "phaseflip") {
    c.kind = ChannelSpec::Kind::phaseflip;
    c.p = detail::take(kv, "p", spec);
  } else if (name == "pauli") {
    c.kind = ChannelSpec::Kind::pauli;
    c.pauli = {detail::take(kv, "p1", spec), detail::take(kv, "p2", spec),
               detail::take(kv, "p3", spec), detail::take(kv, "p4", spec)};
  } else if (name == "trig") {
    c.kind = ChannelSpec::Kind::trig;
    c.trig = {detail::take(kv, "u", spec, true), detail::take(kv, "v", spec, true)};
  } else {
    throw std::invalid_argument("unknown channel '" + name + "'");
  }
  detail::require_consumed(kv, spec);
  (void)c.build();  // range checks
  return c;
}

struct BaseStateSpec {
  enum class Kind { swap, mswap, mixture };
  Kind kind = Kind::swap;
  double p = 1.0;  // weight of ρ_SWAP in the mixture

  [[nodiscard]] QuantumState build() const {
    switch (kind) {
      case Kind::swap: return build_rho_swap();
      case Kind::mswap: return build_rho_mswap();
      case Kind::mixture: return mix_states({{p, build_rho_swap()}, {1.0 - p, build_rho_mswap()}});
    }
    throw std::logic_error("unknown base state");
  }

  [[nodiscard]] std::string to_string() const {
    switch (kind) {
      case Kind::swap: return "swap";
      case Kind::mswap: return "mswap";
      case Kind::mixture: return "mixture:p=" + format_double(p);
    }
    return "?";
  }
};

/// swap | mswap | mixture:p=0.4
inline BaseStateSpec parse_base_state(std::string_view text) {
  const std::string spec(detail::trim(text));
  auto [name, kv] = detail::parse_kv_spec(spec);
  BaseStateSpec b;
  if (name == "swap") {
    b.kind = BaseStateSpec::Kind::swap;
  } else if (name == "mswap") {
    b.kind = BaseStateSpec::Kind::mswap;
  } else if (name == "mixture") {
    b.kind = BaseStateSpec::Kind::mixture;
    b.p = detail::take(kv, "p", spec);
    if (!(b.p >= 0.0 && b.p <= 1.0)) throw std::invalid_argument("mixture weight must lie in [0, 1]");
  } else {
    throw std::invalid_argument("unknown state '" + name + "' (expected swap, mswap, mixture:p=..)");
  }
  detail::require_consumed(kv, spec);
  return b;
}

// ---------------------------------------------------------------------------
// Scenarios

struct ScenarioSpec {
  std::string name;
  BaseStateSpec base;
  MeasurementAngles rotation;  // applied to A after the channel
  ChannelSpec channel;
  MeasurementAngles start;
  std::string description;

  /// Optimal axis of the noiseless rotated state.
  [[nodiscard]] Vec3 true_axis() const { return to_cartesian(rotation); }
};

/// Channel on A first, then the rotation of Alice's key qubit.
inline QuantumState build_scenario_state(const ScenarioSpec& s) {
  QuantumState st = s.base.build();
  if (const auto ch = s.channel.build()) st = apply_channel(st, "A", *ch);
  return rotate_alice_key(st, s.rotation.theta, s.rotation.phi);
}

inline std::vector<double> default_theta1_list() {
  const double pi = std::numbers::pi;
  return {0.0025 * pi, 0.005 * pi, 0.0075 * pi, 0.01 * pi};
}

inline std::vector<std::size_t> default_points_list() {
  std::vector<std::size_t> out;
  for (std::size_t n = 10; n <= 100; n += 10) out.push_back(n);
  return out;
}

inline std::vector<ScenarioSpec> builtin_scenarios() {
  using K = ChannelSpec::Kind;
  const double pi = std::numbers::pi;
  std::vector<ScenarioSpec> out;
  auto add = [&](std::string name, BaseStateSpec base, double theta, ChannelSpec ch,
                 std::string desc) {
    out.push_back({std::move(name), base, {theta, 0.0}, ch, {0.0, 0.0}, std::move(desc)});
  };
  add("fig3", {}, pi / 3, {}, "swap p-bit rotated by pi/3");
  add("fig4", {}, pi / 4, {K::depolarizing, 0.1, {}, {}}, "swap p-bit, depolarizing p=0.1, rotated by pi/4");
  add("fig5", {}, pi / 7, {K::phaseflip, 0.3, {}, {}}, "swap p-bit, phase flip p=0.3, rotated by pi/7");
  add("fig6", {BaseStateSpec::Kind::mixture, 0.4}, pi / 8, {},
      "0.4 swap + 0.6 mswap mixture rotated by pi/8");
  add("fig7", {}, pi / 8, {K::trig, 0.0, {}, {0.1 * pi, 0.05 * pi}},
      "swap p-bit, trig channel u=0.1pi v=0.05pi, rotated by pi/8");
  return out;
}

inline ScenarioSpec find_scenario(std::string_view name) {
  for (auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRecord {
  std::string scenario;
  double theta_rot = 0.0;
  double theta1 = 0.0;
  std::size_t n_points = 0;
  double kd0 = 0.0;
  double theta_est = 0.0;
  double phi_est = 0.0;
  double bound = 0.0;
  double actual_error = 0.0;
  double invariance_dev = 0.0;
  double wall_ms = 0.0;
  // not part of the CSV schema
  bool degenerate = false;
  bool low_confidence = false;
  bool symmetry_broken = false;
  std::string error;

  [[nodiscard]] bool trusted() const {
    return error.empty() && !degenerate && !low_confidence && !symmetry_broken;
  }
};

struct SweepOptions {
  bool record_timing = true;
  bool check_symmetry = true;
};

/// One row per (θ₁, N), ordered by θ₁ then N. A failing row keeps its
/// message in `error` and NaN numbers; the sweep carries on.
inline std::vector<SweepRecord> run_sweep(const ScenarioSpec& spec, const std::vector<double>& theta1s,
                                          const std::vector<std::size_t>& points,
                                          const SweepOptions& opt = {}) {
  const KeyRateEvaluator ev(build_scenario_state(spec));
  const KeyLandscape key = [&](const MeasurementAngles& a) { return ev.key(a); };
  const Vec3 truth = spec.true_axis();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SweepRecord> rows;
  for (double t1 : theta1s) {
    for (std::size_t n : points) {
      SweepRecord r;
      r.scenario = spec.name;
      r.theta_rot = spec.rotation.theta;
      r.theta1 = t1;
      r.n_points = n;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        EstimationConfig cfg;
        cfg.start = spec.start;
        cfg.theta1 = t1;
        cfg.n_points = n;
        cfg.check_symmetry = opt.check_symmetry;
        const auto res = estimate_optimal_basis(key, cfg);
        r.kd0 = res.k_d0;
        r.theta_est = res.axis_angles.theta;
        r.phi_est = res.axis_angles.phi;
        r.bound = res.bound;
        r.actual_error = axis_error(res.axis, truth);
        r.invariance_dev = res.invariance_deviation;
        r.degenerate = res.degenerate;
        r.low_confidence = res.low_confidence;
        r.symmetry_broken = res.symmetry_broken;
      } catch (const std::exception& e) {
        r.kd0 = r.theta_est = r.phi_est = r.bound = r.actual_error = r.invariance_dev = nan;
        r.error = e.what();
      }
      const auto t1_ = std::chrono::steady_clock::now();
      r.wall_ms = opt.record_timing ? std::chrono::duration<double, std::milli>(t1_ - t0).count() : 0.0;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV / JSON

inline constexpr std::string_view kCsvHeader =
    "scenario,theta_rot,theta1,n_points,kd0,theta_est,phi_est,bound,actual_error,invariance_dev,wall_ms";

inline void write_csv(std::ostream& os, const std::vector<SweepRecord>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.scenario << ',' << format_double(r.theta_rot) << ',' << format_double(r.theta1) << ','
       << r.n_points << ',' << format_double(r.kd0) << ',' << format_double(r.theta_est) << ','
       << format_double(r.phi_est) << ',' << format_double(r.bound) << ','
       << format_double(r.actual_error) << ',' << format_double(r.invariance_dev) << ','
       << format_double(r.wall_ms) << '\n';
  }
}

inline std::vector<SweepRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("CSV input is empty");
  if (detail::trim(line) != kCsvHeader) throw std::runtime_error("unexpected CSV header '" + line + "'");
  std::vector<SweepRecord> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 11) {
      throw std::runtime_error("CSV line " + std::to_string(lineno) + " has " +
                               std::to_string(f.size()) + " fields, expected 11");
    }
    SweepRecord r;
    r.scenario = std::string(f[0]);
    r.theta_rot = parse_double_field(f[1]);
    r.theta1 = parse_double_field(f[2]);
    r.n_points = static_cast<std::size_t>(detail::parse_number(f[3], "n_points"));
    r.kd0 = parse_double_field(f[4]);
    r.theta_est = parse_double_field(f[5]);
    r.phi_est = parse_double_field(f[6]);
    r.bound = parse_double_field(f[7]);
    r.actual_error = parse_double_field(f[8]);
    r.invariance_dev = parse_double_field(f[9]);
    r.wall_ms = parse_double_field(f[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace detail {
inline nlohmann::ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}
}  // namespace detail

inline nlohmann::ordered_json to_json(const SweepRecord& r) {
  nlohmann::ordered_json flags = nlohmann::ordered_json::array();
  if (r.degenerate) flags.push_back("degenerate");
  if (r.low_confidence) flags.push_back("low_confidence");
  if (r.symmetry_broken) flags.push_back("symmetry_broken");
  nlohmann::ordered_json j = {{"scenario", r.scenario},
                      {"theta_rot", r.theta_rot},
                      {"theta1", r.theta1},
                      {"n_points", r.n_points},
                      {"kd0", detail::json_number(r.kd0)},
                      {"theta_est", detail::json_number(r.theta_est)},
                      {"phi_est", detail::json_number(r.phi_est)},
                      {"bound", detail::json_number(r.bound)},
                      {"actual_error", detail::json_number(r.actual_error)},
                      {"invariance_dev", detail::json_number(r.invariance_dev)},
                      {"wall_ms", r.wall_ms},
                      {"flags", flags}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline SweepRecord sweep_record_from_json(const nlohmann::ordered_json& j) {
  auto num = [&](const char* k) {
    const auto& v = j.at(k);
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  };
  SweepRecord r;
  r.scenario = j.at("scenario").get<std::string>();
  r.theta_rot = num("theta_rot");
  r.theta1 = num("theta1");
  r.n_points = j.at("n_points").get<std::size_t>();
  r.kd0 = num("kd0");
  r.theta_est = num("theta_est");
  r.phi_est = num("phi_est");
  r.bound = num("bound");
  r.actual_error = num("actual_error");
  r.invariance_dev = num("invariance_dev");
  r.wall_ms = num("wall_ms");
  if (j.contains("flags")) {
    for (const auto& f : j.at("flags")) {
      const auto s = f.get<std::string>();
      if (s == "degenerate") r.degenerate = true;
      if (s == "low_confidence") r.low_confidence = true;
      if (s == "symmetry_broken") r.symmetry_broken = true;
    }
  }
  if (j.contains("error")) r.error = j.at("error").get<std::string>();
  return r;
}

inline void write_json(std::ostream& os, const std::vector<SweepRecord>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  os << arr.dump(2) << '\n';
}

inline std::vector<SweepRecord> read_json(std::istream& is) {
  const auto arr = nlohmann::ordered_json::parse(is);
  std::vector<SweepRecord> rows;
  for (const auto& j : arr) rows.push_back(sweep_record_from_json(j));
  return rows;
}

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown format '" + std::string(s) + "' (expected csv or json)");
}

inline void emit(const std::vector<SweepRecord>& rows, OutputFormat fmt, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  if (fmt == OutputFormat::csv) {
    write_csv(out, rows);
  } else {
    write_json(out, rows);
  }
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace pkr
