// Ring-sampling estimate of the optimal measurement axis and its error
// bound, plus a check that the key landscape really is rotationally
// symmetric about the recovered axis.

#pragma once

#include "pkr/interpolation.hpp"
#include "pkr/keyrate.hpp"
#include "pkr/sphere.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pkr {

struct EstimationConfig {
  MeasurementAngles start;   // ring pole, lab frame
  double theta1 = 0.005 * std::numbers::pi;
  std::size_t n_points = 50;
  bool check_symmetry = true;
  double symmetry_threshold = 1e-6;

  [[nodiscard]] double delta_phi() const {
    return 2 * std::numbers::pi / static_cast<double>(n_points);
  }

  void validate() const {
    if (!(theta1 > 0.0 && theta1 < std::numbers::pi / 2)) {
      throw std::invalid_argument("theta1 must lie in (0, pi/2)");
    }
    if (n_points < 4) throw std::invalid_argument("need at least 4 ring points");
  }
};

struct RingSample {
  double phi = 0.0;
  double key = 0.0;
};

struct RingSampleSet {
  double k_d0 = 0.0;
  double theta1 = 0.0;
  std::vector<RingSample> samples;
  Frame frame;

  [[nodiscard]] std::vector<double> keys() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.key);
    return out;
  }
};

inline RingSampleSet sample_ring(const KeyLandscape& key, const EstimationConfig& cfg) {
  cfg.validate();
  RingSampleSet ring;
  ring.frame = Frame(cfg.start);
  ring.theta1 = cfg.theta1;
  ring.k_d0 = key(cfg.start);
  ring.samples.reserve(cfg.n_points);
  for (std::size_t i = 0; i < cfg.n_points; ++i) {
    const double phi = cfg.delta_phi() * static_cast<double>(i);
    ring.samples.push_back({phi, key(ring.frame.lab_angles({cfg.theta1, phi}))});
  }
  return ring;
}

namespace detail {
inline std::size_t ring_separation(std::size_t i, std::size_t j, std::size_t n) {
  const std::size_t d = i > j ? i - j : j - i;
  return std::min(d, n - d);
}
}  // namespace detail

/// Best match to K_D0, then the best match more than 2Δφ away from it
/// (at least 2Δφ on rings too small to allow that).
inline std::pair<std::size_t, std::size_t> select_closest_pair(const RingSampleSet& ring) {
  const auto n = ring.samples.size();
  if (n < 4) throw std::invalid_argument("select_closest_pair: need at least 4 samples");
  auto gap = [&](std::size_t i) { return std::abs(ring.samples[i].key - ring.k_d0); };
  std::size_t first = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (gap(i) < gap(first)) first = i;
  }
  for (std::size_t min_sep : {std::size_t{3}, std::size_t{2}}) {
    std::optional<std::size_t> second;
    for (std::size_t i = 0; i < n; ++i) {
      if (detail::ring_separation(i, first, n) < min_sep) continue;
      if (!second || gap(i) < gap(*second)) second = i;
    }
    if (second) return {first, *second};
  }
  throw std::logic_error("select_closest_pair: no admissible partner");
}

inline PeriodicCubicInterpolant interpolate_ring(const RingSampleSet& ring) {
  return PeriodicCubicInterpolant(ring.keys());
}

struct RefinedPair {
  std::size_t index1 = 0;
  std::size_t index2 = 0;
  double phi1_node = 0.0;  // φ₁′, φ₂′
  double phi2_node = 0.0;
  double delta1 = 0.0;  // Δφ₁′, Δφ₂′
  double delta2 = 0.0;
  double phi1 = 0.0;  // φ̃₁ > φ̃₂, both in [0, 2π)
  double phi2 = 0.0;
  bool low_confidence = false;
  bool clamped = false;
};

inline RefinedPair refine_pair(const RingSampleSet& ring, const PeriodicCubicInterpolant& interp,
                               std::pair<std::size_t, std::size_t> picks) {
  RefinedPair p;
  const auto s1 = refine_crossing(interp, picks.first, ring.k_d0);
  const auto s2 = refine_crossing(interp, picks.second, ring.k_d0);
  p.index1 = picks.first;
  p.index2 = picks.second;
  p.phi1_node = ring.samples[picks.first].phi;
  p.phi2_node = ring.samples[picks.second].phi;
  p.delta1 = s1.delta;
  p.delta2 = s2.delta;
  p.phi1 = wrap_two_pi(p.phi1_node + p.delta1);
  p.phi2 = wrap_two_pi(p.phi2_node + p.delta2);
  p.low_confidence = s1.low_confidence || s2.low_confidence;
  p.clamped = s1.clamped || s2.clamped;
  if (p.phi1 < p.phi2) {
    std::swap(p.index1, p.index2);
    std::swap(p.phi1_node, p.phi2_node);
    std::swap(p.delta1, p.delta2);
    std::swap(p.phi1, p.phi2);
  }
  if (p.phi1 == p.phi2) throw std::domain_error("refined crossings coincide");
  return p;
}

/// Worst-case angular error of the recovered center. The closed forms are
/// evaluated on the branch φ_M′ = (φ̃₁ + φ̃₂)/2; the antipodal branch gives
/// the same value.
inline double error_bound(const EstimationConfig& cfg, const RefinedPair& pair) {
  const double dphi = cfg.delta_phi();
  const double cot_half = 1.0 / std::tan(cfg.theta1 / 2);
  const double d_phi_m = (2 * dphi - std::abs(pair.delta1) - std::abs(pair.delta2)) / 2;
  const double spread = pair.phi1 - pair.phi2;
  const double theta_m = std::atan2(1.0, cot_half * std::cos(spread / 2));
  const double widened = spread < std::numbers::pi ? spread + 2 * dphi : spread - 2 * dphi;
  const double theta_bar = std::atan2(1.0, cot_half * std::cos(widened / 2));
  const double d_theta_m = theta_m - theta_bar;
  const double arg = std::sin(theta_m) * std::sin(theta_m - d_theta_m) * std::cos(d_phi_m) +
                     std::cos(theta_m) * std::cos(theta_m - d_theta_m);
  return std::max(std::acos(std::clamp(arg, -1.0, 1.0)), 0.0);
}

struct EstimationResult {
  MeasurementAngles working;  // (θ_M′, φ_M′)
  Vec3 axis{0, 0, 1};         // lab frame
  MeasurementAngles axis_angles;
  double radius = 0.0;
  double bound = 0.0;
  double k_d0 = 0.0;
  std::optional<RefinedPair> pair;
  double invariance_deviation = 0.0;
  bool degenerate = false;
  bool low_confidence = false;
  bool symmetry_broken = false;

  [[nodiscard]] bool trusted() const { return !degenerate && !low_confidence && !symmetry_broken; }
};

namespace detail {

/// Unit tangent at the ring pole pointing along the first Fourier harmonic
/// of the ring values, i.e. up the local key gradient.
inline std::optional<Vec3> ascent_tangent(const Frame& frame, const std::vector<double>& keys) {
  const auto n = keys.size();
  std::complex<double> c1 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double phi = 2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    c1 += keys[j] * std::polar(1.0, -phi);
  }
  c1 /= static_cast<double>(n);
  if (std::abs(c1) < 1e-15) return std::nullopt;
  const double phi_a = -std::arg(c1);
  return std::cos(phi_a) * frame.ex() + std::sin(phi_a) * frame.ey();
}

inline std::vector<double> ring_values(const KeyLandscape& key, const Frame& frame, double radius,
                                       std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double phi = 2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    out.push_back(key(frame.lab_angles({radius, phi})));
  }
  return out;
}

inline double max_deviation(const std::vector<double>& values, double ref) {
  double worst = 0.0;
  for (double v : values) worst = std::max(worst, std::abs(v - ref));
  return worst;
}

/// Locates the symmetry axis independently of the circumcenter, by
/// intersecting the great circles of steepest ascent through the pole and
/// through the pole turned 90° about the estimate, then measures how far K
/// strays from K_D0 on the circle about that axis through the pole.
inline double symmetry_deviation(const KeyLandscape& key, const RingSampleSet& ring,
                                 const Vec3& center) {
  const auto n = ring.samples.size();
  const Vec3 p0 = ring.frame.ez();
  const Vec3 p1 = center.cross(p0) + center.dot(p0) * center;
  const auto t0 = ascent_tangent(ring.frame, ring.keys());
  const Frame f1 = Frame::about(p1.normalized());
  const auto t1 = ascent_tangent(f1, ring_values(key, f1, ring.theta1, n));
  Vec3 axis = center;
  if (t0 && t1) {
    Vec3 g = p0.cross(*t0).cross(p1.normalized().cross(*t1));
    if (g.norm() > 1e-12) {
      g.normalize();
      if (g.dot(*t0) < 0) g = -g;
      axis = g;
    }
  }
  const Frame fa = Frame::about(axis);
  const double r = angle_between(axis, p0);
  return max_deviation(ring_values(key, fa, r, n), ring.k_d0);
}

}  // namespace detail

inline EstimationResult estimate_optimal_basis(const KeyLandscape& key, const EstimationConfig& cfg) {
  const RingSampleSet ring = sample_ring(key, cfg);
  EstimationResult res;
  res.k_d0 = ring.k_d0;

  bool flat = true;
  for (const auto& s : ring.samples) {
    if (std::abs(s.key - ring.k_d0) > 1e-12) flat = false;
  }
  if (flat) {
    res.degenerate = true;
    res.axis = ring.frame.ez();
    res.axis_angles = cfg.start;
    res.bound = cfg.delta_phi() * cfg.theta1;
    return res;
  }

  const auto interp = interpolate_ring(ring);
  const RefinedPair pair = refine_pair(ring, interp, select_closest_pair(ring));
  res.pair = pair;
  res.low_confidence = pair.low_confidence;
  res.working = circumcenter_from_pole(cfg.theta1, pair.phi1, pair.phi2);
  res.radius = res.working.theta;
  res.bound = error_bound(cfg, pair);
  res.axis = ring.frame.to_lab(res.working);
  res.axis_angles = from_cartesian(res.axis);

  if (cfg.check_symmetry) {
    res.invariance_deviation = detail::symmetry_deviation(key, ring, res.axis);
    res.symmetry_broken = res.invariance_deviation > cfg.symmetry_threshold;
  }
  return res;
}

/// Angle between two axes with antipodes identified.
inline double axis_error(const Vec3& a, const Vec3& b) {
  const double d = angle_between(a, b);
  return std::min(d, std::numbers::pi - d);
}

}  // namespace pkr
