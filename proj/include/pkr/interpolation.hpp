// Periodic piecewise-cubic interpolation on a uniform angular grid and the
// second-order level-crossing step used to refine ring samples.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pkr {

/// Cubic Hermite interpolant through N equally spaced samples on [0, 2π).
/// Node slopes and curvatures come from 5-point centered differences with
/// wraparound.
class PeriodicCubicInterpolant {
 public:
  explicit PeriodicCubicInterpolant(std::vector<double> values) : f_(std::move(values)) {
    if (f_.size() < 4) throw std::invalid_argument("periodic interpolant needs at least 4 nodes");
    h_ = 2 * std::numbers::pi / static_cast<double>(f_.size());
    const auto n = f_.size();
    d1_.resize(n);
    d2_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double fm2 = at(i, -2), fm1 = at(i, -1), f0 = f_[i], fp1 = at(i, 1), fp2 = at(i, 2);
      d1_[i] = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h_);
      d2_[i] = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h_ * h_);
    }
  }

  [[nodiscard]] std::size_t size() const { return f_.size(); }
  [[nodiscard]] double spacing() const { return h_; }
  [[nodiscard]] double node(std::size_t i) const { return h_ * static_cast<double>(i); }
  [[nodiscard]] double node_value(std::size_t i) const { return f_.at(i); }
  [[nodiscard]] double node_slope(std::size_t i) const { return d1_.at(i); }
  [[nodiscard]] double node_curvature(std::size_t i) const { return d2_.at(i); }

  [[nodiscard]] double operator()(double phi) const { return eval(phi, 0); }
  [[nodiscard]] double derivative(double phi) const { return eval(phi, 1); }
  [[nodiscard]] double second_derivative(double phi) const { return eval(phi, 2); }

 private:
  [[nodiscard]] double at(std::size_t i, long offset) const {
    const auto n = static_cast<long>(f_.size());
    long j = (static_cast<long>(i) + offset) % n;
    if (j < 0) j += n;
    return f_[static_cast<std::size_t>(j)];
  }

  [[nodiscard]] double eval(double phi, int order) const {
    const double tau = 2 * std::numbers::pi;
    double x = std::fmod(phi, tau);
    if (x < 0) x += tau;
    auto i = static_cast<std::size_t>(x / h_);
    if (i >= f_.size()) i = f_.size() - 1;
    const std::size_t j = (i + 1) % f_.size();
    const double t = (x - node(i)) / h_;
    const double p0 = f_[i], p1 = f_[j], m0 = d1_[i] * h_, m1 = d1_[j] * h_;
    const double t2 = t * t, t3 = t2 * t;
    switch (order) {
      case 0:
        return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 +
               (t3 - t2) * m1;
      case 1:
        return ((6 * t2 - 6 * t) * p0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * p1 +
                (3 * t2 - 2 * t) * m1) /
               h_;
      default:
        return ((12 * t - 6) * p0 + (6 * t - 4) * m0 + (-12 * t + 6) * p1 + (6 * t - 2) * m1) /
               (h_ * h_);
    }
  }

  std::vector<double> f_;
  std::vector<double> d1_;
  std::vector<double> d2_;
  double h_ = 0.0;
};

struct CrossingStep {
  double delta = 0.0;
  bool low_confidence = false;  // no real root; the extremum was used
  bool clamped = false;         // |delta| was capped at max_step
};

/// Solves k_d0 = k_di + slope·Δ + ½·curvature·Δ² for the root of smaller
/// magnitude. Linear when |curvature| < 1e−12, zero when the slope also
/// vanishes. |Δ| is capped at max_step.
inline CrossingStep refine_crossing(double slope, double curvature, double k_di, double k_d0,
                                    double max_step) {
  constexpr double flat = 1e-12;
  CrossingStep out;
  const double a = 0.5 * curvature, b = slope, c = k_di - k_d0;
  if (c == 0.0) return out;
  if (std::abs(curvature) < flat) {
    out.delta = std::abs(b) < flat ? 0.0 : -c / b;
  } else {
    const double disc = b * b - 4 * a * c;
    if (disc < 0) {
      out.delta = -b / (2 * a);
      out.low_confidence = true;
    } else {
      // q = −(b + sign(b)√disc)/2; roots are q/a and c/q
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      const double r1 = q / a;
      const double r2 = q != 0.0 ? c / q : r1;
      out.delta = std::abs(r1) < std::abs(r2) ? r1 : r2;
    }
  }
  if (std::abs(out.delta) > max_step) {
    out.delta = std::copysign(max_step, out.delta);
    out.clamped = true;
  }
  return out;
}

/// Step at ring node i using the interpolant's node derivatives.
inline CrossingStep refine_crossing(const PeriodicCubicInterpolant& interp, std::size_t i,
                                    double k_d0) {
  return refine_crossing(interp.node_slope(i), interp.node_curvature(i), interp.node_value(i), k_d0,
                         interp.spacing());
}

}  // namespace pkr
