// Directions on the unit sphere: angle pairs, distances, rotated frames and
// circumcenters of three points.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pkr {

using Vec3 = Eigen::Vector3d;

/// Polar angle θ ∈ [0, π] from +z, azimuth φ ∈ [0, 2π).
struct MeasurementAngles {
  double theta = 0.0;
  double phi = 0.0;
};

inline double wrap_two_pi(double a) {
  constexpr double tau = 2 * std::numbers::pi;
  double r = std::fmod(a, tau);
  if (r < 0) r += tau;
  if (r >= tau) r -= tau;
  return r;
}

/// Signed difference a − b folded into (−π, π].
inline double wrap_pi(double a) {
  double r = wrap_two_pi(a + std::numbers::pi) - std::numbers::pi;
  if (r <= -std::numbers::pi) r += 2 * std::numbers::pi;
  return r;
}

inline Vec3 to_cartesian(const MeasurementAngles& a) {
  return {std::sin(a.theta) * std::cos(a.phi), std::sin(a.theta) * std::sin(a.phi),
          std::cos(a.theta)};
}

inline MeasurementAngles from_cartesian(const Vec3& v) {
  const double n = v.norm();
  if (n == 0.0) throw std::invalid_argument("from_cartesian: zero vector");
  const double rho = std::hypot(v.x(), v.y());
  const double phi = rho == 0.0 ? 0.0 : wrap_two_pi(std::atan2(v.y(), v.x()));
  return {std::atan2(rho, v.z()), phi};
}

/// Angle between two directions, accurate for nearby and antipodal pairs.
inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

/// arccos(sinθᵢ sinθⱼ cos(φᵢ−φⱼ) + cosθᵢ cosθⱼ) with the argument clamped.
inline double spherical_distance(const MeasurementAngles& p, const MeasurementAngles& q) {
  const double c = std::sin(p.theta) * std::sin(q.theta) * std::cos(p.phi - q.phi) +
                   std::cos(p.theta) * std::cos(q.theta);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

/// Orthonormal frame whose z axis is the direction (θ₀, φ₀). At the origin
/// it coincides with the lab frame.
class Frame {
 public:
  Frame() : Frame(MeasurementAngles{}) {}

  explicit Frame(const MeasurementAngles& pole) : pole_(pole) {
    const double ct = std::cos(pole.theta), st = std::sin(pole.theta);
    const double cp = std::cos(pole.phi), sp = std::sin(pole.phi);
    ex_ = {ct * cp, ct * sp, -st};
    ey_ = {-sp, cp, 0.0};
    ez_ = {st * cp, st * sp, ct};
  }

  /// Frame with an arbitrary unit z axis; x is the lab-meridian tangent.
  static Frame about(const Vec3& axis) { return Frame(from_cartesian(axis)); }

  [[nodiscard]] const MeasurementAngles& pole() const { return pole_; }
  [[nodiscard]] const Vec3& ex() const { return ex_; }
  [[nodiscard]] const Vec3& ey() const { return ey_; }
  [[nodiscard]] const Vec3& ez() const { return ez_; }

  [[nodiscard]] Vec3 to_lab(const Vec3& w) const { return w.x() * ex_ + w.y() * ey_ + w.z() * ez_; }
  [[nodiscard]] Vec3 to_lab(const MeasurementAngles& w) const { return to_lab(to_cartesian(w)); }
  [[nodiscard]] Vec3 to_working(const Vec3& lab) const {
    return {ex_.dot(lab), ey_.dot(lab), ez_.dot(lab)};
  }
  [[nodiscard]] MeasurementAngles working_angles(const Vec3& lab) const {
    return from_cartesian(to_working(lab));
  }
  [[nodiscard]] MeasurementAngles lab_angles(const MeasurementAngles& w) const {
    return from_cartesian(to_lab(w));
  }

 private:
  MeasurementAngles pole_;
  Vec3 ex_, ey_, ez_;
};

/// Center of the circle through the pole and the two ring points (θ₁, φ̃₁),
/// (θ₁, φ̃₂). Two antipodal centers solve the system; the one with
/// θ ≤ π/2 (radius ≤ π/2) is returned.
inline MeasurementAngles circumcenter_from_pole(double theta1, double phi1, double phi2) {
  if (std::abs(wrap_pi(phi1 - phi2)) < 1e-12) {
    throw std::invalid_argument("circumcenter_from_pole: ring points coincide");
  }
  double phi_m = 0.5 * (phi1 + phi2);
  const double x = std::cos(phi1 - phi_m) / std::tan(theta1 / 2);
  double theta_m = std::atan2(1.0, x);  // arccot into (0, π)
  if (theta_m > std::numbers::pi / 2 + 1e-15) {
    theta_m = std::numbers::pi - theta_m;
    phi_m += std::numbers::pi;
  }
  return {theta_m, wrap_two_pi(phi_m)};
}

/// Circumcenter by intersecting perpendicular-bisector great circles; the
/// center on the same side as p₀ is returned.
inline MeasurementAngles circumcenter_numeric(const MeasurementAngles& p0, const MeasurementAngles& p1,
                                              const MeasurementAngles& p2) {
  const Vec3 a = to_cartesian(p0), b = to_cartesian(p1), c = to_cartesian(p2);
  Vec3 n = (b - a).cross(c - a);
  const double len = n.norm();
  if (len < 1e-12) throw std::invalid_argument("circumcenter_numeric: points are degenerate");
  n /= len;
  if (n.dot(a) < 0) n = -n;
  return from_cartesian(n);
}

}  // namespace pkr
