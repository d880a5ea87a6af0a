// Recover the secure axis of a rotated swap p-bit from one ring of key rates.

#include "pkr/pkr.hpp"

#include <cstdio>
#include <numbers>

int main() {
  using namespace pkr;
  const double pi = std::numbers::pi;

  const QuantumState rho = rotate_alice_key(build_rho_swap(), pi / 3, 0.4);
  const KeyRateEvaluator ev(rho);

  EstimationConfig cfg;
  cfg.theta1 = 0.005 * pi;
  cfg.n_points = 40;
  const auto res = estimate_optimal_basis([&](const MeasurementAngles& a) { return ev.key(a); }, cfg);

  const double err = axis_error(res.axis, to_cartesian({pi / 3, 0.4}));
  std::printf("K at start      %.6f\n", res.k_d0);
  std::printf("axis (theta,phi) (%.6f, %.6f)  true (%.6f, %.6f)\n", res.axis_angles.theta,
              res.axis_angles.phi, pi / 3, 0.4);
  std::printf("error %.3e  bound %.3e  symmetry deviation %.1e%s\n", err, res.bound,
              res.invariance_deviation, res.trusted() ? "" : "  (flagged)");
  std::printf("K at estimate   %.9f\n", ev.key(res.axis_angles));
  return 0;
}
