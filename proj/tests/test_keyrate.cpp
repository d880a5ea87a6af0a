#include "oracle.hpp"
#include "pkr/channels.hpp"
#include "pkr/keyrate.hpp"
#include "pkr/states.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace pkr;

namespace {

constexpr double pi = std::numbers::pi;

QuantumState bell_diagonal(const PauliParams& p) {
  const Matrix m = p.p1 * projector(bell::psi_plus()) + p.p2 * projector(bell::phi_plus()) +
                   p.p3 * projector(bell::phi_minus()) + p.p4 * projector(bell::psi_minus());
  return {m, SubsystemLayout{{"A", 2}, {"B", 2}}};
}

PauliParams random_pauli(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double p[4], s = 0;
  for (double& x : p) s += (x = u(rng));
  return {p[0] / s, p[1] / s, p[2] / s, p[3] / s};
}

QuantumState random_private_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double w = u(rng);
  Vector shield = Vector::Zero(16);
  const Matrix mix = oracle::random_unitary(16, rng);
  shield = mix.col(0);
  PrivateStateSpec spec{2,
                        {std::polar(std::sqrt(w), 2 * pi * u(rng)), std::polar(std::sqrt(1 - w), 2 * pi * u(rng))},
                        PureStateVector(shield, SubsystemLayout{{"A'", 2}, {"B'", 2}, {"E", 4}}),
                        {oracle::random_unitary(4, rng), oracle::random_unitary(4, rng)}};
  return build_generalised_private_state(spec);
}

}  // namespace

TEST(BasisVectors, OriginAndAntipode) {
  const auto o = basis_vectors({0, 0});
  EXPECT_NEAR(std::abs(o[0](0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(o[0](1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(o[1](1) + 1.0), 0.0, 1e-15);
  const double ph = 0.7;
  const auto a = basis_vectors({pi, ph});
  EXPECT_NEAR(std::abs(a[0](1) - std::polar(1.0, ph)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a[1](0)) , 1.0, 1e-15);
}

TEST(BasisVectors, OrthonormalForRandomAngles) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto b = basis_vectors({pi * u(rng), 2 * pi * u(rng)});
    EXPECT_NEAR(std::abs(b[0].dot(b[1])), 0.0, 1e-14);
    EXPECT_NEAR(b[0].norm(), 1.0, 1e-14);
    EXPECT_NEAR(b[1].norm(), 1.0, 1e-14);
  }
}

TEST(KeyRateCqq, SwapPbitReferenceValues) {
  const auto s = build_rho_swap();
  const auto k0 = key_rate_cqq(s, {0, 0});
  EXPECT_NEAR(k0.key, 1.0, 1e-9);
  EXPECT_NEAR(k0.i_ae, 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(k0.key, k0.i_ab - k0.i_ae);
  EXPECT_NEAR(key_rate_cqq(s, {pi / 2, 0}).key, oracle::kSwapKeyHalfPi, 1e-10);
  EXPECT_NEAR(key_rate_cqq(s, {pi / 8, 0}).key, oracle::kSwapKeyEighthPi, 1e-4);
  EXPECT_NEAR(key_rate_cqq(s, {pi / 4, 0}).key, oracle::kSwapKeyQuarterPi, 1e-4);
}

TEST(KeyRateCqq, SwapPbitIsPhiIndependent) {
  const auto s = build_rho_swap();
  for (double th : {0.2, 0.9, pi / 2, 2.4}) {
    EXPECT_NEAR(key_rate_cqq(s, {th, 0.0}).key, key_rate_cqq(s, {th, 2.1}).key, 1e-9);
  }
}

TEST(KeyRateCqq, MatchesNaiveSqrtPurificationOracle) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<QuantumState> states{
      build_rho_swap(), apply_channel(build_rho_swap(), "A", trig_channel({0.1 * pi, 0.05 * pi})),
      rotate_alice_key(apply_channel(build_rho_mswap(), "A", depolarizing(0.2)), 0.4, 1.0),
      QuantumState(oracle::random_density(16, 16, rng), key_shield_layout())};
  for (const auto& s : states) {
    const KeyRateEvaluator ev(s);
    for (int i = 0; i < 3; ++i) {
      const double th = pi * u(rng), ph = 2 * pi * u(rng);
      EXPECT_NEAR(ev.key({th, ph}), oracle::naive_key(s.matrix(), oracle::projector0(th, ph)), 1e-10);
    }
  }
}

TEST(KeyRateCcq, SecureBasisAndReference) {
  const auto s = build_rho_swap();
  EXPECT_NEAR(key_rate_ccq(s, {0, 0}, {0, 0}).key, 1.0, 1e-9);
  EXPECT_NEAR(key_rate_ccq(s, {pi / 3, 0.7}, {pi / 3, 0.7}).key, oracle::kSwapCcqThirdPi, 1e-10);
  const Matrix pa = oracle::projector0(1.0, 0.3), pb = oracle::projector0(2.0, 5.0);
  EXPECT_NEAR(key_rate_ccq(s, {1.0, 0.3}, {2.0, 5.0}).key, oracle::naive_key(s.matrix(), pa, &pb), 1e-10);
}

TEST(KeyRateCcq, OpposedPhaseRotationsLeaveKeyInvariant) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    const auto s = random_private_state(rng);
    const KeyRateEvaluator ev(s);
    const double alpha = 0.37 + i;
    const auto base = ev.ccq({0.8, 0.2}, {1.9, 1.4}).key;
    EXPECT_NEAR(ev.ccq({0.8, 0.2 + alpha}, {1.9, 1.4 - alpha}).key, base, 1e-9);
  }
}

TEST(KeyRate, LayoutErrors) {
  const QuantumState no_b(0.5 * Matrix::Identity(2, 2), SubsystemLayout{{"A", 2}});
  EXPECT_THROW(key_rate_cqq(no_b, {0, 0}), std::invalid_argument);
  const QuantumState big_a(Matrix::Identity(6, 6) / 6.0, SubsystemLayout{{"A", 3}, {"B", 2}});
  EXPECT_THROW(key_rate_cqq(big_a, {0, 0}), std::invalid_argument);
  const QuantumState big_b(Matrix::Identity(6, 6) / 6.0, SubsystemLayout{{"A", 2}, {"B", 3}});
  EXPECT_NO_THROW(key_rate_cqq(big_b, {0, 0}));
  EXPECT_THROW(key_rate_ccq(big_b, {0, 0}, {0, 0}), std::invalid_argument);
}

TEST(KeyRate, EveLabelCollisionHandled) {
  // A is maximally entangled with the purifier, so the rate is -1.
  const QuantumState s(Matrix::Identity(8, 8) / 8.0, SubsystemLayout{{"A", 2}, {"B", 2}, {"E", 2}});
  const KeyRateEvaluator ev(s);
  EXPECT_EQ(ev.eve_dim(), 8u);
  EXPECT_NEAR(ev.cqq({0, 0}).i_ab, 0.0, 1e-12);
  EXPECT_NEAR(ev.key({0, 0}), -1.0, 1e-12);
}

TEST(CqqDecompositionTest, BalancedDeterministicAndNormalized) {
  const auto d = cqq_decomposition(build_rho_swap(), {0, 0});
  EXPECT_NEAR(d.q[0], 0.5, 1e-12);
  EXPECT_NEAR(d.q[1], 0.5, 1e-12);
  ASSERT_TRUE(d.conditional[0].has_value());

  Vector shield = Vector::Zero(4);
  shield(0) = 1;
  const auto det = build_generalised_private_state(
      {2, {1.0, 0.0}, PureStateVector(shield, SubsystemLayout{{"A'", 2}, {"B'", 2}}),
       {Matrix::Identity(4, 4), Matrix::Identity(4, 4)}});
  const auto dd = cqq_decomposition(det, {0, 0});
  EXPECT_NEAR(dd.q[0], 1.0, 1e-12);
  EXPECT_NEAR(dd.q[1], 0.0, 1e-12);
  EXPECT_FALSE(dd.conditional[1].has_value());

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const QuantumState r(oracle::random_density(16, 6, rng), key_shield_layout());
  for (int i = 0; i < 10; ++i) {
    const auto x = cqq_decomposition(r, {pi * u(rng), 2 * pi * u(rng)});
    EXPECT_NEAR(x.q[0] + x.q[1], 1.0, 1e-10);
    for (const auto& c : x.conditional) {
      ASSERT_TRUE(c.has_value());
      EXPECT_NEAR(c->matrix().trace().real(), 1.0, 1e-12);
    }
  }
}

TEST(PauliLandscape, NoiselessEndpoint) {
  const auto l = analytic_pauli_landscape({1, 0, 0, 0}, {0, 0});
  EXPECT_NEAR(l.lambda[0], 0.5, 1e-15);
  EXPECT_NEAR(l.lambda[1], 0.5, 1e-15);
  EXPECT_NEAR(l.lambda[2], 0.0, 1e-15);
  EXPECT_NEAR(l.lambda[3], 0.0, 1e-15);
  EXPECT_NEAR(l.i_ab, 1.0, 1e-15);
}

TEST(PauliLandscape, EqualOuterWeightsRemovePhiDependence) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double a = 0.5 * u(rng), b = u(rng) * (1 - 2 * a);
    const PauliParams p{a, b, 1 - 2 * a - b, a};
    const double th = pi * u(rng);
    const double ref = analytic_pauli_landscape(p, {th, 0}).i_ab;
    for (double ph : {0.5, 1.7, 3.3, 5.9}) EXPECT_NEAR(analytic_pauli_landscape(p, {th, ph}).i_ab, ref, 1e-12);
  }
}

TEST(PauliLandscape, MatchesMeasuredBellDiagonalState) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto p = random_pauli(rng);
    const MeasurementAngles a{pi * u(rng), 2 * pi * u(rng)};
    const auto l = analytic_pauli_landscape(p, a);
    const auto s = bell_diagonal(p);
    const auto basis = basis_vectors(a);
    const auto ev = eigenvalues_hermitian(dephase(s, "A", basis).matrix());
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(ev[k], l.lambda[k], 1e-10);
    EXPECT_NEAR(key_rate_cqq(s, a).i_ab, l.i_ab, 1e-10);
  }
}

TEST(PauliInvariance, InsideClassFlatOutsideNot) {
  const auto swap = build_rho_swap();
  for (const PauliParams& p : {PauliParams{0.3, 0.2, 0.2, 0.3}, PauliParams{0.5, 0.2, 0.2, 0.1},
                               PauliParams{0.25, 0.4, 0.1, 0.25}}) {
    const auto noisy = apply_channel(swap, "A", pauli_channel(p));
    for (double th : {0.4, 1.2, 2.0}) EXPECT_LT(phi_invariance_deviation(noisy, th, 16), 1e-9);
  }
  const auto off = apply_channel(swap, "A", pauli_channel({0.4, 0.1, 0.2, 0.3}));
  EXPECT_GT(phi_invariance_deviation(off, pi / 2, 16), 1e-6);
}

TEST(OptimalTheta, RuleAndErrors) {
  EXPECT_EQ(optimal_theta_pauli({1, 0, 0, 0}), 0.0);
  // D(0) = 0.36 exceeds D(π/2) = 0, so the computational basis wins here.
  EXPECT_EQ(optimal_theta_pauli({0.1, 0.4, 0.4, 0.1}), 0.0);
  EXPECT_EQ(optimal_theta_pauli({0.25, 0.45, 0.05, 0.25}), pi / 2);
  EXPECT_EQ(optimal_theta_pauli({0.5, 0.2, 0.2, 0.1}), pi / 2);
  EXPECT_EQ(optimal_theta_pauli({0.6, 0.1, 0.1, 0.2}), 0.0);
  EXPECT_THROW(optimal_theta_pauli({0.4, 0.1, 0.2, 0.3}), std::invalid_argument);
}

TEST(OptimalTheta, AgreesWithDenseGridArgmax) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  while (checked < 20) {
    auto p = random_pauli(rng);
    if (checked % 2 == 0) {
      const double m = 0.5 * (p.p2 + p.p3);
      p.p2 = p.p3 = m;
    } else {
      const double m = 0.5 * (p.p1 + p.p4);
      p.p1 = p.p4 = m;
    }
    const double zz = p.p1 + p.p4 - p.p2 - p.p3;
    const double perp = checked % 2 == 0 ? p.p1 - p.p4 : p.p2 - p.p3;
    if (std::abs(zz * zz - perp * perp) < 1e-3) continue;
    const KeyRateEvaluator ev(bell_diagonal(p));
    double best = -1, arg = 0;
    for (double th = 0; th <= pi / 2 + 1e-12; th += 1e-3) {
      const double v = ev.cqq({th, 0.3}).i_ab;
      if (v > best + 1e-13) {
        best = v;
        arg = th;
      }
    }
    EXPECT_NEAR(arg, optimal_theta_pauli(p), 1.5e-3);
    ++checked;
  }
}

TEST(PhiInvariance, SwapAndPhaseFlipAboutTheirAxes) {
  EXPECT_LT(phi_invariance_deviation(build_rho_swap(), 1.0, 32), 1e-9);
  const MeasurementAngles rot{pi / 7, 0.5};
  const auto noisy = rotate_alice_key(apply_channel(build_rho_swap(), "A", phase_flip(0.3)), rot.theta, rot.phi);
  const KeyRateEvaluator ev(noisy);
  const KeyLandscape k = [&](const MeasurementAngles& a) { return ev.key(a); };
  for (double r : {0.1, 0.6, 1.3}) EXPECT_LT(phi_invariance_deviation(k, Frame(rot), r, 32), 1e-9);
}

TEST(PhiInvariance, TrigChannelBreaksSymmetry) {
  const auto noisy = apply_channel(build_rho_swap(), "A", trig_channel({0.1 * pi, 0.05 * pi}));
  double worst = 0;
  for (double th : {0.3, 0.8, pi / 2}) worst = std::max(worst, phi_invariance_deviation(noisy, th, 32));
  EXPECT_GT(worst, 1e-6);
  EXPECT_THROW(phi_invariance_deviation(noisy, 0.3, 1), std::invalid_argument);
}

TEST(SymmetryObservation, DiagonalPhaseOnProjectorsKeepsKey) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const auto s = random_private_state(rng);
    const MeasurementAngles a{pi * u(rng), 2 * pi * u(rng)};
    const auto basis = basis_vectors(a);
    const double phases[] = {2 * pi * u(rng), 2 * pi * u(rng)};
    const Matrix r = diagonal_phase_unitary(phases);
    const std::vector<Vector> moved{r * basis[0], r * basis[1]};
    EXPECT_NEAR(key_rate_cqq(s, moved).key, key_rate_cqq(s, basis).key, 1e-9);
  }
}

TEST(Covariance, RotatedStateMeasuredAtRotationMatchesOrigin) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const auto s = random_private_state(rng);
    const double th = pi * u(rng), ph = 2 * pi * u(rng);
    EXPECT_NEAR(key_rate_cqq(rotate_alice_key(s, th, ph), {th, ph}).key, key_rate_cqq(s, {0, 0}).key, 1e-9);
  }
}

TEST(Purification, EveIsometryDoesNotChangeRate) {
  std::mt19937_64 rng(10);
  const QuantumState s(oracle::random_density(16, 5, rng), key_shield_layout());
  const auto psi = purify(s);
  const Matrix v = oracle::random_unitary(static_cast<Eigen::Index>(psi.layout().dim_of("E")), rng);
  const std::string e[] = {"E"};
  const auto twisted = apply_unitary_on(psi.density(), e, v);
  const auto basis = basis_vectors({1.1, 0.4});
  auto iae = [&](const QuantumState& full) {
    const auto ae = partial_trace(dephase(full, "A", basis), {"B", "A'", "B'"});
    return mutual_information(ae, {"A"}, {"E"});
  };
  EXPECT_NEAR(iae(psi.density()), iae(twisted), 1e-9);
  EXPECT_NEAR(iae(psi.density()), key_rate_cqq(s, {1.1, 0.4}).i_ae, 1e-9);
}
