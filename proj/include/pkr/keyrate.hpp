// One-way key rates of measured private states, the Pauli-channel closed
// forms, and φ-invariance checks.

#pragma once

#include "pkr/channels.hpp"
#include "pkr/qcore.hpp"
#include "pkr/sphere.hpp"

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pkr {

using QubitBasis = std::array<Vector, 2>;

/// Eigenvectors of σ·n̂(θ, φ):
///   e₀ = (cos θ/2, e^{iφ} sin θ/2), e₁ = (sin θ/2, −e^{iφ} cos θ/2).
inline QubitBasis basis_vectors(const MeasurementAngles& a) {
  const double c = std::cos(a.theta / 2);
  const double s = std::sin(a.theta / 2);
  const cplx ph = std::polar(1.0, a.phi);
  Vector e0(2), e1(2);
  e0 << c, ph * s;
  e1 << s, -ph * c;
  return {e0, e1};
}

struct KeyRateBreakdown {
  double i_ab = 0.0;
  double i_ae = 0.0;
  double key = 0.0;
  MeasurementAngles alice;
  std::optional<MeasurementAngles> bob;  // set for the CCQ rate
};

/// Caches the A:B and A:E reductions of a state on (A, B, A', B', ...).
/// Dephasing A commutes with discarding every other factor, so each rate
/// only needs the two small reductions.
class KeyRateEvaluator {
 public:
  explicit KeyRateEvaluator(const QuantumState& s) {
    const auto& l = s.layout();
    for (const char* need : {"A", "B"}) {
      if (!l.contains(need)) {
        throw std::invalid_argument(std::string("key rate: layout has no subsystem '") + need + "'");
      }
    }
    if (l.dim_of("A") != 2) throw std::invalid_argument("key rate: A must be a qubit");
    db_ = l.dim_of("B");
    const PureStateVector psi = purify(s, unused_label(l));
    const std::string eve = psi.layout().parts().back().label;
    de_ = psi.layout().dim_of(eve);
    const std::string ab[] = {"A", "B"};
    const std::string ae[] = {"A", eve};
    rho_ab_ = reduced_density(psi.amplitudes(), psi.layout(), ab);
    rho_ae_ = reduced_density(psi.amplitudes(), psi.layout(), ae);
  }

  [[nodiscard]] const Matrix& rho_ab() const { return rho_ab_; }
  [[nodiscard]] const Matrix& rho_ae() const { return rho_ae_; }
  [[nodiscard]] std::size_t eve_dim() const { return de_; }

  [[nodiscard]] KeyRateBreakdown cqq(std::span<const Vector> alice_basis) const {
    KeyRateBreakdown out;
    const SubsystemLayout lab{{"A", 2}, {"B", db_}};
    const SubsystemLayout lae{{"A", 2}, {"E", de_}};
    out.i_ab = mutual_information(dephase(rho_ab_, lab, "A", alice_basis), 2, db_);
    out.i_ae = mutual_information(dephase(rho_ae_, lae, "A", alice_basis), 2, de_);
    out.key = out.i_ab - out.i_ae;
    return out;
  }

  [[nodiscard]] KeyRateBreakdown cqq(const MeasurementAngles& a) const {
    const auto basis = basis_vectors(a);
    auto out = cqq(basis);
    out.alice = a;
    return out;
  }

  [[nodiscard]] KeyRateBreakdown ccq(const MeasurementAngles& a, const MeasurementAngles& b) const {
    if (db_ != 2) throw std::invalid_argument("CCQ rate: B must be a qubit");
    const auto ba = basis_vectors(a);
    const auto bb = basis_vectors(b);
    const SubsystemLayout lab{{"A", 2}, {"B", 2}};
    const SubsystemLayout lae{{"A", 2}, {"E", de_}};
    const Matrix cc = dephase(dephase(rho_ab_, lab, "A", ba), lab, "B", bb);
    KeyRateBreakdown out;
    out.i_ab = mutual_information(cc, 2, 2);
    out.i_ae = mutual_information(dephase(rho_ae_, lae, "A", ba), 2, de_);
    out.key = out.i_ab - out.i_ae;
    out.alice = a;
    out.bob = b;
    return out;
  }

  [[nodiscard]] double key(const MeasurementAngles& a) const { return cqq(a).key; }

 private:
  static std::string unused_label(const SubsystemLayout& l) {
    std::string e = "E";
    while (l.contains(e)) e += "'";
    return e;
  }

  std::size_t db_ = 2;
  std::size_t de_ = 1;
  Matrix rho_ab_;
  Matrix rho_ae_;
};

inline KeyRateBreakdown key_rate_cqq(const QuantumState& s, const MeasurementAngles& a) {
  return KeyRateEvaluator(s).cqq(a);
}

inline KeyRateBreakdown key_rate_cqq(const QuantumState& s, std::span<const Vector> alice_basis) {
  return KeyRateEvaluator(s).cqq(alice_basis);
}

inline KeyRateBreakdown key_rate_ccq(const QuantumState& s, const MeasurementAngles& a,
                                     const MeasurementAngles& b) {
  return KeyRateEvaluator(s).ccq(a, b);
}

struct CqqDecomposition {
  std::vector<double> q;
  std::vector<std::optional<QuantumState>> conditional;  // on (B, E); empty when q ≈ 0
  QubitBasis basis;
};

/// Alice's outcome distribution and the normalized Bob+Eve states it leaves,
/// shields traced out.
inline CqqDecomposition cqq_decomposition(const QuantumState& s, const MeasurementAngles& a) {
  const PureStateVector psi = purify(s);
  const auto& l = psi.layout();
  if (l.dim_of("A") != 2) throw std::invalid_argument("cqq_decomposition: A must be a qubit");
  CqqDecomposition out;
  out.basis = basis_vectors(a);
  const std::string keep[] = {"A", "B", "E"};
  const Matrix rho_abe = reduced_density(psi.amplitudes(), l, keep);
  const auto dbe = rho_abe.rows() / 2;
  const SubsystemLayout be{{"B", l.dim_of("B")}, {"E", l.dim_of("E")}};
  for (const auto& e : out.basis) {
    // (⟨e|⊗I) ρ (|e⟩⊗I)
    Matrix cond = Matrix::Zero(dbe, dbe);
    for (Eigen::Index i = 0; i < 2; ++i) {
      for (Eigen::Index j = 0; j < 2; ++j) {
        cond += std::conj(e(i)) * e(j) * rho_abe.block(i * dbe, j * dbe, dbe, dbe);
      }
    }
    const double q = cond.trace().real();
    out.q.push_back(std::max(q, 0.0));
    if (q > 1e-14) {
      cond /= q;
      cond = 0.5 * (cond + cond.adjoint());
      out.conditional.emplace_back(QuantumState(std::move(cond), be));
    } else {
      out.conditional.emplace_back(std::nullopt);
    }
  }
  return out;
}

struct PauliLandscape {
  std::array<double, 4> lambda{};
  double i_ab = 0.0;
};

/// Closed-form spectrum of the measured Bell-diagonal state left by a Pauli
/// channel on A of a twisted psi_+ (S_A = S_B = 1).
inline PauliLandscape analytic_pauli_landscape(const PauliParams& p, const MeasurementAngles& a) {
  p.validate();
  const double ct = std::cos(a.theta), st = std::sin(a.theta);
  const double zz = p.p1 + p.p4 - p.p2 - p.p3;
  const cplx perp = std::polar(1.0, a.phi) * (p.p1 - p.p4) + std::polar(1.0, -a.phi) * (p.p2 - p.p3);
  const double d = ct * ct * zz * zz + st * st * std::norm(perp);
  const double r = std::sqrt(std::clamp(d, 0.0, 1.0));
  PauliLandscape out;
  out.lambda = {0.25 * (1 + r), 0.25 * (1 + r), 0.25 * (1 - r), 0.25 * (1 - r)};
  out.i_ab = 2.0 - shannon_entropy_bits(out.lambda);
  return out;
}

inline bool in_pauli_invariance_class(const PauliParams& p, double tolerance = 1e-12) {
  return std::abs(p.p1 - p.p4) <= tolerance || std::abs(p.p2 - p.p3) <= tolerance;
}

/// 0 or π/2, whichever endpoint maximizes I(A:B). Inside the invariance
/// class D(θ) interpolates linearly in cos²θ between its endpoint values.
inline double optimal_theta_pauli(const PauliParams& p) {
  p.validate();
  if (!in_pauli_invariance_class(p)) {
    throw std::invalid_argument("optimal_theta_pauli: need p1 = p4 or p2 = p3");
  }
  const double zz = p.p1 + p.p4 - p.p2 - p.p3;
  const double perp = std::abs(p.p2 - p.p3) <= 1e-12 ? p.p1 - p.p4 : p.p2 - p.p3;
  return zz * zz >= perp * perp ? 0.0 : std::numbers::pi / 2;
}

using KeyLandscape = std::function<double(const MeasurementAngles&)>;

/// max_j |K(r, φ_j) − K(r, 0)| over n equally spaced φ_j on the circle of
/// radius r about the frame's pole.
inline double phi_invariance_deviation(const KeyLandscape& key, const Frame& frame, double radius,
                                       std::size_t n_samples) {
  if (n_samples < 2) throw std::invalid_argument("phi_invariance_deviation: need at least 2 samples");
  const double k0 = key(frame.lab_angles({radius, 0.0}));
  double worst = 0.0;
  for (std::size_t j = 1; j < n_samples; ++j) {
    const double phi = 2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_samples);
    worst = std::max(worst, std::abs(key(frame.lab_angles({radius, phi})) - k0));
  }
  return worst;
}

inline double phi_invariance_deviation(const QuantumState& s, double theta, std::size_t n_samples) {
  const KeyRateEvaluator ev(s);
  return phi_invariance_deviation([&](const MeasurementAngles& a) { return ev.key(a); }, Frame{},
                                  theta, n_samples);
}

}  // namespace pkr
