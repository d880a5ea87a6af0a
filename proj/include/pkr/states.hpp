// Generalised private states, the named two-qubit-shield p-bits, twisting,
// and Alice-side key rotations.
//
// Bell labels: psi_± = (|00⟩ ± |11⟩)/√2 and phi_± = (|01⟩ ± |10⟩)/√2.

#pragma once

#include "pkr/qcore.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace pkr {

inline const SubsystemLayout& key_shield_layout() {
  static const SubsystemLayout layout{{"A", 2}, {"B", 2}, {"A'", 2}, {"B'", 2}};
  return layout;
}

namespace bell {

inline Vector ket(std::size_t dim, std::size_t index) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return v;
}

inline Vector two_qubit(double a00, double a01, double a10, double a11) {
  Vector v(4);
  v << a00, a01, a10, a11;
  return v / std::sqrt(2.0);
}

inline Vector psi_plus() { return two_qubit(1, 0, 0, 1); }
inline Vector psi_minus() { return two_qubit(1, 0, 0, -1); }
inline Vector phi_plus() { return two_qubit(0, 1, 1, 0); }
inline Vector phi_minus() { return two_qubit(0, 1, -1, 0); }

}  // namespace bell

/// Parameters of ρ = Σᵢⱼ cᵢ c̄ⱼ |ii⟩⟨jj| ⊗ Tr_E[|Ψᵢ⟩⟨Ψⱼ|] with
/// |Ψᵢ⟩ = (U⁽ⁱ⁾ ⊗ I_E)|Ψ_{A'B'E}⟩.
struct PrivateStateSpec {
  std::size_t key_dim = 2;
  std::vector<cplx> amplitudes;
  PureStateVector shield_eve;  // layout must contain A' and B' (and optionally E)
  std::vector<Matrix> shield_unitaries;
};

inline QuantumState build_generalised_private_state(const PrivateStateSpec& spec) {
  const auto d = spec.key_dim;
  if (d < 2) throw std::invalid_argument("key dimension must be at least 2");
  if (spec.amplitudes.size() != d || spec.shield_unitaries.size() != d) {
    throw std::invalid_argument("need one amplitude and one shield unitary per key value");
  }
  double norm = 0.0;
  for (const auto& c : spec.amplitudes) norm += std::norm(c);
  if (std::abs(norm - 1.0) > tol::norm) {
    throw std::domain_error("key amplitudes are not normalized");
  }
  const auto& sl = spec.shield_eve.layout();
  const std::size_t da = sl.dim_of("A'");
  const std::size_t db = sl.dim_of("B'");
  std::vector<std::string> eve;
  for (const auto& label : sl.labels()) {
    if (label != "A'" && label != "B'") eve.push_back(label);
  }
  const std::string shield_order[] = {"A'", "B'"};
  // σ = Tr_E |Ψ⟩⟨Ψ| on (A', B'); Tr_E[|Ψᵢ⟩⟨Ψⱼ|] = U⁽ⁱ⁾ σ U⁽ʲ⁾†.
  const Matrix sigma = reduced_density(spec.shield_eve.amplitudes(), sl, shield_order);
  const auto ds = static_cast<Eigen::Index>(da * db);
  for (const auto& u : spec.shield_unitaries) {
    if (u.rows() != ds || !is_unitary(u)) {
      throw std::domain_error("shield unitary is not a unitary on A'B'");
    }
  }
  const auto dk = static_cast<Eigen::Index>(d);
  Matrix rho = Matrix::Zero(dk * dk * ds, dk * dk * ds);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const Eigen::Index row = static_cast<Eigen::Index>(i * d + i) * ds;
      const Eigen::Index col = static_cast<Eigen::Index>(j * d + j) * ds;
      rho.block(row, col, ds, ds) = spec.amplitudes[i] * std::conj(spec.amplitudes[j]) *
                                    spec.shield_unitaries[i] * sigma *
                                    spec.shield_unitaries[j].adjoint();
    }
  }
  return {std::move(rho), SubsystemLayout{{"A", d}, {"B", d}, {"A'", da}, {"B'", db}}};
}

/// ρ_SWAP = ¼ psi_−⊗phi_− + ¼ psi_+⊗(I − phi_−): the SWAP-twisted
/// psi_+ ⊗ I/4. Shield singlet phi_− sits under psi_−.
inline QuantumState build_rho_swap() {
  const Matrix singlet = projector(bell::phi_minus());
  Matrix rho = 0.25 * tensor_product(projector(bell::psi_minus()), singlet) +
               0.25 * tensor_product(projector(bell::psi_plus()), Matrix::Identity(4, 4)) -
               0.25 * tensor_product(projector(bell::psi_plus()), singlet);
  return {std::move(rho), key_shield_layout()};
}

/// ρ_MSWAP = ½ psi_−⊗σ₀ + ½ psi_+⊗σ₁ with σ₀ = ½(|00⟩⟨00| + phi_+),
/// σ₁ = ½(|11⟩⟨11| + phi_−). σ₀ ⊥ σ₁, so the key is perfectly private.
inline QuantumState build_rho_mswap() {
  const Matrix sigma0 = 0.5 * (projector(bell::ket(4, 0)) + projector(bell::phi_plus()));
  const Matrix sigma1 = 0.5 * (projector(bell::ket(4, 3)) + projector(bell::phi_minus()));
  Matrix rho = 0.5 * tensor_product(projector(bell::psi_minus()), sigma0) +
               0.5 * tensor_product(projector(bell::psi_plus()), sigma1);
  return {std::move(rho), key_shield_layout()};
}

inline QuantumState mix_states(const std::vector<std::pair<double, QuantumState>>& parts) {
  if (parts.empty()) throw std::invalid_argument("mix_states: no components");
  double total = 0.0;
  for (const auto& [w, s] : parts) {
    if (w < 0.0) throw std::invalid_argument("mix_states: negative weight");
    if (!(s.layout() == parts.front().second.layout())) {
      throw std::invalid_argument("mix_states: layouts differ");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > tol::trace) {
    throw std::invalid_argument("mix_states: weights sum to " + std::to_string(total));
  }
  Matrix rho = Matrix::Zero(parts.front().second.matrix().rows(), parts.front().second.matrix().cols());
  for (const auto& [w, s] : parts) rho += w * s.matrix();
  return {std::move(rho), parts.front().second.layout()};
}

/// Controlled shield unitary on (A, B, A', B').
///   key_dim blocks:  1_A ⊗ Σᵢ |i⟩⟨i|_B ⊗ U⁽ⁱ⁾
///   key_dim² blocks: Σᵢⱼ |ij⟩⟨ij|_AB ⊗ U⁽ⁱʲ⁾
/// Only the first form commutes with channels acting on A.
inline Matrix twisting_unitary(std::size_t key_dim, const std::vector<Matrix>& shield_unitaries) {
  if (shield_unitaries.empty()) throw std::invalid_argument("twisting: no shield unitaries");
  const auto ds = shield_unitaries.front().rows();
  for (const auto& u : shield_unitaries) {
    if (u.rows() != ds || !is_unitary(u)) throw std::domain_error("twisting: block is not unitary");
  }
  const auto dk = static_cast<Eigen::Index>(key_dim);
  Matrix out = Matrix::Zero(dk * dk * ds, dk * dk * ds);
  if (shield_unitaries.size() == key_dim) {
    for (Eigen::Index a = 0; a < dk; ++a) {
      for (Eigen::Index b = 0; b < dk; ++b) {
        out.block((a * dk + b) * ds, (a * dk + b) * ds, ds, ds) =
            shield_unitaries[static_cast<std::size_t>(b)];
      }
    }
  } else if (shield_unitaries.size() == key_dim * key_dim) {
    for (Eigen::Index ab = 0; ab < dk * dk; ++ab) {
      out.block(ab * ds, ab * ds, ds, ds) = shield_unitaries[static_cast<std::size_t>(ab)];
    }
  } else {
    throw std::invalid_argument("twisting: need key_dim or key_dim^2 shield unitaries");
  }
  return out;
}

inline Matrix swap_unitary() {
  Matrix s = Matrix::Zero(4, 4);
  s(0, 0) = s(1, 2) = s(2, 1) = s(3, 3) = 1.0;
  return s;
}

/// Qubit unitary taking |0⟩,|1⟩ onto the measurement directions ±n̂(θ, φ);
/// equal to the identity at (0, 0).
inline Matrix alice_rotation(double theta, double phi) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  const cplx ph = std::polar(1.0, phi);
  Matrix u(2, 2);
  u << c, -s, ph * s, ph * c;
  return u;
}

inline QuantumState rotate_alice_key(const QuantumState& s, double theta, double phi) {
  if (s.layout().dim_of("A") != 2) throw std::invalid_argument("rotate_alice_key: A is not a qubit");
  return apply_unitary_on(s, "A", alice_rotation(theta, phi));
}

inline Matrix diagonal_phase_unitary(std::span<const double> phases) {
  const auto n = static_cast<Eigen::Index>(phases.size());
  Matrix u = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) u(i, i) = std::polar(1.0, phases[static_cast<std::size_t>(i)]);
  return u;
}

}  // namespace pkr
