// Qubit noise channels in Kraus form, acting on one labelled subsystem.

#pragma once

#include "pkr/qcore.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace pkr {

namespace pauli {

inline Matrix identity() { return Matrix::Identity(2, 2); }

inline Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix y() {
  Matrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

inline Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace pauli

class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Matrix> operators) : ops_(std::move(operators)) {
    if (ops_.empty()) throw std::invalid_argument("Kraus channel needs at least one operator");
    const auto d = ops_.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& k : ops_) {
      if (k.rows() != d || k.cols() != d) {
        throw std::invalid_argument("Kraus operators must share one square shape");
      }
      sum += k.adjoint() * k;
    }
    if (detail::max_abs(sum - Matrix::Identity(d, d)) > tol::unitary) {
      throw std::domain_error("Kraus operators are not trace preserving");
    }
  }

  static KrausChannel identity(std::size_t dim = 2) {
    const auto d = static_cast<Eigen::Index>(dim);
    return KrausChannel({Matrix::Identity(d, d)});
  }

  [[nodiscard]] const std::vector<Matrix>& operators() const { return ops_; }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(ops_.front().rows()); }

  /// Σ K ρ K† on a bare single-system matrix.
  [[nodiscard]] Matrix operator()(const Matrix& rho) const {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& k : ops_) out += k * rho * k.adjoint();
    return out;
  }

 private:
  std::vector<Matrix> ops_;
};

/// Probabilities for {I, σx, σy, σz}; acting on A of psi_+ they weight
/// psi_+, phi_+, phi_−, psi_− in that order.
struct PauliParams {
  double p1 = 1.0;
  double p2 = 0.0;
  double p3 = 0.0;
  double p4 = 0.0;

  [[nodiscard]] std::array<double, 4> as_array() const { return {p1, p2, p3, p4}; }

  void validate() const {
    for (double p : as_array()) {
      if (!(p >= 0.0)) throw std::invalid_argument("Pauli probabilities must be non-negative");
    }
    if (std::abs(p1 + p2 + p3 + p4 - 1.0) > tol::trace) {
      throw std::invalid_argument("Pauli probabilities must sum to 1");
    }
  }
};

struct TrigParams {
  double u = 0.0;
  double v = 0.0;
};

namespace detail {
inline void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": p must lie in [0, 1]");
  }
}
}  // namespace detail

inline KrausChannel pauli_channel(const PauliParams& params) {
  params.validate();
  return KrausChannel({std::sqrt(params.p1) * pauli::identity(), std::sqrt(params.p2) * pauli::x(),
                       std::sqrt(params.p3) * pauli::y(), std::sqrt(params.p4) * pauli::z()});
}

/// ρ ↦ p I/2 + (1 − p) ρ as a Pauli channel.
inline KrausChannel depolarizing(double p) {
  detail::require_probability(p, "depolarizing");
  const double q = p / 4.0;
  return pauli_channel({1.0 - 3.0 * q, q, q, q});
}

/// ρ ↦ p ρ + (1 − p) σz ρ σz.
inline KrausChannel phase_flip(double p) {
  detail::require_probability(p, "phase_flip");
  return KrausChannel({std::sqrt(p) * pauli::identity(), std::sqrt(1.0 - p) * pauli::z()});
}

/// Bloch map r ↦ (cos u r_x, cos v r_y, cos u cos v r_z + sin u sin v).
/// With L₁ = cos(u/2)cos(v/2) I + sin(u/2)sin(v/2) σz and
/// L₂ = cos(u/2)sin(v/2) σx − i sin(u/2)cos(v/2) σy the map is Σ L†ρL,
/// so the stored Kraus operators are L₁† and L₂†.
inline KrausChannel trig_channel(const TrigParams& params) {
  const double cu = std::cos(params.u / 2);
  const double su = std::sin(params.u / 2);
  const double cv = std::cos(params.v / 2);
  const double sv = std::sin(params.v / 2);
  const Matrix l1 = (cu * cv) * pauli::identity() + (su * sv) * pauli::z();
  const Matrix l2 = (cu * sv) * pauli::x() - cplx(0, su * cv) * pauli::y();
  return KrausChannel({l1.adjoint(), l2.adjoint()});
}

inline QuantumState apply_channel(const QuantumState& s, const std::string& label,
                                  const KrausChannel& ch) {
  if (s.layout().dim_of(label) != ch.dim()) {
    throw std::invalid_argument("channel dimension does not match subsystem '" + label + "'");
  }
  Matrix out = Matrix::Zero(s.matrix().rows(), s.matrix().cols());
  for (const auto& k : ch.operators()) {
    const Matrix full = embed_operator(s.layout(), label, k);
    out += full * s.matrix() * full.adjoint();
  }
  out = 0.5 * (out + out.adjoint());
  return {std::move(out), s.layout()};
}

using BlochVector = std::array<double, 3>;

inline BlochVector bloch_vector(const QuantumState& s) {
  if (s.dim() != 2) throw std::invalid_argument("bloch_vector needs a single-qubit state");
  const Matrix& m = s.matrix();
  return {(m * pauli::x()).trace().real(), (m * pauli::y()).trace().real(),
          (m * pauli::z()).trace().real()};
}

inline QuantumState bloch_to_state(const BlochVector& r, const std::string& label = "A") {
  const double len = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
  if (len > 1.0 + 1e-10) throw std::domain_error("Bloch vector longer than 1");
  Matrix rho = 0.5 * (pauli::identity() + r[0] * pauli::x() + r[1] * pauli::y() + r[2] * pauli::z());
  return {std::move(rho), SubsystemLayout{{label, 2}}};
}

}  // namespace pkr
