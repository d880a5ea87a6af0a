// Dense density-matrix primitives for small multipartite systems.
//
// Index convention: row-major over the layout, first label most significant.
// Every partial trace, embedding and purification in the library follows it.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pkr {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double psd = 1e-10;
inline constexpr double norm = 1e-12;
inline constexpr double unitary = 1e-10;
inline constexpr double orthonormal = 1e-10;
inline constexpr double rank = 1e-12;
}  // namespace tol

struct Subsystem {
  std::string label;
  std::size_t dim = 1;

  bool operator==(const Subsystem&) const = default;
};

class SubsystemLayout {
 public:
  SubsystemLayout() = default;
  SubsystemLayout(std::initializer_list<Subsystem> parts)
      : SubsystemLayout(std::vector<Subsystem>(parts)) {}
  explicit SubsystemLayout(std::vector<Subsystem> parts) : parts_(std::move(parts)) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i].dim < 1) {
        throw std::invalid_argument("subsystem '" + parts_[i].label + "' has zero dimension");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (parts_[j].label == parts_[i].label) {
          throw std::invalid_argument("duplicate subsystem label '" + parts_[i].label + "'");
        }
      }
    }
  }

  [[nodiscard]] const std::vector<Subsystem>& parts() const { return parts_; }
  [[nodiscard]] std::size_t size() const { return parts_.size(); }

  [[nodiscard]] std::size_t total_dim() const {
    std::size_t d = 1;
    for (const auto& p : parts_) d *= p.dim;
    return d;
  }

  [[nodiscard]] bool contains(const std::string& label) const {
    return std::any_of(parts_.begin(), parts_.end(),
                       [&](const Subsystem& p) { return p.label == label; });
  }

  [[nodiscard]] std::size_t index_of(const std::string& label) const {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i].label == label) return i;
    }
    throw std::invalid_argument("unknown subsystem label '" + label + "'");
  }

  [[nodiscard]] std::size_t dim_of(const std::string& label) const {
    return parts_[index_of(label)].dim;
  }

  [[nodiscard]] std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(parts_.size());
    for (const auto& p : parts_) out.push_back(p.label);
    return out;
  }

  [[nodiscard]] SubsystemLayout concat(const SubsystemLayout& other) const {
    auto parts = parts_;
    parts.insert(parts.end(), other.parts_.begin(), other.parts_.end());
    return SubsystemLayout(std::move(parts));
  }

  // Layout restricted to the labels not in `discard`, original order kept.
  [[nodiscard]] SubsystemLayout without(std::span<const std::string> discard) const {
    std::vector<Subsystem> kept;
    for (const auto& p : parts_) {
      if (std::find(discard.begin(), discard.end(), p.label) == discard.end()) kept.push_back(p);
    }
    return SubsystemLayout(std::move(kept));
  }

  bool operator==(const SubsystemLayout&) const = default;

 private:
  std::vector<Subsystem> parts_;
};

namespace detail {

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const Matrix& m) {
  return max_abs(m - m.adjoint());
}

// Flat offsets of the sub-index spaces spanned by `selected` positions
// (in the order given) inside the full row-major index space.
inline std::vector<std::size_t> sub_offsets(const SubsystemLayout& layout,
                                            const std::vector<std::size_t>& selected) {
  const auto& parts = layout.parts();
  std::vector<std::size_t> strides(parts.size(), 1);
  for (std::size_t i = parts.size(); i-- > 1;) strides[i - 1] = strides[i] * parts[i].dim;

  std::size_t count = 1;
  for (auto s : selected) count *= parts[s].dim;
  std::vector<std::size_t> offsets(count, 0);
  for (std::size_t flat = 0; flat < count; ++flat) {
    std::size_t rem = flat;
    std::size_t off = 0;
    for (std::size_t k = selected.size(); k-- > 0;) {
      const std::size_t d = parts[selected[k]].dim;
      off += (rem % d) * strides[selected[k]];
      rem /= d;
    }
    offsets[flat] = off;
  }
  return offsets;
}

inline std::vector<std::size_t> positions_of(const SubsystemLayout& layout,
                                             std::span<const std::string> labels) {
  std::vector<std::size_t> pos;
  pos.reserve(labels.size());
  for (const auto& l : labels) {
    const auto p = layout.index_of(l);
    if (std::find(pos.begin(), pos.end(), p) != pos.end()) {
      throw std::invalid_argument("label '" + l + "' listed twice");
    }
    pos.push_back(p);
  }
  return pos;
}

inline std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& pos) {
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::find(pos.begin(), pos.end(), i) == pos.end()) rest.push_back(i);
  }
  return rest;
}

}  // namespace detail

/// Density matrix tagged with its tensor-factor layout. Construction validates
/// Hermiticity, unit trace and positivity at the library tolerances.
class QuantumState {
 public:
  QuantumState(Matrix matrix, SubsystemLayout layout)
      : matrix_(std::move(matrix)), layout_(std::move(layout)) {
    validate();
  }

  [[nodiscard]] const Matrix& matrix() const { return matrix_; }
  [[nodiscard]] const SubsystemLayout& layout() const { return layout_; }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

 private:
  void validate() const {
    const auto n = layout_.total_dim();
    if (matrix_.rows() != static_cast<Eigen::Index>(n) || matrix_.cols() != matrix_.rows()) {
      throw std::invalid_argument("state matrix is " + std::to_string(matrix_.rows()) + "x" +
                                  std::to_string(matrix_.cols()) + ", layout needs " +
                                  std::to_string(n));
    }
    if (detail::hermiticity_defect(matrix_) > tol::hermitian) {
      throw std::domain_error("state matrix is not Hermitian");
    }
    const cplx tr = matrix_.trace();
    if (std::abs(tr.real() - 1.0) > tol::trace || std::abs(tr.imag()) > tol::trace) {
      throw std::domain_error("state trace is " + std::to_string(tr.real()) + ", expected 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol::psd) {
      throw std::domain_error("state has a negative eigenvalue " +
                              std::to_string(es.eigenvalues().minCoeff()));
    }
  }

  Matrix matrix_;
  SubsystemLayout layout_;
};

class PureStateVector {
 public:
  PureStateVector(Vector amplitudes, SubsystemLayout layout)
      : amplitudes_(std::move(amplitudes)), layout_(std::move(layout)) {
    if (amplitudes_.size() != static_cast<Eigen::Index>(layout_.total_dim())) {
      throw std::invalid_argument("amplitude vector does not match layout dimension");
    }
    if (std::abs(amplitudes_.squaredNorm() - 1.0) > tol::norm) {
      throw std::domain_error("state vector is not normalized");
    }
  }

  [[nodiscard]] const Vector& amplitudes() const { return amplitudes_; }
  [[nodiscard]] const SubsystemLayout& layout() const { return layout_; }

  [[nodiscard]] QuantumState density() const {
    return {amplitudes_ * amplitudes_.adjoint(), layout_};
  }

 private:
  Vector amplitudes_;
  SubsystemLayout layout_;
};

// ---------------------------------------------------------------------------
// Matrix-level helpers

inline Matrix tensor_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Vector tensor_product(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline QuantumState tensor_product(const QuantumState& a, const QuantumState& b) {
  return {tensor_product(a.matrix(), b.matrix()), a.layout().concat(b.layout())};
}

inline Matrix projector(const Vector& v) { return v * v.adjoint(); }

inline bool is_unitary(const Matrix& u, double tolerance = tol::unitary) {
  if (u.rows() != u.cols()) return false;
  const Matrix id = Matrix::Identity(u.rows(), u.cols());
  return detail::max_abs(u * u.adjoint() - id) <= tolerance;
}

/// Full-space operator acting as `op` on the listed factors (tensor order as
/// listed) and as identity elsewhere.
inline Matrix embed_operator(const SubsystemLayout& layout, std::span<const std::string> labels,
                             const Matrix& op) {
  const auto pos = detail::positions_of(layout, labels);
  std::size_t sub = 1;
  for (auto p : pos) sub *= layout.parts()[p].dim;
  if (op.rows() != static_cast<Eigen::Index>(sub) || op.cols() != op.rows()) {
    throw std::invalid_argument("operator dimension " + std::to_string(op.rows()) +
                                " does not match targeted factor dimension " +
                                std::to_string(sub));
  }
  // Contiguous targets embed as a Kronecker product.
  bool contiguous = true;
  for (std::size_t k = 1; k < pos.size(); ++k) contiguous = contiguous && pos[k] == pos[k - 1] + 1;
  if (contiguous && !pos.empty()) {
    std::size_t before = 1;
    std::size_t after = 1;
    for (std::size_t i = 0; i < pos.front(); ++i) before *= layout.parts()[i].dim;
    for (std::size_t i = pos.back() + 1; i < layout.size(); ++i) after *= layout.parts()[i].dim;
    const auto nb = static_cast<Eigen::Index>(before);
    const auto na = static_cast<Eigen::Index>(after);
    return tensor_product(tensor_product(Matrix::Identity(nb, nb), op), Matrix::Identity(na, na));
  }
  const auto target = detail::sub_offsets(layout, pos);
  const auto rest = detail::sub_offsets(layout, detail::complement(layout.size(), pos));
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  Matrix full = Matrix::Zero(n, n);
  for (std::size_t r = 0; r < rest.size(); ++r) {
    for (std::size_t i = 0; i < target.size(); ++i) {
      for (std::size_t j = 0; j < target.size(); ++j) {
        full(static_cast<Eigen::Index>(rest[r] + target[i]),
             static_cast<Eigen::Index>(rest[r] + target[j])) =
            op(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return full;
}

inline Matrix embed_operator(const SubsystemLayout& layout, const std::string& label,
                             const Matrix& op) {
  const std::string labels[] = {label};
  return embed_operator(layout, labels, op);
}

// ---------------------------------------------------------------------------
// Reductions

inline Matrix partial_trace(const Matrix& rho, const SubsystemLayout& layout,
                            std::span<const std::string> discard) {
  const auto drop = detail::positions_of(layout, discard);
  const auto keep = detail::complement(layout.size(), drop);
  const auto k_off = detail::sub_offsets(layout, keep);
  const auto t_off = detail::sub_offsets(layout, drop);
  const auto nk = static_cast<Eigen::Index>(k_off.size());
  Matrix out = Matrix::Zero(nk, nk);
  for (Eigen::Index i = 0; i < nk; ++i) {
    for (Eigen::Index j = 0; j < nk; ++j) {
      cplx acc = 0.0;
      for (auto t : t_off) {
        acc += rho(static_cast<Eigen::Index>(k_off[i] + t), static_cast<Eigen::Index>(k_off[j] + t));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

inline QuantumState partial_trace(const QuantumState& s, std::span<const std::string> discard) {
  Matrix reduced = partial_trace(s.matrix(), s.layout(), discard);
  reduced = 0.5 * (reduced + reduced.adjoint());
  return {std::move(reduced), s.layout().without(discard)};
}

inline QuantumState partial_trace(const QuantumState& s,
                                  std::initializer_list<std::string> discard) {
  const std::vector<std::string> d(discard);
  return partial_trace(s, d);
}

/// Reduced density matrix of a pure vector on the `keep` factors, in the
/// order listed. Computed as M M† with M the kept×traced reshaping.
inline Matrix reduced_density(const Vector& psi, const SubsystemLayout& layout,
                              std::span<const std::string> keep) {
  const auto kp = detail::positions_of(layout, keep);
  const auto k_off = detail::sub_offsets(layout, kp);
  const auto t_off = detail::sub_offsets(layout, detail::complement(layout.size(), kp));
  Matrix m(static_cast<Eigen::Index>(k_off.size()), static_cast<Eigen::Index>(t_off.size()));
  for (std::size_t i = 0; i < k_off.size(); ++i) {
    for (std::size_t t = 0; t < t_off.size(); ++t) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) =
          psi(static_cast<Eigen::Index>(k_off[i] + t_off[t]));
    }
  }
  Matrix rho = m * m.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

// ---------------------------------------------------------------------------
// Spectra and entropies

inline std::vector<double> eigenvalues_hermitian(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues of a non-square matrix");
  const double scale = std::max(1.0, detail::max_abs(m));
  if (detail::hermiticity_defect(m) > 1e-10 * scale) {
    throw std::domain_error("eigenvalues_hermitian: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

/// −Σ p log₂ p over a probability spectrum. Entries in [−1e−10, 0) count as
/// zero; anything more negative is a construction error.
inline double shannon_entropy_bits(std::span<const double> spectrum) {
  double h = 0.0;
  for (double p : spectrum) {
    if (p < -tol::psd) {
      throw std::domain_error("negative eigenvalue " + std::to_string(p) + " in entropy");
    }
    const double q = std::clamp(p, 0.0, 1.0);
    if (q > 0.0) h -= q * std::log2(q);
  }
  return h;
}

inline double entropy_bits(const Matrix& rho) {
  const auto ev = eigenvalues_hermitian(rho);
  return shannon_entropy_bits(ev);
}

inline double von_neumann_entropy(const QuantumState& s) { return entropy_bits(s.matrix()); }

/// I(X:Y) = S(X) + S(Y) − S(XY) for a bipartite matrix with factor dims dx, dy.
inline double mutual_information(const Matrix& rho_xy, std::size_t dx, std::size_t dy) {
  const SubsystemLayout l{{"X", dx}, {"Y", dy}};
  const std::string x[] = {"X"};
  const std::string y[] = {"Y"};
  return entropy_bits(partial_trace(rho_xy, l, y)) + entropy_bits(partial_trace(rho_xy, l, x)) -
         entropy_bits(rho_xy);
}

inline double mutual_information(const QuantumState& s, std::span<const std::string> part_x,
                                 std::span<const std::string> part_y) {
  for (const auto& x : part_x) {
    if (std::find(part_y.begin(), part_y.end(), x) != part_y.end()) {
      throw std::invalid_argument("mutual_information: partitions overlap on '" + x + "'");
    }
  }
  if (part_x.size() + part_y.size() != s.layout().size()) {
    throw std::invalid_argument("mutual_information: partitions must cover the layout");
  }
  return von_neumann_entropy(partial_trace(s, part_y)) +
         von_neumann_entropy(partial_trace(s, part_x)) - von_neumann_entropy(s);
}

inline double mutual_information(const QuantumState& s, std::initializer_list<std::string> x,
                                 std::initializer_list<std::string> y) {
  const std::vector<std::string> vx(x);
  const std::vector<std::string> vy(y);
  return mutual_information(s, vx, vy);
}

// ---------------------------------------------------------------------------
// Purification, measurement, unitaries

/// Spectral purification Σ √λₖ |vₖ⟩|k⟩_E keeping eigenvalues above 1e−12.
/// The purifying factor is appended last.
inline PureStateVector purify(const QuantumState& s, const std::string& eve_label = "E") {
  if (s.layout().contains(eve_label)) {
    throw std::invalid_argument("purify: layout already has a subsystem '" + eve_label + "'");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.matrix());
  const auto& w = es.eigenvalues();
  const auto& v = es.eigenvectors();
  std::vector<Eigen::Index> support;
  for (Eigen::Index k = w.size(); k-- > 0;) {
    if (w(k) > tol::rank) support.push_back(k);
  }
  const auto rank = static_cast<Eigen::Index>(support.size());
  const auto n = s.matrix().rows();
  Vector psi = Vector::Zero(n * rank);
  for (Eigen::Index e = 0; e < rank; ++e) {
    const double amp = std::sqrt(w(support[static_cast<std::size_t>(e)]));
    for (Eigen::Index i = 0; i < n; ++i) {
      psi(i * rank + e) = amp * v(i, support[static_cast<std::size_t>(e)]);
    }
  }
  psi /= psi.norm();
  return {std::move(psi),
          s.layout().concat(SubsystemLayout{{eve_label, static_cast<std::size_t>(rank)}})};
}

inline void require_orthonormal_basis(std::span<const Vector> basis, std::size_t dim) {
  if (basis.size() != dim) {
    throw std::invalid_argument("basis has " + std::to_string(basis.size()) +
                                " vectors, subsystem dimension is " + std::to_string(dim));
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].size() != static_cast<Eigen::Index>(dim)) {
      throw std::invalid_argument("basis vector has wrong length");
    }
    for (std::size_t j = 0; j <= i; ++j) {
      const cplx ip = basis[j].dot(basis[i]);
      const double expect = i == j ? 1.0 : 0.0;
      if (std::abs(ip - expect) > tol::orthonormal) {
        throw std::domain_error("measurement basis is not orthonormal");
      }
    }
  }
}

/// Σₖ (Pₖ⊗I) ρ (Pₖ⊗I) on a raw matrix.
inline Matrix dephase(const Matrix& rho, const SubsystemLayout& layout, const std::string& label,
                      std::span<const Vector> basis) {
  require_orthonormal_basis(basis, layout.dim_of(label));
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& b : basis) {
    const Matrix p = embed_operator(layout, label, projector(b));
    out += p * rho * p;
  }
  return out;
}

inline QuantumState dephase(const QuantumState& s, const std::string& label,
                            std::span<const Vector> basis) {
  Matrix out = dephase(s.matrix(), s.layout(), label, basis);
  out = 0.5 * (out + out.adjoint());
  return {std::move(out), s.layout()};
}

inline QuantumState apply_unitary_on(const QuantumState& s, std::span<const std::string> labels,
                                     const Matrix& u) {
  if (!is_unitary(u)) throw std::domain_error("apply_unitary_on: operator is not unitary");
  const Matrix full = embed_operator(s.layout(), labels, u);
  Matrix out = full * s.matrix() * full.adjoint();
  out = 0.5 * (out + out.adjoint());
  return {std::move(out), s.layout()};
}

inline QuantumState apply_unitary_on(const QuantumState& s, const std::string& label,
                                     const Matrix& u) {
  const std::string labels[] = {label};
  return apply_unitary_on(s, labels, u);
}

}  // namespace pkr
