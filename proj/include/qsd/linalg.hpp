#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

// Truncated Fock-space states and operators. Units are hbar = 1 and the
// quadratures follow q = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)).

namespace qsd {

using Complex = std::complex<double>;
using CMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::VectorXcd;

/// Normalized amplitude vector, dim >= 2.
class StateVector {
 public:
  /// Normalizes `amplitudes`. Throws on dim < 2 or a zero/non-finite norm.
  explicit StateVector(CVector amplitudes);

  static StateVector basis(std::size_t dim, std::size_t level);
  /// Truncated coherent state e^{-|alpha|^2/2} alpha^n / sqrt(n!), renormalized.
  static StateVector coherent(std::size_t dim, Complex alpha);
  /// Equal-amplitude superposition of the given basis levels.
  static StateVector superposition(std::size_t dim,
                                   std::span<const std::size_t> levels);

  std::size_t dim() const noexcept {
    return static_cast<std::size_t>(amp_.size());
  }
  const CVector& amplitudes() const noexcept { return amp_; }
  Complex operator[](std::size_t k) const { return amp_[Eigen::Index(k)]; }
  std::span<const Complex> span() const noexcept {
    return {amp_.data(), dim()};
  }

 private:
  CVector amp_;
};

/// Dense square operator. The hermitian hint is detected on construction.
class OperatorMatrix {
 public:
  explicit OperatorMatrix(CMatrix entries);

  static OperatorMatrix identity(std::size_t dim);

  std::size_t dim() const noexcept {
    return static_cast<std::size_t>(m_.rows());
  }
  const CMatrix& entries() const noexcept { return m_; }
  bool hermitian_hint() const noexcept { return hermitian_; }

  /// Largest i - j (resp. j - i) with a nonzero entry.
  std::size_t lower_bandwidth() const noexcept { return lower_; }
  std::size_t upper_bandwidth() const noexcept { return upper_; }
  bool is_banded() const noexcept;

  OperatorMatrix adjoint() const;
  /// True when some entry below the diagonal is nonzero, i.e. the operator
  /// can move weight to higher Fock levels.
  bool has_raising_part() const noexcept { return lower_ > 0; }

  friend OperatorMatrix operator+(const OperatorMatrix& x,
                                  const OperatorMatrix& y);
  friend OperatorMatrix operator-(const OperatorMatrix& x,
                                  const OperatorMatrix& y);
  friend OperatorMatrix operator*(const OperatorMatrix& x,
                                  const OperatorMatrix& y);
  friend OperatorMatrix operator*(Complex c, const OperatorMatrix& x);

 private:
  CMatrix m_;
  bool hermitian_ = false;
  std::size_t lower_ = 0;
  std::size_t upper_ = 0;
};

/// Hermitian trace-one matrix. Construction does not validate; see
/// check_density.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix entries);

  std::size_t dim() const noexcept {
    return static_cast<std::size_t>(m_.rows());
  }
  const CMatrix& entries() const noexcept { return m_; }
  Complex trace() const { return m_.trace(); }

 private:
  CMatrix m_;
};

struct DensityTolerance {
  double hermiticity = 1e-10;
  double trace = 1e-8;
  double min_eigenvalue = -1e-8;
};

struct DensityReport {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  bool ok = false;
};

DensityReport check_density(const DensityMatrix& rho,
                            const DensityTolerance& tol = {});

OperatorMatrix fock_annihilation(std::size_t dim);
OperatorMatrix fock_creation(std::size_t dim);
OperatorMatrix fock_number(std::size_t dim);
OperatorMatrix position(std::size_t dim);
OperatorMatrix momentum(std::size_t dim);
/// Diagonal (-1)^n.
OperatorMatrix parity(std::size_t dim);

/// Matrix-vector product through the active kernel table.
CVector apply(const OperatorMatrix& op, const StateVector& psi);
void apply(const OperatorMatrix& op, std::span<const Complex> x,
           std::span<Complex> y);

Complex expectation(const OperatorMatrix& op, const StateVector& psi);
/// <op^2> - <op>^2 for hermitian op; throws Contract otherwise.
double variance(const OperatorMatrix& op, const StateVector& psi);
/// |<k|psi>|^2
double projector_fidelity(const StateVector& psi, std::size_t k);
DensityMatrix pure_density(const StateVector& psi);

/// Probability in the top `levels` basis states.
double top_level_leak(const StateVector& psi, std::size_t levels = 5);

struct PositionEigenbasis {
  CMatrix transform;                 // columns are eigenvectors
  std::vector<double> eigenvalues;   // ascending
};

PositionEigenbasis position_eigenbasis(std::size_t dim);

/// Eigenvalues of a Hermitian matrix, ascending.
Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m);

void require_same_dim(std::size_t a, std::size_t b, const char* what);

}  // namespace qsd
