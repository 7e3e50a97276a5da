#include "qsd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsd/error.hpp"
#include "qsd/kernels.hpp"

namespace qsd {

namespace {

void require_dim(std::size_t dim) {
  if (dim < 2) {
    throw Error(ErrorKind::InvalidDimension,
                "dimension must be >= 2, got " + std::to_string(dim));
  }
}

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": dimension " + std::to_string(a) +
                    " does not match " + std::to_string(b));
  }
}

// ---------------------------------------------------------------- StateVector

StateVector::StateVector(CVector amplitudes) : amp_(std::move(amplitudes)) {
  require_dim(dim());
  const double n = amp_.norm();
  if (!std::isfinite(n) || n == 0.0) {
    throw Error(ErrorKind::Contract, "state vector has zero or non-finite norm");
  }
  amp_ /= n;
}

StateVector StateVector::basis(std::size_t dim, std::size_t level) {
  require_dim(dim);
  if (level >= dim) {
    throw Error(ErrorKind::Contract, "basis level " + std::to_string(level) +
                                         " out of range for dim " +
                                         std::to_string(dim));
  }
  CVector v = CVector::Zero(Eigen::Index(dim));
  v[Eigen::Index(level)] = 1.0;
  return StateVector(std::move(v));
}

StateVector StateVector::coherent(std::size_t dim, Complex alpha) {
  require_dim(dim);
  CVector v(static_cast<Eigen::Index>(dim));
  v[0] = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t n = 1; n < dim; ++n) {
    v[Eigen::Index(n)] =
        v[Eigen::Index(n - 1)] * alpha / std::sqrt(static_cast<double>(n));
  }
  return StateVector(std::move(v));
}

StateVector StateVector::superposition(std::size_t dim,
                                       std::span<const std::size_t> levels) {
  require_dim(dim);
  CVector v = CVector::Zero(Eigen::Index(dim));
  for (std::size_t k : levels) {
    if (k >= dim) {
      throw Error(ErrorKind::Contract, "superposition level out of range");
    }
    v[Eigen::Index(k)] = 1.0;
  }
  return StateVector(std::move(v));
}

// ------------------------------------------------------------- OperatorMatrix

OperatorMatrix::OperatorMatrix(CMatrix entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "operator matrix must be square");
  }
  if (m_.rows() < 1) {
    throw Error(ErrorKind::InvalidDimension, "operator matrix is empty");
  }
  const Eigen::Index n = m_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (m_(i, j) != Complex{}) {
        if (i > j) lower_ = std::max(lower_, std::size_t(i - j));
        if (j > i) upper_ = std::max(upper_, std::size_t(j - i));
      }
    }
  }
  const double scale = std::max(1.0, max_abs(m_));
  hermitian_ = max_abs(m_ - m_.adjoint()) <= 1e-12 * scale;
}

OperatorMatrix OperatorMatrix::identity(std::size_t dim) {
  return OperatorMatrix(CMatrix::Identity(Eigen::Index(dim), Eigen::Index(dim)));
}

bool OperatorMatrix::is_banded() const noexcept {
  return 4 * (lower_ + upper_ + 1) <= dim();
}

OperatorMatrix OperatorMatrix::adjoint() const {
  return OperatorMatrix(CMatrix(m_.adjoint()));
}

OperatorMatrix operator+(const OperatorMatrix& x, const OperatorMatrix& y) {
  require_same_dim(x.dim(), y.dim(), "operator sum");
  return OperatorMatrix(CMatrix(x.m_ + y.m_));
}

OperatorMatrix operator-(const OperatorMatrix& x, const OperatorMatrix& y) {
  require_same_dim(x.dim(), y.dim(), "operator difference");
  return OperatorMatrix(CMatrix(x.m_ - y.m_));
}

OperatorMatrix operator*(const OperatorMatrix& x, const OperatorMatrix& y) {
  require_same_dim(x.dim(), y.dim(), "operator product");
  return OperatorMatrix(CMatrix(x.m_ * y.m_));
}

OperatorMatrix operator*(Complex c, const OperatorMatrix& x) {
  return OperatorMatrix(CMatrix(c * x.m_));
}

// -------------------------------------------------------------- DensityMatrix

DensityMatrix::DensityMatrix(CMatrix entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw Error(ErrorKind::DimensionMismatch, "density matrix must be square");
  }
}

Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m) {
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

DensityReport check_density(const DensityMatrix& rho,
                            const DensityTolerance& tol) {
  DensityReport r;
  const CMatrix& m = rho.entries();
  r.hermiticity_error = max_abs(m - m.adjoint());
  r.trace_error = std::abs(rho.trace() - Complex(1.0));
  r.min_eigenvalue = hermitian_eigenvalues(m).minCoeff();
  r.ok = r.hermiticity_error <= tol.hermiticity && r.trace_error <= tol.trace &&
         r.min_eigenvalue >= tol.min_eigenvalue;
  return r;
}

// -------------------------------------------------------------- Fock algebra

OperatorMatrix fock_annihilation(std::size_t dim) {
  require_dim(dim);
  CMatrix m = CMatrix::Zero(Eigen::Index(dim), Eigen::Index(dim));
  for (std::size_t k = 0; k + 1 < dim; ++k) {
    m(Eigen::Index(k), Eigen::Index(k + 1)) = std::sqrt(double(k + 1));
  }
  return OperatorMatrix(std::move(m));
}

OperatorMatrix fock_creation(std::size_t dim) {
  return fock_annihilation(dim).adjoint();
}

OperatorMatrix fock_number(std::size_t dim) {
  require_dim(dim);
  CMatrix m = CMatrix::Zero(Eigen::Index(dim), Eigen::Index(dim));
  for (std::size_t k = 0; k < dim; ++k) m(Eigen::Index(k), Eigen::Index(k)) = double(k);
  return OperatorMatrix(std::move(m));
}

OperatorMatrix position(std::size_t dim) {
  const CMatrix a = fock_annihilation(dim).entries();
  return OperatorMatrix(CMatrix((a + a.adjoint()) / std::sqrt(2.0)));
}

OperatorMatrix momentum(std::size_t dim) {
  const CMatrix a = fock_annihilation(dim).entries();
  return OperatorMatrix(
      CMatrix((a - a.adjoint()) / Complex(0.0, std::sqrt(2.0))));
}

OperatorMatrix parity(std::size_t dim) {
  require_dim(dim);
  CMatrix m = CMatrix::Zero(Eigen::Index(dim), Eigen::Index(dim));
  for (std::size_t k = 0; k < dim; ++k) {
    m(Eigen::Index(k), Eigen::Index(k)) = (k % 2 == 0) ? 1.0 : -1.0;
  }
  return OperatorMatrix(std::move(m));
}

// ---------------------------------------------------------------- state ops

void apply(const OperatorMatrix& op, std::span<const Complex> x,
           std::span<Complex> y) {
  require_same_dim(op.dim(), x.size(), "apply");
  require_same_dim(op.dim(), y.size(), "apply");
  kernels::active().band_matvec(op.entries().data(), op.dim(),
                                op.lower_bandwidth(), op.upper_bandwidth(),
                                x.data(), y.data());
}

CVector apply(const OperatorMatrix& op, const StateVector& psi) {
  require_same_dim(op.dim(), psi.dim(), "apply");
  CVector out(Eigen::Index(psi.dim()));
  apply(op, psi.span(), {out.data(), psi.dim()});
  return out;
}

Complex expectation(const OperatorMatrix& op, const StateVector& psi) {
  const CVector y = apply(op, psi);
  Complex e = kernels::active().cdot(psi.amplitudes().data(), y.data(), psi.dim());
  if (op.hermitian_hint()) e = {e.real(), 0.0};
  return e;
}

double variance(const OperatorMatrix& op, const StateVector& psi) {
  if (!op.hermitian_hint()) {
    throw Error(ErrorKind::Contract, "variance requires a hermitian operator");
  }
  const CVector y = apply(op, psi);
  const auto& k = kernels::active();
  const double mean = k.cdot(psi.amplitudes().data(), y.data(), psi.dim()).real();
  return k.norm2(y.data(), psi.dim()) - mean * mean;
}

double projector_fidelity(const StateVector& psi, std::size_t k) {
  if (k >= psi.dim()) {
    throw Error(ErrorKind::Contract, "projector index " + std::to_string(k) +
                                         " out of range");
  }
  return std::norm(psi[k]);
}

DensityMatrix pure_density(const StateVector& psi) {
  const CVector& v = psi.amplitudes();
  return DensityMatrix(CMatrix(v * v.adjoint()));
}

double top_level_leak(const StateVector& psi, std::size_t levels) {
  const std::size_t n = psi.dim();
  const std::size_t first = n > levels ? n - levels : 0;
  double s = 0.0;
  for (std::size_t k = first; k < n; ++k) s += std::norm(psi[k]);
  return std::min(1.0, s);
}

PositionEigenbasis position_eigenbasis(std::size_t dim) {
  const Eigen::MatrixXd q = position(dim).entries().real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q);
  PositionEigenbasis out;
  out.transform = solver.eigenvectors().cast<Complex>();
  const Eigen::VectorXd& ev = solver.eigenvalues();
  out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  return out;
}

}  // namespace qsd
