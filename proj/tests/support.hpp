#pragma once

// Reference constructions written independently of the library, used as
// oracles by the tests.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace ref {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat annihilation(int d) {
  Mat a = Mat::Zero(d, d);
  for (int m = 0; m + 1 < d; ++m) a(m, m + 1) = std::sqrt(double(m + 1));
  return a;
}

inline Mat number(int d) {
  Mat n = Mat::Zero(d, d);
  for (int m = 0; m < d; ++m) n(m, m) = double(m);
  return n;
}

inline Mat position(int d) {
  const Mat a = annihilation(d);
  return (a + a.adjoint()) / std::sqrt(2.0);
}

inline Mat momentum(int d) {
  const Mat a = annihilation(d);
  return (a - a.adjoint()) / cd(0.0, std::sqrt(2.0));
}

inline Vec basis(int d, int k) {
  Vec v = Vec::Zero(d);
  v(k) = 1.0;
  return v;
}

/// e^{-|alpha|^2/2} alpha^n / sqrt(n!), computed through logarithms.
inline Vec coherent(int d, cd alpha) {
  Vec v(d);
  for (int n = 0; n < d; ++n) {
    const double logmag = -0.5 * std::norm(alpha) + n * std::log(std::abs(alpha) + 1e-300) -
                          0.5 * std::lgamma(n + 1.0);
    v(n) = std::polar(std::exp(logmag), n * std::arg(alpha));
  }
  return v / v.norm();
}

inline Vec random_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = cd(g(rng), g(rng));
  return v / v.norm();
}

inline Mat random_matrix(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cd(g(rng), g(rng));
  return m;
}

/// Column-stacking Liouvillian of the Lindblad equation:
/// vec(A rho B) = (B^T kron A) vec(rho).
inline Mat liouvillian(const Mat& h, const std::vector<Mat>& ls) {
  const int d = int(h.rows());
  const Mat id = Mat::Identity(d, d);
  auto kron = [](const Mat& x, const Mat& y) {
    Mat out(x.rows() * y.rows(), x.cols() * y.cols());
    for (int i = 0; i < x.rows(); ++i)
      for (int j = 0; j < x.cols(); ++j)
        out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
  };
  Mat s = cd(0, -1) * (kron(id, h) - kron(h.transpose(), id));
  for (const Mat& l : ls) {
    const Mat ldl = l.adjoint() * l;
    s += kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
  }
  return s;
}

/// rho(t) = exp(S t) rho0 through the eigendecomposition of S.
inline Mat evolve(const Mat& s, const Mat& rho0, double t) {
  const int d = int(rho0.rows());
  Eigen::ComplexEigenSolver<Mat> es(s);
  const Mat& v = es.eigenvectors();
  Vec x(d * d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) x(j * d + i) = rho0(i, j);
  Vec c = v.partialPivLu().solve(x);
  for (int k = 0; k < c.size(); ++k) c(k) *= std::exp(es.eigenvalues()(k) * t);
  const Vec y = v * c;
  Mat rho(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) rho(i, j) = y(j * d + i);
  return rho;
}

inline double trace_distance(const Mat& a, const Mat& b) {
  const Mat diff = 0.5 * ((a - b) + (a - b).adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(diff);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace ref
