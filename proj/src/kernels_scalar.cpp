#include "qsd/kernels.hpp"

#include <algorithm>

namespace qsd::kernels {
namespace {

void band_matvec(const Complex* a, std::size_t n, std::size_t lower,
                 std::size_t upper, const Complex* x, Complex* y) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i > lower ? i - lower : 0;
    const std::size_t j1 = std::min(n, i + upper + 1);
    const Complex* row = a + i * n;
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = j0; j < j1; ++j) {
      re += row[j].real() * x[j].real() - row[j].imag() * x[j].imag();
      im += row[j].real() * x[j].imag() + row[j].imag() * x[j].real();
    }
    y[i] = {re, im};
  }
}

Complex cdot(const Complex* x, const Complex* y, std::size_t n) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

void axpy(Complex alpha, const Complex* x, Complex* y, std::size_t n) {
  const double ar = alpha.real();
  const double ai = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real();
    const double xi = x[i].imag();
    y[i] = {y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr};
  }
}

double norm2(const Complex* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  }
  return s;
}

constexpr Table kScalar{"scalar", &band_matvec, &cdot, &axpy, &norm2};

}  // namespace

const Table& scalar() noexcept { return kScalar; }

}  // namespace qsd::kernels
