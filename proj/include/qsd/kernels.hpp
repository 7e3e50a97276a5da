#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Inner loops of the trajectory and master-equation integrators. Every kernel
// has a portable scalar reference and, on x86-64, an AVX2/FMA variant. The
// variant is chosen once per process from CPUID; QSD_KERNELS=scalar forces
// the reference path.

namespace qsd::kernels {

using Complex = std::complex<double>;

struct Table {
  std::string_view name;

  /// y[i] = sum_j A[i][j] x[j] over the band -lower <= j - i <= upper.
  /// A is row-major with leading dimension n.
  void (*band_matvec)(const Complex* a, std::size_t n, std::size_t lower,
                      std::size_t upper, const Complex* x, Complex* y);

  /// sum_i conj(x[i]) y[i]
  Complex (*cdot)(const Complex* x, const Complex* y, std::size_t n);

  /// y += alpha x
  void (*axpy)(Complex alpha, const Complex* x, Complex* y, std::size_t n);

  /// sum_i |x[i]|^2
  double (*norm2)(const Complex* x, std::size_t n);
};

const Table& scalar() noexcept;

/// AVX2/FMA table, or nullptr when the CPU or build lacks it.
const Table* avx2() noexcept;

/// Table selected for this process.
const Table& active() noexcept;

}  // namespace qsd::kernels
