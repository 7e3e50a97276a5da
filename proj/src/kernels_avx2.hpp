#pragma once

#include <cstddef>

// Raw entry points of the AVX2 translation unit. Complex arrays are passed as
// interleaved doubles.
namespace qsd::kernels::detail {

void band_matvec_avx2(const double* a, std::size_t n, std::size_t lower,
                      std::size_t upper, const double* x, double* y);
void cdot_avx2(const double* x, const double* y, std::size_t n, double& re,
               double& im);
void axpy_avx2(double ar, double ai, const double* x, double* y,
               std::size_t n);
double norm2_avx2(const double* x, std::size_t n);

}  // namespace qsd::kernels::detail
