#include <cstdlib>
#include <string_view>

#include "qsd/kernels.hpp"

#if defined(QSD_HAVE_AVX2)
#include "kernels_avx2.hpp"
#endif

namespace qsd::kernels {
namespace {

#if defined(QSD_HAVE_AVX2)
const double* raw(const Complex* p) { return reinterpret_cast<const double*>(p); }
double* raw(Complex* p) { return reinterpret_cast<double*>(p); }

void band_matvec_v(const Complex* a, std::size_t n, std::size_t lower,
                   std::size_t upper, const Complex* x, Complex* y) {
  detail::band_matvec_avx2(raw(a), n, lower, upper, raw(x), raw(y));
}

Complex cdot_v(const Complex* x, const Complex* y, std::size_t n) {
  double re, im;
  detail::cdot_avx2(raw(x), raw(y), n, re, im);
  return {re, im};
}

void axpy_v(Complex alpha, const Complex* x, Complex* y, std::size_t n) {
  detail::axpy_avx2(alpha.real(), alpha.imag(), raw(x), raw(y), n);
}

double norm2_v(const Complex* x, std::size_t n) {
  return detail::norm2_avx2(raw(x), n);
}

constexpr Table kAvx2{"avx2", &band_matvec_v, &cdot_v, &axpy_v, &norm2_v};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const Table& select() {
  if (const char* env = std::getenv("QSD_KERNELS");
      env != nullptr && std::string_view(env) == "scalar") {
    return scalar();
  }
  if (const Table* t = avx2()) return *t;
  return scalar();
}

}  // namespace

const Table* avx2() noexcept {
#if defined(QSD_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const Table& active() noexcept {
  static const Table& table = select();
  return table;
}

}  // namespace qsd::kernels
