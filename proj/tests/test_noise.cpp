#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "qsd/error.hpp"
#include "qsd/kernels.hpp"
#include "qsd/noise.hpp"

using namespace qsd;

TEST_SUITE("noise") {

TEST_CASE("Philox4x32-10 known answers") {
  using W = std::array<std::uint32_t, 4>;
  using K = std::array<std::uint32_t, 2>;
  CHECK(philox4x32(W{0, 0, 0, 0}, K{0, 0}) == W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32(W{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32(W{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("equal seeds give bitwise-identical sequences") {
  NoiseStream a(99, 3), b(99, 3);
  for (int k = 0; k < 1000; ++k) {
    const double dt = k % 2 ? 1e-3 : 0.25;
    CHECK(a.sample_increments(dt) == b.sample_increments(dt));
  }
  NoiseStream c(100, 3);
  CHECK(NoiseStream(99, 3).sample_increments(0.1) != c.sample_increments(0.1));
}

TEST_CASE("forks are reproducible and independent of the parent's draws") {
  NoiseStream root(7, 2);
  const NoiseStream f1 = root.fork(5);
  root.sample_increments(0.1);
  root.sample_increments(0.1);
  NoiseStream f2 = root.fork(5);
  NoiseStream f1c = f1;
  for (int k = 0; k < 100; ++k) CHECK(f1c.sample_increments(0.01) == f2.sample_increments(0.01));
  NoiseStream g = root.fork(6);
  NoiseStream h = root.fork(5);
  CHECK(g.sample_increments(0.01) != h.sample_increments(0.01));
  CHECK(root.fork(3).substream() == 3);
  CHECK(root.substream() == NoiseStream::kRootSubstream);
}

TEST_CASE("non-positive dt is rejected") {
  NoiseStream s(1, 1);
  for (double dt : {0.0, -1e-3, std::nan("")}) {
    CAPTURE(dt);
    try {
      s.sample_increments(dt);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidStep);
    }
  }
}

TEST_CASE("moment suite at 1e6 samples") {
  const double dt = 2e-3;
  const std::size_t n = 1'000'000;
  const std::size_t channels = 3;
  NoiseStream s(2024, channels);
  std::vector<std::complex<double>> d(channels);
  std::vector<double> mre(channels), mim(channels), vre(channels), vim(channels), sq(channels);
  double cov01 = 0, cov02 = 0, cov12 = 0, pcov = 0;
  for (std::size_t k = 0; k < n; ++k) {
    s.sample_increments(dt, d);
    for (std::size_t c = 0; c < channels; ++c) {
      mre[c] += d[c].real();
      mim[c] += d[c].imag();
      vre[c] += d[c].real() * d[c].real();
      vim[c] += d[c].imag() * d[c].imag();
      sq[c] += (d[c] * d[c]).real();
    }
    cov01 += (std::conj(d[0]) * d[1]).real();
    cov02 += (std::conj(d[0]) * d[2]).real();
    cov12 += (std::conj(d[1]) * d[2]).imag();
    pcov += d[0].real() * d[0].imag();
  }
  const double N = double(n);
  const double mean_se = std::sqrt(dt / 2 / N);
  const double prod_se = dt / 2 / std::sqrt(N);  // sd of a product of independent N(0, dt/2)
  for (std::size_t c = 0; c < channels; ++c) {
    CAPTURE(c);
    CHECK(std::abs(mre[c] / N) <= 4 * mean_se);
    CHECK(std::abs(mim[c] / N) <= 4 * mean_se);
    CHECK(std::abs(vre[c] / N - dt / 2) <= 0.01 * dt / 2);
    CHECK(std::abs(vim[c] / N - dt / 2) <= 0.01 * dt / 2);
    // Re dxi^2 = re^2 - im^2 has sd dt/sqrt(2)
    CHECK(std::abs(sq[c] / N) <= 4 * dt / std::sqrt(2.0) / std::sqrt(N));
  }
  // Re(conj(x) y) for independent channels has sd dt/sqrt(2)
  const double cross_se = dt / std::sqrt(2.0) / std::sqrt(N);
  CHECK(std::abs(cov01 / N) <= 4 * cross_se);
  CHECK(std::abs(cov02 / N) <= 4 * cross_se);
  CHECK(std::abs(cov12 / N) <= 4 * cross_se);
  CHECK(std::abs(pcov / N) <= 4 * prod_se);
}

TEST_CASE("standard normals have unit complex variance") {
  NoiseStream s(31, 1);
  double sum = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) sum += std::norm(s.next_standard());
  CHECK(std::abs(sum / n - 1.0) < 4 / std::sqrt(double(n)));
}

}  // TEST_SUITE("noise")

TEST_SUITE("kernels") {

TEST_CASE("AVX2 kernels match the scalar reference") {
  const kernels::Table* fast = kernels::avx2();
  if (!fast) {
    MESSAGE("no AVX2 variant on this machine");
    return;
  }
  const kernels::Table& ref = kernels::scalar();
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (std::size_t n : {1, 2, 3, 4, 5, 7, 8, 9, 16, 31, 64, 100, 257}) {
    CAPTURE(n);
    std::vector<std::complex<double>> a(n * n), x(n), y(n), y1(n), y2(n);
    for (auto& v : a) v = {g(rng), g(rng)};
    for (auto& v : x) v = {g(rng), g(rng)};
    for (auto& v : y) v = {g(rng), g(rng)};
    for (std::size_t lo : {std::size_t(0), std::size_t(1), std::size_t(3), n - 1}) {
      for (std::size_t up : {std::size_t(0), std::size_t(1), std::size_t(4), n - 1}) {
        const std::size_t l = std::min(lo, n - 1), u = std::min(up, n - 1);
        ref.band_matvec(a.data(), n, l, u, x.data(), y1.data());
        fast->band_matvec(a.data(), n, l, u, x.data(), y2.data());
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-13 * (1 + std::abs(y1[i])));
      }
    }
    const auto d1 = ref.cdot(x.data(), y.data(), n), d2 = fast->cdot(x.data(), y.data(), n);
    CHECK(std::abs(d1 - d2) <= 1e-13 * (1 + std::abs(d1)));
    const double n1 = ref.norm2(x.data(), n), n2 = fast->norm2(x.data(), n);
    CHECK(std::abs(n1 - n2) <= 1e-13 * (1 + n1));
    y1 = y;
    y2 = y;
    ref.axpy({0.7, -0.2}, x.data(), y1.data(), n);
    fast->axpy({0.7, -0.2}, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-14 * (1 + std::abs(y1[i])));
  }
}

TEST_CASE("band matvec agrees with a dense product") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  const std::size_t n = 13;
  std::vector<std::complex<double>> a(n * n), x(n), y(n);
  for (auto& v : a) v = {g(rng), g(rng)};
  for (auto& v : x) v = {g(rng), g(rng)};
  const std::size_t lo = 2, up = 3;
  kernels::active().band_matvec(a.data(), n, lo, up, x.data(), y.data());
  for (std::size_t i = 0; i < n; ++i) {
    std::complex<double> s = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j + lo >= i && j <= i + up) s += a[i * n + j] * x[j];
    }
    CHECK(std::abs(s - y[i]) < 1e-12);
  }
}

}  // TEST_SUITE("kernels")
