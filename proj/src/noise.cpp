#include "qsd/noise.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsd/error.hpp"

namespace qsd {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = std::uint64_t(a) * b;
  hi = std::uint32_t(p >> 32);
  lo = std::uint32_t(p);
}

// 53-bit uniform in (0, 1].
inline double open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((std::uint64_t(hi) << 32) | lo) >> 11;
  return (double(bits) + 1.0) * 0x1.0p-53;
}

// 53-bit uniform in [0, 1).
inline double half_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((std::uint64_t(hi) << 32) | lo) >> 11;
  return double(bits) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

NoiseStream::NoiseStream(std::uint64_t seed, std::size_t channel_count)
    : NoiseStream(seed, channel_count, kRootSubstream) {}

NoiseStream NoiseStream::fork(std::uint64_t index) const {
  return NoiseStream(seed_, channels_, index);
}

std::complex<double> NoiseStream::next_standard() {
  const std::array<std::uint32_t, 4> ctr{
      std::uint32_t(counter_), std::uint32_t(counter_ >> 32),
      std::uint32_t(substream_), std::uint32_t(substream_ >> 32)};
  const std::array<std::uint32_t, 2> key{std::uint32_t(seed_),
                                         std::uint32_t(seed_ >> 32)};
  ++counter_;
  const auto r = philox4x32(ctr, key);
  // Box-Muller; the radius is scaled so each component has variance 1/2.
  const double u1 = open_unit(r[0], r[1]);
  const double u2 = half_open_unit(r[2], r[3]);
  const double radius = std::sqrt(-std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(theta), radius * std::sin(theta)};
}

void NoiseStream::sample_increments(double dt, std::span<std::complex<double>> out) {
  if (!(dt > 0.0)) {
    throw Error(ErrorKind::InvalidStep, "noise step dt must be > 0, got " + std::to_string(dt));
  }
  if (out.size() != channels_) {
    throw Error(ErrorKind::DimensionMismatch, "increment buffer has wrong length");
  }
  const double scale = std::sqrt(dt);
  for (auto& x : out) x = scale * next_standard();
}

std::vector<std::complex<double>> NoiseStream::sample_increments(double dt) {
  std::vector<std::complex<double>> out(channels_);
  sample_increments(dt, out);
  return out;
}

}  // namespace qsd
