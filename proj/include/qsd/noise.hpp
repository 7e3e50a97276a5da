#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace qsd {

/// Philox4x32-10 counter-based block cipher (Salmon et al. 2011).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Complex Wiener increments with E[dxi] = 0, E[dxi^2] = 0 and
/// E[|dxi|^2] = dt, one per channel and per call.
///
/// The stream is a pure function of (seed, substream, draw counter): the
/// Philox key is the seed, and the counter words carry the draw index and
/// the substream. Substreams therefore never overlap, and a forked stream
/// does not depend on what its parent has drawn.
class NoiseStream {
 public:
  static constexpr std::uint64_t kRootSubstream =
      std::numeric_limits<std::uint64_t>::max();

  NoiseStream(std::uint64_t seed, std::size_t channel_count);

  /// Independent stream for trajectory `index` of an ensemble.
  NoiseStream fork(std::uint64_t index) const;

  /// Fills `out` (length channel_count) for a step of length dt > 0.
  void sample_increments(double dt, std::span<std::complex<double>> out);
  std::vector<std::complex<double>> sample_increments(double dt);

  /// One standard complex normal: re, im ~ N(0, 1/2).
  std::complex<double> next_standard();

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t substream() const noexcept { return substream_; }
  std::size_t channel_count() const noexcept { return channels_; }
  std::uint64_t draws() const noexcept { return counter_; }

 private:
  NoiseStream(std::uint64_t seed, std::size_t channels, std::uint64_t substream)
      : seed_(seed), channels_(channels), substream_(substream) {}

  std::uint64_t seed_;
  std::size_t channels_;
  std::uint64_t substream_;
  std::uint64_t counter_ = 0;
};

inline NoiseStream fork_stream(const NoiseStream& s, std::uint64_t index) {
  return s.fork(index);
}

}  // namespace qsd
