#pragma once

#include <array>
#include <cstdint>

namespace lrp {

// Philox4x32-10 block function (Salmon et al., Random123). Counter-based:
// the output is a pure function of (counter, key), so any stream can be
// regenerated independently of scheduling.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// One reproducible random stream, keyed by (master_seed, replica, substream).
// Replicas and substreams (displacement classes, independent estimator
// stages) each get their own stream; draws within a stream are sequential.
class RandomStream {
public:
  RandomStream(std::uint64_t master_seed, std::uint32_t replica, std::uint32_t substream)
      : key_{static_cast<std::uint32_t>(master_seed),
             static_cast<std::uint32_t>(master_seed >> 32)},
        base_{0, 0, substream, replica} {}

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return block_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // uniform double in [0,1) with 53 random bits
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, bound), unbiased (rejection)
  std::uint64_t next_below(std::uint64_t bound);

private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> base_;  // [ctr_lo, ctr_hi, substream, replica]
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 4;
};

// Exact Binomial(n, p) variate. Inversion by geometric waiting times for
// small n*p, Hormann's BTRS transformed rejection otherwise. Hand-rolled
// because std::binomial_distribution is implementation-defined and would
// break byte-identical reruns across standard libraries.
std::int64_t binomial_draw(RandomStream& rng, std::int64_t n, double p);

}  // namespace lrp
