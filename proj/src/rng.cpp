#include "lrp/rng.hpp"

#include <cmath>

#include "lrp/errors.hpp"

namespace lrp {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& x, const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * x[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * x[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    philox_round(counter, key);
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return counter;
}

void RandomStream::refill() {
  block_ = philox4x32(base_, key_);
  pos_ = 0;
  if (++base_[0] == 0) ++base_[1];  // 64-bit block counter
}

std::uint64_t RandomStream::next_below(std::uint64_t bound) {
  if (bound < 2) return 0;
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

namespace {

// geometric waiting-time inversion, expected n*pt iterations
std::int64_t binomial_inversion(RandomStream& rng, std::int64_t n, double pt) {
  const double log_q = std::log1p(-pt);
  std::int64_t x = 0;
  std::int64_t y = 0;
  for (;;) {
    const double u = rng.next_double();
    const double g = std::floor(std::log1p(-u) / log_q) + 1.0;  // Geometric(pt) on {1,2,...}
    if (g > static_cast<double>(n - y)) return x;
    y += static_cast<std::int64_t>(g);
    ++x;
  }
}

// BTRS transformed rejection (Hormann 1993), exact, for n*pt >= 10
std::int64_t binomial_btrs(RandomStream& rng, std::int64_t n, double pt) {
  const double nd = static_cast<double>(n);
  const double q = 1.0 - pt;
  const double spq = std::sqrt(nd * pt * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * pt;
  const double c = nd * pt + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(pt / q);
  const std::int64_t m = static_cast<std::int64_t>(std::floor((nd + 1.0) * pt));
  const double h = std::lgamma(static_cast<double>(m) + 1.0) +
                   std::lgamma(nd - static_cast<double>(m) + 1.0);
  for (;;) {
    const double u = rng.next_double() - 0.5;
    double v = rng.next_double();
    const double us = 0.5 - std::abs(u);
    const std::int64_t k =
        static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + c));
    if (k < 0 || k > n) continue;
    if (us >= 0.07 && v <= v_r) return k;  // squeeze
    v = std::log(v * alpha / (a / (us * us) + b));
    const double bound = h - std::lgamma(static_cast<double>(k) + 1.0) -
                         std::lgamma(nd - static_cast<double>(k) + 1.0) +
                         static_cast<double>(k - m) * lpq;
    if (v <= bound) return k;
  }
}

}  // namespace

std::int64_t binomial_draw(RandomStream& rng, std::int64_t n, double p) {
  if (n < 0 || p < 0.0 || p > 1.0) {
    throw precondition_error("binomial_draw: need n >= 0 and p in [0,1]");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const bool flipped = p > 0.5;
  const double pt = flipped ? 1.0 - p : p;
  std::int64_t x;
  if (static_cast<double>(n) * pt < 10.0) {
    x = binomial_inversion(rng, n, pt);
  } else {
    x = binomial_btrs(rng, n, pt);
  }
  return flipped ? n - x : x;
}

}  // namespace lrp
