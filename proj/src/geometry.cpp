#include "lrp/geometry.hpp"

namespace lrp {

std::int64_t sup_shell_count(int d, std::int64_t m) {
  if (m == 0) return 1;
  std::int64_t outer = 1, inner = 1;
  for (int i = 0; i < d; ++i) {
    outer *= 2 * m + 1;
    inner *= 2 * m - 1;
  }
  return outer - inner;
}

std::vector<double> sup_shell_poly(int d) {
  // (2m+1)^d - (2m-1)^d = 2 * sum_{j : d-j odd} binom(d,j) (2m)^j
  std::vector<double> binom(d + 1, 0.0);
  binom[0] = 1.0;
  for (int i = 1; i <= d; ++i) {
    for (int j = i; j > 0; --j) binom[j] += binom[j - 1];
  }
  std::vector<double> coef(d, 0.0);
  double pow2 = 1.0;  // 2^j
  for (int j = 0; j < d; ++j) {
    if ((d - j) % 2 == 1) coef[j] = 2.0 * binom[j] * pow2;
    pow2 *= 2.0;
  }
  return coef;
}

}  // namespace lrp
