#pragma once

#include <cstdint>
#include <cstdlib>
#include <vector>

#include "lrp/errors.hpp"

namespace lrp {

using Point = std::vector<int>;

// The box Lambda_n = {-n,...,n}^d.
struct Box {
  int n = 0;
  int d = 1;

  std::int64_t side() const { return 2 * static_cast<std::int64_t>(n) + 1; }

  std::int64_t vertex_count() const {
    std::int64_t v = 1;
    for (int i = 0; i < d; ++i) v *= side();
    return v;
  }

  bool contains(const Point& p) const {
    if (static_cast<int>(p.size()) != d) return false;
    for (int c : p)
      if (c < -n || c > n) return false;
    return true;
  }

  // Row-major linearization: coordinate 0 varies slowest. This layout is part
  // of the serialized-partition contract.
  std::int64_t index_of(const Point& p) const {
    std::int64_t idx = 0;
    for (int i = 0; i < d; ++i) idx = idx * side() + (p[i] + n);
    return idx;
  }

  Point point_at(std::int64_t idx) const {
    Point p(d);
    for (int i = d - 1; i >= 0; --i) {
      p[i] = static_cast<int>(idx % side()) - n;
      idx /= side();
    }
    return p;
  }

  std::int64_t origin_index() const {
    std::int64_t idx = 0;
    for (int i = 0; i < d; ++i) idx = idx * side() + n;
    return idx;
  }
};

inline int sup_norm(const Point& p) {
  int m = 0;
  for (int c : p) m = std::max(m, std::abs(c));
  return m;
}

// Number of lattice points with sup-norm exactly m in d dimensions:
// (2m+1)^d - (2m-1)^d for m >= 1, and 1 for m = 0.
std::int64_t sup_shell_count(int d, std::int64_t m);

// Coefficients c_j of the polynomial sup_shell_count(m) = sum_j c_j m^j.
std::vector<double> sup_shell_poly(int d);

}  // namespace lrp
