#include "lrp/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lrp/numerics.hpp"

namespace lrp {

std::string to_string(Norm n) { return n == Norm::sup ? "sup" : "euclidean"; }

Norm norm_from_string(const std::string& s) {
  if (s == "sup" || s == "sup-norm" || s == "linf") return Norm::sup;
  if (s == "euclidean" || s == "l2") return Norm::euclidean;
  throw config_error("unknown norm '" + s + "' (expected sup or euclidean)");
}

void KernelSpec::validate() const {
  if (d < 1) throw config_error("kernel: dimension must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw config_error("kernel: alpha must be > 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw config_error("kernel: beta must be >= 0");
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw config_error("kernel: amplitude must be > 0");
  }
}

void KernelSpec::validate_for_criticality() const {
  validate();
  if (d == 1 && alpha >= 1.0) {
    throw config_error(
        "criticality experiment rejected: for d = 1 and alpha >= 1 the critical "
        "point beta_c is infinite; plain sampling is still available");
  }
}

double norm_value(Norm norm, const Point& diff) {
  if (norm == Norm::sup) {
    return static_cast<double>(sup_norm(diff));
  }
  double s = 0.0;
  for (int c : diff) s += static_cast<double>(c) * static_cast<double>(c);
  return std::sqrt(s);
}

double kernel_value(const KernelSpec& spec, const Point& x, const Point& y) {
  Point diff(spec.d);
  for (int i = 0; i < spec.d; ++i) diff[i] = x[i] - y[i];
  const double r = norm_value(spec.norm, diff);
  if (r == 0.0) return 0.0;
  return spec.amplitude * std::pow(r, -static_cast<double>(spec.d) - spec.alpha);
}

double connection_probability(const KernelSpec& spec, const Point& x, const Point& y) {
  return -std::expm1(-spec.beta * kernel_value(spec, x, y));
}

double connection_probability_at_distance(const KernelSpec& spec, double r) {
  if (r <= 0.0) return 0.0;
  return -std::expm1(-spec.beta * spec.amplitude *
                     std::pow(r, -static_cast<double>(spec.d) - spec.alpha));
}

namespace detail {

ExteriorWeight power_shell_tail(const std::vector<double>& poly, std::int64_t first,
                                double c, double p) {
  ExteriorWeight r;
  if (c <= 0.0) return r;
  CompensatedSum acc;

  // Walk forward until c*m^{-p} <= 1/2 so the exponential series contracts.
  std::int64_t m0 = first;
  while (c * std::pow(static_cast<double>(m0), -p) > 0.5) {
    double shell = 0.0;
    double mp = 1.0;
    for (double coef : poly) {
      shell += coef * mp;
      mp *= static_cast<double>(m0);
    }
    acc.add(shell * -std::expm1(-c * std::pow(static_cast<double>(m0), -p)));
    ++m0;
  }

  // tail from q = m0: sum_t (-1)^{t+1} c^t/t! * sum_j poly[j] zeta(t*p - j, q)
  const double q = static_cast<double>(m0);
  double coef_t = 1.0;  // c^t / t!
  double term_bound = 0.0;
  for (int t = 1; t <= 80; ++t) {
    coef_t *= c / t;
    CompensatedSum zsum;
    for (std::size_t j = 0; j < poly.size(); ++j) {
      if (poly[j] == 0.0) continue;
      zsum.add(poly[j] * hurwitz_zeta(t * p - static_cast<double>(j), q));
    }
    const double term = (t % 2 == 1 ? coef_t : -coef_t) * zsum.value();
    term_bound = std::abs(term);
    acc.add(term);
    if (term_bound < 1e-16 * std::abs(acc.value()) || term_bound == 0.0) break;
  }
  r.value = acc.value();
  // remaining terms shrink at least geometrically with ratio <= 1/2
  r.truncation_error = 2.0 * term_bound * (c * std::pow(q, -p)) +
                       1e-14 * std::abs(r.value);
  return r;
}

}  // namespace detail

namespace {

// |{b : ||b - a||_inf <= m, b in Lambda_k}|
std::int64_t ball_box_overlap(const Point& a, std::int64_t m, int k) {
  std::int64_t v = 1;
  for (int c : a) {
    const std::int64_t lo = std::max<std::int64_t>(-k, c - m);
    const std::int64_t hi = std::min<std::int64_t>(k, c + m);
    if (hi < lo) return 0;
    v *= hi - lo + 1;
  }
  return v;
}

void check_tolerance(const ExteriorWeight& w, const ExteriorOptions& options,
                     const char* what) {
  const double scale = std::max(std::abs(w.value), std::numeric_limits<double>::min());
  if (w.truncation_error > options.tolerance * scale) {
    throw precondition_error(std::string(what) +
                             ": certified truncation error exceeds tolerance");
  }
}

ExteriorWeight exterior_weight_sup(const KernelSpec& spec, const Point& a, int k,
                                   const ExteriorOptions& options) {
  ExteriorWeight r;
  const double c = spec.beta * spec.amplitude;
  if (c == 0.0) return r;
  const double p = static_cast<double>(spec.d) + spec.alpha;
  const int s = sup_norm(a);

  CompensatedSum near;
  for (std::int64_t m = std::max<std::int64_t>(1, k - s + 1); m <= k + s; ++m) {
    const std::int64_t inside = ball_box_overlap(a, m, k) - ball_box_overlap(a, m - 1, k);
    const std::int64_t out = sup_shell_count(spec.d, m) - inside;
    if (out == 0) continue;
    near.add(static_cast<double>(out) *
             -std::expm1(-c * std::pow(static_cast<double>(m), -p)));
  }

  const ExteriorWeight tail =
      detail::power_shell_tail(sup_shell_poly(spec.d), k + s + 1, c, p);
  r.value = near.value() + tail.value;
  r.truncation_error = tail.truncation_error;
  check_tolerance(r, options, "exterior_weight");
  return r;
}

// enumerate the sup-shell ||b||_inf = m and accumulate w(||b - a||_2).
// Face convention: b lies on face (i, sign) if b_i = sign*m and |b_j| < m
// for all j < i; coordinates j > i run over the full range.
double euclidean_shell_sum(const KernelSpec& spec, const Point& a, std::int64_t m) {
  CompensatedSum acc;
  const double p = static_cast<double>(spec.d) + spec.alpha;
  Point b(spec.d);
  for (int i = 0; i < spec.d; ++i) {
    std::int64_t count = 1;
    for (int j = 0; j < spec.d; ++j) {
      if (j == i) continue;
      count *= (j < i) ? (2 * m - 1) : (2 * m + 1);
    }
    if (count <= 0) continue;
    for (int sign = -1; sign <= 1; sign += 2) {
      b[i] = static_cast<int>(sign * m);
      for (std::int64_t idx = 0; idx < count; ++idx) {
        std::int64_t rest = idx;
        for (int j = spec.d - 1; j >= 0; --j) {
          if (j == i) continue;
          const std::int64_t side = (j < i) ? (2 * m - 1) : (2 * m + 1);
          const std::int64_t off = (j < i) ? (m - 1) : m;
          b[j] = static_cast<int>(rest % side - off);
          rest /= side;
        }
        double sq = 0.0;
        for (int j = 0; j < spec.d; ++j) {
          const double diff = static_cast<double>(b[j] - a[j]);
          sq += diff * diff;
        }
        acc.add(-std::expm1(-spec.beta * spec.amplitude * std::pow(sq, -0.5 * p)));
      }
    }
  }
  return acc.value();
}

ExteriorWeight exterior_weight_euclidean(const KernelSpec& spec, const Point& a, int k,
                                         const ExteriorOptions& options) {
  ExteriorWeight r;
  const double c = spec.beta * spec.amplitude;
  if (c == 0.0) return r;
  const double p = static_cast<double>(spec.d) + spec.alpha;
  const std::vector<double> poly = sup_shell_poly(spec.d);

  CompensatedSum acc;
  for (std::int64_t m = k + 1; m <= options.max_shell; ++m) {
    acc.add(euclidean_shell_sum(spec, a, m));
    // comparison bound: ||u||_2 >= ||u||_inf >= m+1-||a||_inf for b beyond m
    const std::int64_t next = m + 1 - sup_norm(a);
    if (next < 1) continue;
    CompensatedSum bound;
    for (std::size_t j = 0; j < poly.size(); ++j) {
      if (poly[j] == 0.0) continue;
      bound.add(poly[j] * hurwitz_zeta(p - static_cast<double>(j), static_cast<double>(next)));
    }
    const double tail_bound = c * bound.value();
    if (tail_bound <= options.tolerance * std::abs(acc.value())) {
      r.value = acc.value();
      r.truncation_error = tail_bound;
      return r;
    }
  }
  throw precondition_error(
      "exterior_weight: euclidean norm in d >= 2 cannot certify the requested "
      "tolerance within the shell cap; loosen ExteriorOptions.tolerance");
}

}  // namespace

ExteriorWeight exterior_weight(const KernelSpec& spec, const Point& a, int k,
                               const ExteriorOptions& options) {
  spec.validate();
  if (k < 0) throw precondition_error("exterior_weight: k must be >= 0");
  if (static_cast<int>(a.size()) != spec.d || sup_norm(a) > k) {
    throw precondition_error("exterior_weight: a must lie in Lambda_k");
  }
  if (spec.norm == Norm::sup || spec.d == 1) {
    return exterior_weight_sup(spec, a, k, options);
  }
  return exterior_weight_euclidean(spec, a, k, options);
}

std::vector<double> ray_tail_table(const KernelSpec& spec, int max_k) {
  spec.validate();
  if (spec.d != 1) throw precondition_error("ray_tail_table: d = 1 only");
  if (max_k < 0) throw precondition_error("ray_tail_table: max_k must be >= 0");
  const double c = spec.beta * spec.amplitude;
  const double p = 1.0 + spec.alpha;
  std::vector<double> g(2 * static_cast<std::size_t>(max_k) + 3, 0.0);
  if (c > 0.0) {
    g[2 * max_k + 2] =
        detail::power_shell_tail({1.0}, 2 * static_cast<std::int64_t>(max_k) + 2, c, p).value;
    for (std::int64_t L = 2 * max_k + 1; L >= 1; --L) {
      g[L] = g[L + 1] - std::expm1(-c * std::pow(static_cast<double>(L), -p));
    }
  }
  return g;
}

std::vector<ExteriorWeight> exterior_weight_table(const KernelSpec& spec, int k,
                                                  const ExteriorOptions& options) {
  spec.validate();
  if (k < 0) throw precondition_error("exterior_weight_table: k must be >= 0");
  const Box box{k, spec.d};

  if (spec.d == 1) {
    const double c = spec.beta * spec.amplitude;
    const double p = 1.0 + spec.alpha;
    ExteriorWeight tail;
    if (c > 0.0) {
      tail = detail::power_shell_tail({1.0}, 2 * static_cast<std::int64_t>(k) + 2, c, p);
    }
    const std::vector<double> g = ray_tail_table(spec, k);
    std::vector<ExteriorWeight> table(box.vertex_count());
    for (int x = -k; x <= k; ++x) {
      ExteriorWeight w;
      w.value = g[k + 1 - x] + g[k + 1 + x];
      w.truncation_error = 2.0 * tail.truncation_error;
      check_tolerance(w, options, "exterior_weight_table");
      table[box.index_of({x})] = w;
    }
    return table;
  }

  std::vector<ExteriorWeight> table(box.vertex_count());
  for (std::int64_t i = 0; i < box.vertex_count(); ++i) {
    table[i] = exterior_weight(spec, box.point_at(i), k, options);
  }
  return table;
}

ExteriorWeight expected_boundary_edges(const KernelSpec& spec, const Box& box,
                                       const ExteriorOptions& options) {
  spec.validate();
  if (box.d != spec.d) throw precondition_error("expected_boundary_edges: dimension mismatch");
  const auto table = exterior_weight_table(spec, box.n, options);
  CompensatedSum value;
  CompensatedSum err;
  for (const auto& w : table) {
    value.add(w.value);
    err.add(w.truncation_error);
  }
  return {value.value(), err.value()};
}

}  // namespace lrp
