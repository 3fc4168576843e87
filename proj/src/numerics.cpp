#include "lrp/numerics.hpp"

#include <cmath>
#include <cstdlib>

#include "lrp/errors.hpp"

namespace lrp {

namespace {

// B_{2k}/(2k)! for k = 1..8, as they appear in the Euler-Maclaurin tail.
constexpr double kBernoulliOverFact[8] = {
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
};

}  // namespace

double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0)) throw precondition_error("hurwitz_zeta: requires s > 1");
  if (!(q > 0.0)) throw precondition_error("hurwitz_zeta: requires q > 0");

  // Euler-Maclaurin needs the expansion point well beyond s, otherwise the
  // Bernoulli terms grow before they shrink.
  int n_direct = 18;
  if (2.0 * s - q + 1.0 > n_direct) n_direct = static_cast<int>(std::ceil(2.0 * s - q + 1.0));

  CompensatedSum acc;
  for (int m = 0; m < n_direct; ++m) acc.add(std::pow(q + m, -s));

  const double a = q + n_direct;
  acc.add(std::pow(a, 1.0 - s) / (s - 1.0));
  acc.add(0.5 * std::pow(a, -s));

  double rising = s;  // s*(s+1)*...*(s+2k-2), here with 2k-1 = 1 factor
  double apow = std::pow(a, -s - 1.0);
  for (int k = 1; k <= 8; ++k) {
    acc.add(kBernoulliOverFact[k - 1] * rising * apow);
    rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
    apow /= a * a;
  }
  return acc.value();
}

MeanSe mean_and_se(std::span<const double> xs) {
  MeanSe r;
  r.n = xs.size();
  if (r.n == 0) return r;
  CompensatedSum s;
  for (double x : xs) s.add(x);
  r.mean = s.value() / static_cast<double>(r.n);
  if (r.n < 2) return r;
  CompensatedSum sq;
  for (double x : xs) {
    const double d = x - r.mean;
    sq.add(d * d);
  }
  const double var = sq.value() / static_cast<double>(r.n - 1);
  r.se = std::sqrt(var / static_cast<double>(r.n));
  return r;
}

WilsonInterval wilson_interval(std::int64_t k, std::int64_t n, double z) {
  WilsonInterval w;
  if (n <= 0) return w;
  const double p = static_cast<double>(k) / static_cast<double>(n);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = p + z2 / (2.0 * n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  w.lo = (k == 0) ? 0.0 : (center - half) / denom;
  w.hi = (k == n) ? 1.0 : (center + half) / denom;
  if (w.lo < 0.0) w.lo = 0.0;
  if (w.hi > 1.0) w.hi = 1.0;
  return w;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  return fit_line(x, y, {});
}

LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> y_se) {
  if (x.size() != y.size() || x.size() < 2) {
    throw precondition_error("fit_line: need >= 2 points with matching sizes");
  }
  LineFit f;
  f.n = x.size();
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double xbar = sx.value() / static_cast<double>(f.n);
  const double ybar = sy.value() / static_cast<double>(f.n);
  CompensatedSum sxx, sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx.add((x[i] - xbar) * (x[i] - xbar));
    sxy.add((x[i] - xbar) * (y[i] - ybar));
  }
  if (sxx.value() <= 0.0) throw precondition_error("fit_line: degenerate abscissae");
  f.slope = sxy.value() / sxx.value();
  f.intercept = ybar - f.slope * xbar;
  if (!y_se.empty()) {
    if (y_se.size() != x.size()) {
      throw precondition_error("fit_line: y_se size mismatch");
    }
    CompensatedSum v;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double wgt = (x[i] - xbar) / sxx.value();
      v.add(wgt * wgt * y_se[i] * y_se[i]);
    }
    f.slope_se = std::sqrt(v.value());
  }
  return f;
}

double jackknife_se(std::span<const double> loo) {
  const std::size_t n = loo.size();
  if (n < 2) return 0.0;
  CompensatedSum s;
  for (double t : loo) s.add(t);
  const double tbar = s.value() / static_cast<double>(n);
  CompensatedSum sq;
  for (double t : loo) sq.add((t - tbar) * (t - tbar));
  return std::sqrt(sq.value() * static_cast<double>(n - 1) / static_cast<double>(n));
}

}  // namespace lrp
