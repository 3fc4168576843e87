#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lrp {

// Neumaier variant of compensated summation. All deterministic "exact" sums
// go through this so results are reproducible across platforms.
class CompensatedSum {
public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Hurwitz zeta  zeta(s, q) = sum_{m>=0} (m+q)^{-s}  for s > 1, q > 0,
// via Euler-Maclaurin. Relative accuracy ~1e-14 over the ranges used here
// (tail weights of power-law kernels).
double hurwitz_zeta(double s, double q);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  std::size_t n = 0;
};

MeanSe mean_and_se(std::span<const double> xs);

// Wilson score interval for a binomial proportion (k successes out of n).
struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

WilsonInterval wilson_interval(std::int64_t k, std::int64_t n, double z = 1.959963984540054);

// Ordinary least-squares line y = intercept + slope*x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  // slope uncertainty propagated from the per-point standard errors
  // (zero when no point errors are supplied)
  double slope_se = 0.0;
  std::size_t n = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> y_se);

// Standard error of a statistic from its leave-one-out replications:
// sqrt((n-1)/n * sum (t_i - tbar)^2).
double jackknife_se(std::span<const double> leave_one_out);

}  // namespace lrp
