#pragma once

#include <cstddef>
#include <span>

namespace nlx {

double mean(std::span<const double> values);
// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> values);

// P(T <= t) for Student's t with df degrees of freedom, through the
// regularized incomplete beta function.
double student_t_cdf(double t, double df);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  std::size_t df = 0;
  bool reject = false;
  // Differences are constant and nonzero: the statistic is infinite, p = 0.
  bool degenerate = false;
};

// Two-sided paired t-test on a - b with |a| - 1 degrees of freedom. All-zero
// differences give t = 0, p = 1. Throws Error(kInvalidArgument) for unequal
// lengths or fewer than two pairs.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

}  // namespace nlx
