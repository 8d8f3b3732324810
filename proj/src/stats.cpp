#include "nlx/stats.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "nlx/error.hpp"

namespace nlx {

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorCode::kInvalidArgument, "degrees of freedom must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  // P(|T| > |t|) = I_{df / (df + t^2)}(df / 2, 1 / 2)
  const double x = df / (df + t * t);
  const double tail = 0.5 * boost::math::ibeta(0.5 * df, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() != b.size()) throw Error(ErrorCode::kInvalidArgument, "paired t-test: length mismatch");
  if (a.size() < 2) throw Error(ErrorCode::kInvalidArgument, "paired t-test needs at least two pairs");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];

  TTestResult r;
  r.df = a.size() - 1;
  const double m = mean(diff);
  const double sd = sample_sd(diff);
  if (sd == 0.0) {
    if (m == 0.0) return r;  // t = 0, p = 1
    r.degenerate = true;
    r.t = m > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    r.reject = true;
    return r;
  }
  r.t = m / (sd / std::sqrt(static_cast<double>(a.size())));
  const double df = static_cast<double>(r.df);
  const double x = df / (df + r.t * r.t);
  r.p = boost::math::ibeta(0.5 * df, 0.5, x);
  r.reject = r.p < alpha;
  return r;
}

}  // namespace nlx
