#pragma once

// Reference implementations used by the tests. Each one is written the slow,
// obvious way and shares no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Exact non-negative fraction, always reduced.
struct Frac {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Frac(std::int64_t n = 0, std::int64_t d = 1) : num(n), den(d) {
    const std::int64_t g = std::gcd(num, den);
    if (g != 0) {
      num /= g;
      den /= g;
    }
  }
};

inline Frac operator-(Frac a, Frac b) { return Frac(a.num * b.den - b.num * a.den, a.den * b.den); }
inline bool operator<(Frac a, Frac b) { return a.num * b.den < b.num * a.den; }
inline bool operator>=(Frac a, Frac b) { return !(a < b); }
inline Frac fmin(Frac a, Frac b) { return a < b ? a : b; }
inline Frac fmax(Frac a, Frac b) { return a < b ? b : a; }

// Is character k of an n-letter word in region r of level l? Overlap of
// [k/n, (k+1)/n] with [r/l, (r+1)/l] must be at least half of 1/n.
inline bool in_region(std::int64_t k, std::int64_t n, std::int64_t r, std::int64_t l) {
  const Frac lo = fmax(Frac(k, n), Frac(r, l));
  const Frac hi = fmin(Frac(k + 1, n), Frac(r + 1, l));
  if (hi < lo) return false;
  const Frac overlap = hi - lo;
  return overlap >= Frac(1, 2 * n);
}

// Set bit indices of the PHOC of word (code points) under charset/levels.
inline std::vector<std::size_t> phoc_bits(const std::u32string& word, const std::u32string& charset,
                                          const std::vector<int>& levels) {
  std::vector<std::size_t> bits;
  const auto n = static_cast<std::int64_t>(word.size());
  std::size_t offset = 0;
  for (int l : levels) {
    for (std::int64_t r = 0; r < l; ++r) {
      for (std::size_t c = 0; c < charset.size(); ++c) {
        bool on = false;
        for (std::int64_t k = 0; k < n; ++k) {
          if (word[static_cast<std::size_t>(k)] == charset[c] && in_region(k, n, r, l)) on = true;
        }
        if (on) bits.push_back(offset + static_cast<std::size_t>(r) * charset.size() + c);
      }
    }
    offset += static_cast<std::size_t>(l) * charset.size();
  }
  return bits;
}

// Plain recursion over the three edit operations, no memoization.
inline std::size_t edit_distance(const std::u32string& s, const std::u32string& t) {
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == s.size()) return t.size() - j;
    if (j == t.size()) return s.size() - i;
    const std::size_t sub = go(i + 1, j + 1) + (s[i] == t[j] ? 0 : 1);
    const std::size_t del = go(i + 1, j) + 1;
    const std::size_t ins = go(i, j + 1) + 1;
    return std::min({sub, del, ins});
  };
  return go(0, 0);
}

// Cheapest script under arbitrary costs, by exhaustive recursion.
inline double weighted_edit(const std::u32string& s, const std::u32string& t,
                            const std::function<double(char32_t, char32_t)>& sub,
                            const std::function<double(char32_t)>& ins,
                            const std::function<double(char32_t)>& del) {
  std::function<double(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> double {
    if (i == s.size() && j == t.size()) return 0.0;
    double best = INFINITY;
    if (i < s.size() && j < t.size()) best = std::min(best, go(i + 1, j + 1) + (s[i] == t[j] ? 0.0 : sub(s[i], t[j])));
    if (i < s.size()) best = std::min(best, go(i + 1, j) + del(s[i]));
    if (j < t.size()) best = std::min(best, go(i, j + 1) + ins(t[j]));
    return best;
  };
  return go(0, 0);
}

inline double cos_sim(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double dot = 0, na = 0, nb = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / std::sqrt(na * nb);
}

// Mean of the k largest values, by full sort.
inline double top_k_mean(std::vector<double> v, std::size_t k) {
  if (k == 0 || v.empty()) return 0.0;
  std::sort(v.begin(), v.end(), std::greater<>());
  k = std::min(k, v.size());
  double s = 0;
  for (std::size_t i = 0; i < k; ++i) s += v[i];
  return s / static_cast<double>(k);
}

// rk for the columns of C: each column against every other column.
inline std::vector<double> rk(const Eigen::MatrixXd& c, std::size_t k) {
  const auto m = static_cast<std::size_t>(c.cols());
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> sims;
    for (std::size_t i = 0; i < m; ++i) {
      if (i != j) sims.push_back(cos_sim(c.col(static_cast<Eigen::Index>(j)), c.col(static_cast<Eigen::Index>(i))));
    }
    out[j] = top_k_mean(sims, std::min(k, m - 1));
  }
  return out;
}

// Indices sorted by descending score, ties by ascending index.
inline std::vector<std::size_t> order_desc(const std::vector<double>& scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

// Canonical correlations from the regularized generalized eigenproblem
//   [0 Cxy; Cyx 0] w = rho [Cxx+lI 0; 0 Cyy+lI] w
// solved densely; returns the p largest eigenvalues.
inline std::vector<double> cca_correlations(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda) {
  const Eigen::MatrixXd xc = x.colwise() - x.rowwise().mean();
  const Eigen::MatrixXd yc = y.colwise() - y.rowwise().mean();
  const Eigen::Index dx = x.rows(), dy = y.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dx + dy, dx + dy);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dx + dy, dx + dy);
  a.topRightCorner(dx, dy) = xc * yc.transpose();
  a.bottomLeftCorner(dy, dx) = yc * xc.transpose();
  b.topLeftCorner(dx, dx) = xc * xc.transpose() + lambda * Eigen::MatrixXd::Identity(dx, dx);
  b.bottomRightCorner(dy, dy) = yc * yc.transpose() + lambda * Eigen::MatrixXd::Identity(dy, dy);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, b);
  std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), std::greater<>());
  ev.resize(static_cast<std::size_t>(std::min(dx, dy)));
  return ev;
}

// Student-t CDF by composite Simpson integration of the density from 0 to |t|.
inline double student_t_cdf(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
  auto pdf = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  const double a = std::fabs(t);
  const int n = 200000;
  const double h = a / n;
  double s = pdf(0) + pdf(a);
  for (int i = 1; i < n; ++i) s += pdf(i * h) * (i % 2 ? 4 : 2);
  const double half = s * h / 3;
  return t >= 0 ? 0.5 + half : 0.5 - half;
}

// Average precision straight from the definition.
inline double average_precision(const std::vector<std::string>& ranking, const std::vector<std::string>& relevant) {
  double sum = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (std::find(relevant.begin(), relevant.end(), ranking[i]) != relevant.end()) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

}  // namespace oracle
