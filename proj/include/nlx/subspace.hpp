#pragma once

// Regularized canonical correlation analysis between two views.
//
// Columns of X and Y are paired observations. After centering, each view's
// scatter matrix (sum of outer products, not divided by the count) is
// regularized as C + lambda*I and whitened through its symmetric inverse
// square root. The singular vectors of the whitened cross-scatter give the
// canonical directions:
//
//   Wx = Kx U,  Wy = Ky V,  Kx = (Cxx + lambda I)^(-1/2),  Kx Cxy Ky = U S V^T
//
// so that Wx^T (Cxx + lambda I) Wx = I and the singular values S are the
// canonical correlations.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nlx {

inline constexpr double kDefaultLambda = 1e-3;

// Settings that work well for retrieval with the standard PHOC layout and a
// few thousand training pairs: strong ridge and a 128-dimensional subspace.
// Full-dimensional projections with a tiny ridge weight every noisy direction
// equally and rank poorly.
inline constexpr double kRetrievalLambda = 1000.0;
inline constexpr std::size_t kRetrievalProjectionDim = 128;

// Paired views, one column per pair. Duplicated pairs are kept.
struct TrainingPairSet {
  Eigen::MatrixXd x;  // ground-truth view, d_x rows
  Eigen::MatrixXd y;  // candidate view, d_y rows
};

struct CcaModel {
  Eigen::MatrixXd wx;  // d_x x p
  Eigen::MatrixXd wy;  // d_y x p
  Eigen::VectorXd mean_x;
  Eigen::VectorXd mean_y;
  double lambda = 0.0;
  Eigen::VectorXd correlations;  // length p, non-increasing

  std::size_t dimension() const { return static_cast<std::size_t>(wx.rows()); }
  std::size_t projection_dim() const { return static_cast<std::size_t>(wx.cols()); }

  // Wx = Wy = I, zero means, unit correlations.
  static CcaModel identity(std::size_t d);

  friend bool operator==(const CcaModel& a, const CcaModel& b);
};

struct FitResult {
  CcaModel model;
  std::vector<std::string> warnings;  // eigenvalue clamping notices
};

// projection_dim == 0 selects min(d_x, d_y, pair_count - 1).
// Errors: fewer than two pairs, mismatched pair counts, negative lambda,
// projection_dim out of range (kInvalidArgument); a singular view covariance
// with lambda == 0 (kNumeric, message names the view).
FitResult fit_cca(const TrainingPairSet& pairs, double lambda, std::size_t projection_dim = 0);

// Wx^T (v - mean_x).
Eigen::VectorXd project_query(const CcaModel& model, std::span<const double> v);

// Column j of the result is Wy^T (M_j - mean_y), computed with the same kernel
// as a single-vector projection, so batching never changes a bit.
Eigen::MatrixXd project_candidates(const CcaModel& model, const Eigen::MatrixXd& candidates);

// Single-column projection through Wy.
Eigen::VectorXd project_candidate(const CcaModel& model, std::span<const double> v);

}  // namespace nlx
