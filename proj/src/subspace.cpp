#include "nlx/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlx/error.hpp"
#include "nlx/parallel.hpp"

namespace nlx {

namespace {

constexpr double kRelativeEigenFloor = 1e-12;

// Rows whose entries are not all identical; constant rows center to exact zero.
std::vector<Eigen::Index> active_rows(const Eigen::MatrixXd& m) {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double first = m(r, 0);
    for (Eigen::Index c = 1; c < m.cols(); ++c) {
      if (m(r, c) != first) {
        rows.push_back(r);
        break;
      }
    }
  }
  return rows;
}

Eigen::MatrixXd centered_rows(const Eigen::MatrixXd& m, const Eigen::VectorXd& mean,
                              const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]).array() - mean(rows[i]);
  }
  return out;
}

// (C + lambda I)^(-1/2) for the active block of one view.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& centered, double lambda, const char* view,
                             std::vector<std::string>& warnings) {
  const Eigen::Index a = centered.rows();
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Identity(a, a) * lambda;
  scatter.selfadjointView<Eigen::Lower>().rankUpdate(centered);
  scatter.triangularView<Eigen::StrictlyUpper>() = scatter.transpose();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scatter);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumeric, std::string("eigendecomposition failed for view ") + view);
  }
  Eigen::VectorXd values = eig.eigenvalues();
  const double largest = values.maxCoeff();
  const double floor = kRelativeEigenFloor * largest;
  if (!(largest > 0.0)) {
    throw Error(ErrorCode::kNumeric, std::string("covariance of view ") + view + " is zero");
  }
  std::size_t clamped = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) <= floor) {
      if (lambda == 0.0) {
        throw Error(ErrorCode::kNumeric, std::string("covariance of view ") + view +
                                             " is singular; use lambda > 0");
      }
      values(i) = floor;
      ++clamped;
    }
  }
  if (clamped > 0) {
    std::ostringstream msg;
    msg << "view " << view << ": clamped " << clamped << " eigenvalue(s) to " << floor;
    warnings.push_back(msg.str());
  }
  const Eigen::MatrixXd& vecs = eig.eigenvectors();
  return vecs * values.cwiseSqrt().cwiseInverse().asDiagonal() * vecs.transpose();
}

// Columns of the whitened basis U (active block) mapped back to full
// coordinates, followed by unit directions on constant rows.
Eigen::MatrixXd assemble(const Eigen::MatrixXd& whitener, const Eigen::MatrixXd& basis,
                         const std::vector<Eigen::Index>& active, Eigen::Index full_dim,
                         double lambda, Eigen::Index columns) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(full_dim, columns);
  const Eigen::Index from_block = std::min<Eigen::Index>(columns, basis.cols());
  const Eigen::MatrixXd mapped = whitener * basis.leftCols(from_block);
  for (std::size_t i = 0; i < active.size(); ++i) {
    w.row(active[i]).head(from_block) = mapped.row(static_cast<Eigen::Index>(i));
  }
  Eigen::Index col = from_block;
  const double scale = lambda > 0.0 ? 1.0 / std::sqrt(lambda) : 0.0;
  std::size_t next_active = 0;
  for (Eigen::Index r = 0; r < full_dim && col < columns; ++r) {
    if (next_active < active.size() && active[next_active] == r) {
      ++next_active;
      continue;
    }
    w(r, col++) = scale;
  }
  return w;
}

Eigen::VectorXd project(const Eigen::MatrixXd& w, const Eigen::VectorXd& mean,
                        std::span<const double> v) {
  if (static_cast<Eigen::Index>(v.size()) != w.rows()) {
    throw Error(ErrorCode::kInvalidArgument,
                "projection: vector has " + std::to_string(v.size()) + " entries, model expects " +
                    std::to_string(w.rows()));
  }
  const Eigen::Map<const Eigen::VectorXd> in(v.data(), static_cast<Eigen::Index>(v.size()));
  const Eigen::VectorXd centered = in - mean;
  Eigen::VectorXd out(w.cols());
  for (Eigen::Index j = 0; j < w.cols(); ++j) out(j) = w.col(j).dot(centered);
  return out;
}

}  // namespace

CcaModel CcaModel::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  CcaModel m;
  m.wx = Eigen::MatrixXd::Identity(n, n);
  m.wy = Eigen::MatrixXd::Identity(n, n);
  m.mean_x = Eigen::VectorXd::Zero(n);
  m.mean_y = Eigen::VectorXd::Zero(n);
  m.lambda = 0.0;
  m.correlations = Eigen::VectorXd::Ones(n);
  return m;
}

bool operator==(const CcaModel& a, const CcaModel& b) {
  auto same = [](const auto& p, const auto& q) {
    return p.rows() == q.rows() && p.cols() == q.cols() && p == q;
  };
  return a.lambda == b.lambda && same(a.wx, b.wx) && same(a.wy, b.wy) &&
         same(a.mean_x, b.mean_x) && same(a.mean_y, b.mean_y) &&
         same(a.correlations, b.correlations);
}

FitResult fit_cca(const TrainingPairSet& pairs, double lambda, std::size_t projection_dim) {
  const Eigen::Index n = pairs.x.cols();
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "CCA needs at least two training pairs");
  if (pairs.y.cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "CCA views have different pair counts");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidArgument, "CCA lambda must be a finite value >= 0");
  }
  const Eigen::Index dx = pairs.x.rows();
  const Eigen::Index dy = pairs.y.rows();
  const Eigen::Index max_p = std::min({dx, dy, n - 1});
  const Eigen::Index p =
      projection_dim == 0 ? max_p : static_cast<Eigen::Index>(projection_dim);
  if (p < 1 || p > max_p) {
    throw Error(ErrorCode::kInvalidArgument,
                "CCA projection dimension " + std::to_string(p) + " outside [1, " +
                    std::to_string(max_p) + "]");
  }

  FitResult result;
  CcaModel& model = result.model;
  model.lambda = lambda;
  model.mean_x = pairs.x.rowwise().mean();
  model.mean_y = pairs.y.rowwise().mean();

  const auto active_x = active_rows(pairs.x);
  const auto active_y = active_rows(pairs.y);
  if (lambda == 0.0) {
    if (static_cast<Eigen::Index>(active_x.size()) < dx) {
      throw Error(ErrorCode::kNumeric, "covariance of view X is singular (constant features); use lambda > 0");
    }
    if (static_cast<Eigen::Index>(active_y.size()) < dy) {
      throw Error(ErrorCode::kNumeric, "covariance of view Y is singular (constant features); use lambda > 0");
    }
  }
  if (active_x.empty() || active_y.empty()) {
    throw Error(ErrorCode::kNumeric, std::string("view ") + (active_x.empty() ? "X" : "Y") +
                                         " has no varying feature");
  }

  const Eigen::MatrixXd xc = centered_rows(pairs.x, model.mean_x, active_x);
  const Eigen::MatrixXd yc = centered_rows(pairs.y, model.mean_y, active_y);
  const Eigen::MatrixXd kx = inverse_sqrt(xc, lambda, "X", result.warnings);
  const Eigen::MatrixXd ky = inverse_sqrt(yc, lambda, "Y", result.warnings);

  const Eigen::MatrixXd whitened_cross = kx * (xc * yc.transpose()) * ky;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(whitened_cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();

  model.wx = assemble(kx, svd.matrixU(), active_x, dx, lambda, p);
  model.wy = assemble(ky, svd.matrixV(), active_y, dy, lambda, p);
  model.correlations = Eigen::VectorXd::Zero(p);
  const Eigen::Index ranked = std::min<Eigen::Index>(p, sv.size());
  model.correlations.head(ranked) = sv.head(ranked);

  // Sign convention: first clearly nonzero entry of each Wx column is positive.
  for (Eigen::Index j = 0; j < p; ++j) {
    const double scale = model.wx.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < dx; ++i) {
      if (std::abs(model.wx(i, j)) > 1e-9 * scale) {
        if (model.wx(i, j) < 0.0) {
          model.wx.col(j) *= -1.0;
          model.wy.col(j) *= -1.0;
        }
        break;
      }
    }
  }
  return result;
}

Eigen::VectorXd project_query(const CcaModel& model, std::span<const double> v) {
  return project(model.wx, model.mean_x, v);
}

Eigen::VectorXd project_candidate(const CcaModel& model, std::span<const double> v) {
  return project(model.wy, model.mean_y, v);
}

Eigen::MatrixXd project_candidates(const CcaModel& model, const Eigen::MatrixXd& candidates) {
  if (candidates.rows() != model.wy.rows()) {
    throw Error(ErrorCode::kInvalidArgument,
                "projection: candidate matrix has " + std::to_string(candidates.rows()) +
                    " rows, model expects " + std::to_string(model.wy.rows()));
  }
  Eigen::MatrixXd out(model.wy.cols(), candidates.cols());
  parallel_for(static_cast<std::size_t>(candidates.cols()), [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      out.col(col) = project(model.wy, model.mean_y,
                             std::span<const double>(candidates.col(col).data(),
                                                     static_cast<std::size_t>(candidates.rows())));
    }
  });
  return out;
}

}  // namespace nlx
