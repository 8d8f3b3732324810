#pragma once

// Candidate scoring by cosine similarity and cross-domain similarity local
// scaling (CSLS).
//
// Orientation: "cos" is cosine SIMILARITY and results are ranked by
// descending score. The CSLS score of query q and candidate j is
//
//   csls(q, j) = 2 cos(q, P_j) - r_k(q) - rk[j]
//
// where r_k(v) is the mean cosine similarity from v to its k most similar
// candidates. Candidate penalties rk are precomputed at build time against
// the other candidates; the query penalty is computed once per query against
// all candidates. Hubs (vectors close to many others) carry large penalties
// and are demoted.
//
// Two scoring backends share this contract:
//   - projected: a CCA model maps PHOC vectors into a p-dimensional space;
//     columns are stored L2-normalized.
//   - binary: no model (identity projection); cosines are computed from
//     packed PHOC bits as popcount(a & b) / sqrt(|a| |b|).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nlx/corpus.hpp"
#include "nlx/phoc.hpp"
#include "nlx/subspace.hpp"

namespace nlx {

inline constexpr std::size_t kDefaultNeighbors = 20;

enum class Metric { kCosine, kCsls };

const char* metric_name(Metric metric);

// x.y / (|x||y|). Throws Error(kInvalidArgument) on a zero-norm input or a
// length mismatch.
double cosine(std::span<const double> x, std::span<const double> y);

struct SearchHit {
  std::size_t index = 0;  // vocabulary index
  double score = 0.0;
};

class SearchIndex {
 public:
  // Encodes every vocabulary token (tokens without any charset character are
  // kept in the vocabulary but excluded from vector ranking), projects through
  // the model when one is given, normalizes, and computes rk with
  // min(k, valid - 1) neighbors. Throws Error(kInvalidArgument) for an empty
  // vocabulary.
  static SearchIndex build(const PhocConfig& config, std::optional<CcaModel> model,
                           Vocabulary vocab, std::size_t k = kDefaultNeighbors);

  // Reassembles an index from persisted parts without recomputation.
  static SearchIndex from_parts(PhocConfig config, std::optional<CcaModel> model,
                                Vocabulary vocab, std::vector<PhocVector> phoc,
                                Eigen::MatrixXd projected, std::vector<double> rk,
                                std::vector<bool> valid, std::size_t k);

  const PhocConfig& config() const { return config_; }
  const std::optional<CcaModel>& model() const { return model_; }
  const Vocabulary& vocab() const { return vocab_; }
  const std::vector<PhocVector>& phoc() const { return phoc_; }
  // p x m, unit columns; empty (0 x 0) for the binary backend.
  const Eigen::MatrixXd& projected() const { return projected_; }
  const std::vector<double>& rk() const { return rk_; }
  const std::vector<bool>& valid() const { return valid_; }

  std::size_t size() const { return vocab_.size(); }
  std::size_t valid_count() const { return valid_count_; }
  std::size_t k() const { return k_; }
  std::size_t effective_k() const;
  bool binary() const { return !model_.has_value(); }

  // Query vector in the scoring space: the projected p-vector, or for the
  // binary backend the PHOC bits as reals. Throws Error(kEncoding) when the
  // query cannot be encoded and Error(kNumeric) when it projects to zero.
  Eigen::VectorXd query_vector(std::string_view query) const;

  // Cosine similarity of the query to every candidate; excluded candidates
  // get NaN.
  std::vector<double> similarities(const Eigen::VectorXd& query) const;

  // Mean of the effective_k() largest similarities (0 when k is 0).
  double query_penalty(std::span<const double> similarities) const;

  // Scores for all candidates under the metric (NaN for excluded ones).
  std::vector<double> scores(const Eigen::VectorXd& query, Metric metric) const;

  // Single CSLS value; recomputes the query penalty.
  double csls(const Eigen::VectorXd& query, std::size_t j) const;

  // Top results by descending score, ties by ascending vocabulary index.
  // top_n == 0 or top_n > valid_count() returns every ranked candidate.
  std::vector<SearchHit> search(std::string_view query, Metric metric,
                                std::size_t top_n = 0) const;
  std::vector<SearchHit> rank(const Eigen::VectorXd& query, Metric metric,
                              std::size_t top_n = 0) const;

 private:
  SearchIndex() : config_(PhocConfig::standard()) {}

  void finish_layout();
  void compute_penalties();
  std::span<const std::uint64_t> row(std::size_t j) const {
    return {bit_rows_.data() + j * row_words_, row_words_};
  }

  PhocConfig config_;
  std::optional<CcaModel> model_;
  Vocabulary vocab_;
  std::vector<PhocVector> phoc_;
  std::vector<std::size_t> bit_counts_;
  std::vector<std::uint64_t> bit_rows_;  // contiguous copy of phoc_, row_words_ per row
  std::size_t row_words_ = 0;
  Eigen::MatrixXd projected_;
  std::vector<double> rk_;
  std::vector<bool> valid_;
  std::size_t valid_count_ = 0;
  std::size_t k_ = kDefaultNeighbors;
};

// Descending score, ascending index; NaN scores are dropped.
std::vector<SearchHit> top_hits(std::span<const double> scores, std::size_t top_n);

}  // namespace nlx
