#include "nlx/ranking.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "nlx/error.hpp"
#include "nlx/parallel.hpp"
#include "nlx/utf8.hpp"

namespace nlx {

namespace {

constexpr double kZeroNorm = 1e-12;
constexpr std::size_t kPenaltyBlock = 64;
constexpr std::size_t kPenaltyChunk = 1024;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Keeps the k largest values seen; mean() sums them in descending order.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { heap_.reserve(k); }

  void push(double v) {
    if (heap_.size() < k_) {
      heap_.push_back(v);
      std::push_heap(heap_.begin(), heap_.end(), std::greater<>());
    } else if (v > heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end(), std::greater<>());
      heap_.back() = v;
      std::push_heap(heap_.begin(), heap_.end(), std::greater<>());
    }
  }

  // Values at or below this cannot enter.
  double floor() const {
    return heap_.size() < k_ ? -std::numeric_limits<double>::infinity() : heap_.front();
  }

  double mean() {
    if (heap_.empty()) return 0.0;
    std::sort(heap_.begin(), heap_.end(), std::greater<>());
    double sum = 0.0;
    for (double v : heap_) sum += v;
    return sum / static_cast<double>(heap_.size());
  }

 private:
  std::size_t k_;
  std::vector<double> heap_;
};

#if defined(__GNUC__) && defined(__x86_64__)
#define NLX_POPCOUNT_CLONES __attribute__((target_clones("popcnt", "default")))
#else
#define NLX_POPCOUNT_CLONES
#endif

// |a & b| over `words` words; four accumulators break the add chain.
inline std::uint32_t common_bits(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::uint64_t n0 = 0, n1 = 0, n2 = 0, n3 = 0;
  std::size_t w = 0;
  for (; w + 4 <= words; w += 4) {
    n0 += static_cast<std::uint64_t>(std::popcount(a[w] & b[w]));
    n1 += static_cast<std::uint64_t>(std::popcount(a[w + 1] & b[w + 1]));
    n2 += static_cast<std::uint64_t>(std::popcount(a[w + 2] & b[w + 2]));
    n3 += static_cast<std::uint64_t>(std::popcount(a[w + 3] & b[w + 3]));
  }
  for (; w < words; ++w) n0 += static_cast<std::uint64_t>(std::popcount(a[w] & b[w]));
  return static_cast<std::uint32_t>(n0 + n1 + n2 + n3);
}

// common[c] = |a & row c| for count consecutive rows of `words` words each.
NLX_POPCOUNT_CLONES
void and_counts(const std::uint64_t* a, const std::uint64_t* rows, std::size_t words, std::size_t count,
                std::uint32_t* common) {
  for (std::size_t c = 0; c < count; ++c) common[c] = common_bits(a, rows + c * words, words);
}

// out[c] = |a & row c| / sqrt(na * counts[c]); an all-zero row gives NaN.
NLX_POPCOUNT_CLONES
void binary_cosines(const std::uint64_t* a, double na, const std::uint64_t* rows, const std::size_t* counts,
                    std::size_t words, std::size_t count, double* out) {
  for (std::size_t c = 0; c < count; ++c) {
    const std::uint32_t n = common_bits(a, rows + c * words, words);
    out[c] = static_cast<double>(n) / std::sqrt(na * static_cast<double>(counts[c]));
  }
}

bool is_binary(const Eigen::VectorXd& v) {
  return std::all_of(v.data(), v.data() + v.size(), [](double x) { return x == 0.0 || x == 1.0; });
}

}  // namespace

const char* metric_name(Metric metric) {
  return metric == Metric::kCosine ? "cosine" : "csls";
}

double cosine(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kInvalidArgument, "cosine: length mismatch");
  double xy = 0.0;
  double xx = 0.0;
  double yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xy += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  if (xx == 0.0 || yy == 0.0) throw Error(ErrorCode::kInvalidArgument, "cosine: zero-norm vector");
  return xy / (std::sqrt(xx) * std::sqrt(yy));
}

std::vector<SearchHit> top_hits(std::span<const double> scores, std::size_t top_n) {
  const auto better = [](const SearchHit& a, const SearchHit& b) {
    return a.score > b.score || (a.score == b.score && a.index < b.index);
  };
  std::vector<SearchHit> hits;
  if (top_n == 0 || top_n >= scores.size()) {
    hits.reserve(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (!std::isnan(scores[j])) hits.push_back({j, scores[j]});
    }
    std::sort(hits.begin(), hits.end(), better);
    return hits;
  }
  // Bounded heap with the worst kept hit at the front.
  hits.reserve(top_n);
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (std::isnan(scores[j])) continue;
    const SearchHit hit{j, scores[j]};
    if (hits.size() < top_n) {
      hits.push_back(hit);
      std::push_heap(hits.begin(), hits.end(), better);
    } else if (better(hit, hits.front())) {
      std::pop_heap(hits.begin(), hits.end(), better);
      hits.back() = hit;
      std::push_heap(hits.begin(), hits.end(), better);
    }
  }
  std::sort(hits.begin(), hits.end(), better);
  return hits;
}

SearchIndex SearchIndex::build(const PhocConfig& config, std::optional<CcaModel> model,
                               Vocabulary vocab, std::size_t k) {
  if (vocab.size() == 0) throw Error(ErrorCode::kInvalidArgument, "cannot index an empty vocabulary");
  if (model && (model->dimension() != config.dimension() ||
                static_cast<std::size_t>(model->wy.rows()) != config.dimension())) {
    throw Error(ErrorCode::kInvalidArgument,
                "model dimension " + std::to_string(model->dimension()) +
                    " does not match PHOC dimension " + std::to_string(config.dimension()));
  }
  SearchIndex index;
  index.config_ = config;
  index.model_ = std::move(model);
  index.vocab_ = std::move(vocab);
  index.k_ = k;

  const std::size_t m = index.vocab_.size();
  const std::size_t d = config.dimension();
  index.phoc_.assign(m, PhocVector(d));
  index.valid_.assign(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    const auto word = decode_utf8(index.vocab_.tokens[j]);
    if (encodable(word, config)) {
      index.phoc_[j] = encode(word, config);
      index.valid_[j] = true;
    }
  }

  if (index.model_) {
    const auto p = static_cast<Eigen::Index>(index.model_->projection_dim());
    index.projected_.resize(p, static_cast<Eigen::Index>(m));
    parallel_for(m, [&](std::size_t begin, std::size_t end) {
      std::vector<double> reals(d);
      for (std::size_t j = begin; j < end; ++j) {
        auto col = index.projected_.col(static_cast<Eigen::Index>(j));
        if (!index.valid_[j]) {
          col.setZero();
          continue;
        }
        index.phoc_[j].to_reals(reals);
        col = project_candidate(*index.model_, reals);
        const double norm = col.norm();
        if (norm < kZeroNorm) {
          index.valid_[j] = false;
          col.setZero();
        } else {
          col /= norm;
        }
      }
    });
  }
  index.finish_layout();
  index.compute_penalties();
  return index;
}

SearchIndex SearchIndex::from_parts(PhocConfig config, std::optional<CcaModel> model,
                                    Vocabulary vocab, std::vector<PhocVector> phoc,
                                    Eigen::MatrixXd projected, std::vector<double> rk,
                                    std::vector<bool> valid, std::size_t k) {
  const std::size_t m = vocab.size();
  if (phoc.size() != m || rk.size() != m || valid.size() != m ||
      (model && static_cast<std::size_t>(projected.cols()) != m)) {
    throw Error(ErrorCode::kInvalidArgument, "index parts have inconsistent sizes");
  }
  SearchIndex index;
  index.config_ = std::move(config);
  index.model_ = std::move(model);
  index.vocab_ = std::move(vocab);
  index.phoc_ = std::move(phoc);
  index.projected_ = std::move(projected);
  index.rk_ = std::move(rk);
  index.valid_ = std::move(valid);
  index.k_ = k;
  index.finish_layout();
  return index;
}

void SearchIndex::finish_layout() {
  const std::size_t m = size();
  valid_count_ = static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), true));
  row_words_ = (config_.dimension() + 63) / 64;
  bit_counts_.resize(m);
  bit_rows_.assign(m * row_words_, 0);
  for (std::size_t j = 0; j < m; ++j) {
    if (!valid_[j]) {
      bit_counts_[j] = 0;
      continue;
    }
    bit_counts_[j] = phoc_[j].count();
    const auto words = phoc_[j].words();
    std::copy(words.begin(), words.end(), bit_rows_.begin() + static_cast<std::ptrdiff_t>(j * row_words_));
  }
}

std::size_t SearchIndex::effective_k() const {
  return valid_count_ == 0 ? 0 : std::min(k_, valid_count_ - 1);
}

void SearchIndex::compute_penalties() {
  const std::size_t m = size();
  rk_.assign(m, 0.0);
  const std::size_t k = effective_k();
  if (k == 0) return;

  std::vector<std::size_t> ids;
  for (std::size_t j = 0; j < m; ++j) {
    if (valid_[j]) ids.push_back(j);
  }
  const std::size_t n = ids.size();
  const std::size_t blocks = (n + kPenaltyBlock - 1) / kPenaltyBlock;

  // Rows are scored in fixed blocks against cache-sized chunks of candidates;
  // the block layout never depends on the thread count.
  if (binary()) {
    const std::size_t words = row_words_;
    std::vector<std::uint64_t> packed(n * words);
    std::vector<std::size_t> counts(n);
    for (std::size_t c = 0; c < n; ++c) {
      const auto src = row(ids[c]);
      std::copy(src.begin(), src.end(), packed.begin() + static_cast<std::ptrdiff_t>(c * words));
      counts[c] = bit_counts_[ids[c]];
    }
    parallel_for(blocks, [&](std::size_t first_block, std::size_t last_block) {
      std::vector<std::uint32_t> common(kPenaltyChunk);
      std::vector<TopK> tops;
      for (std::size_t b = first_block; b < last_block; ++b) {
        const std::size_t begin = b * kPenaltyBlock;
        const std::size_t end = std::min(n, begin + kPenaltyBlock);
        tops.assign(end - begin, TopK(k));
        for (std::size_t c0 = 0; c0 < n; c0 += kPenaltyChunk) {
          const std::size_t cn = std::min(kPenaltyChunk, n - c0);
          for (std::size_t a = begin; a < end; ++a) {
            and_counts(packed.data() + a * words, packed.data() + c0 * words, words, cn, common.data());
            const auto na = static_cast<double>(counts[a]);
            TopK& top = tops[a - begin];
            // Squared-integer screen against the current floor; the margin
            // only lets extra pairs through to the exact test in push().
            double low = top.floor();
            double bar = low > 0.0 ? low * low * na * (1.0 - 1e-9) : -1.0;
            for (std::size_t c = 0; c < cn; ++c) {
              if (c0 + c == a) continue;
              const auto n = static_cast<double>(common[c]);
              const auto nc = static_cast<double>(counts[c0 + c]);
              if (n * n < bar * nc) continue;
              top.push(n / std::sqrt(na * nc));
              if (top.floor() != low) {
                low = top.floor();
                bar = low > 0.0 ? low * low * na * (1.0 - 1e-9) : -1.0;
              }
            }
          }
        }
        for (std::size_t a = begin; a < end; ++a) rk_[ids[a]] = tops[a - begin].mean();
      }
    });
    return;
  }

  Eigen::MatrixXd packed(projected_.rows(), static_cast<Eigen::Index>(n));
  for (std::size_t c = 0; c < n; ++c) {
    packed.col(static_cast<Eigen::Index>(c)) = projected_.col(static_cast<Eigen::Index>(ids[c]));
  }
  parallel_for(blocks, [&](std::size_t first_block, std::size_t last_block) {
    Eigen::MatrixXd sims;
    std::vector<TopK> tops;
    for (std::size_t b = first_block; b < last_block; ++b) {
      const auto begin = static_cast<Eigen::Index>(b * kPenaltyBlock);
      const auto rows = std::min<Eigen::Index>(kPenaltyBlock, static_cast<Eigen::Index>(n) - begin);
      tops.assign(static_cast<std::size_t>(rows), TopK(k));
      for (Eigen::Index c0 = 0; c0 < static_cast<Eigen::Index>(n); c0 += kPenaltyChunk) {
        const auto cn = std::min<Eigen::Index>(kPenaltyChunk, static_cast<Eigen::Index>(n) - c0);
        // Column r holds row begin + r against the chunk.
        sims.noalias() = packed.middleCols(c0, cn).transpose() * packed.middleCols(begin, rows);
        for (Eigen::Index r = 0; r < rows; ++r) {
          TopK& top = tops[static_cast<std::size_t>(r)];
          const double* col = sims.col(r).data();
          for (Eigen::Index c = 0; c < cn; ++c) {
            if (c0 + c == begin + r) continue;
            top.push(col[c]);
          }
        }
      }
      for (Eigen::Index r = 0; r < rows; ++r) {
        rk_[ids[static_cast<std::size_t>(begin + r)]] = tops[static_cast<std::size_t>(r)].mean();
      }
    }
  });
}

Eigen::VectorXd SearchIndex::query_vector(std::string_view query) const {
  const PhocVector bits = encode(query, config_);
  Eigen::VectorXd reals(static_cast<Eigen::Index>(bits.size()));
  bits.to_reals(std::span<double>(reals.data(), bits.size()));
  if (!model_) return reals;
  Eigen::VectorXd projected = project_query(*model_, std::span<const double>(reals.data(), bits.size()));
  if (projected.norm() < kZeroNorm) {
    throw Error(ErrorCode::kNumeric, "query '" + std::string(query) + "' projects to the zero vector");
  }
  return projected;
}

std::vector<double> SearchIndex::similarities(const Eigen::VectorXd& query) const {
  const std::size_t m = size();
  std::vector<double> sims(m, kNaN);
  const double query_sq = query.squaredNorm();
  if (!(query_sq > 0.0)) throw Error(ErrorCode::kInvalidArgument, "query vector has zero norm");

  if (binary()) {
    if (static_cast<std::size_t>(query.size()) != config_.dimension()) {
      throw Error(ErrorCode::kInvalidArgument, "query vector length does not match the index");
    }
    if (is_binary(query)) {
      PhocVector bits(config_.dimension());
      for (Eigen::Index i = 0; i < query.size(); ++i) {
        if (query(i) == 1.0) bits.set(static_cast<std::size_t>(i));
      }
      // Excluded rows are stored as zeros, so they come out as NaN.
      binary_cosines(bits.words().data(), static_cast<double>(bits.count()), bit_rows_.data(),
                     bit_counts_.data(), row_words_, m, sims.data());
    } else {
      for (std::size_t j = 0; j < m; ++j) {
        if (!valid_[j]) continue;
        double dot = 0.0;
        for (std::size_t i = 0; i < config_.dimension(); ++i) {
          if (phoc_[j].test(i)) dot += query(static_cast<Eigen::Index>(i));
        }
        sims[j] = dot / std::sqrt(query_sq * static_cast<double>(bit_counts_[j]));
      }
    }
    return sims;
  }

  if (query.size() != projected_.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "query vector length does not match the index");
  }
  const Eigen::VectorXd unit = query / std::sqrt(query_sq);
  for (std::size_t j = 0; j < m; ++j) {
    if (valid_[j]) sims[j] = projected_.col(static_cast<Eigen::Index>(j)).dot(unit);
  }
  return sims;
}

double SearchIndex::query_penalty(std::span<const double> sims) const {
  const std::size_t k = effective_k();
  if (k == 0) return 0.0;
  TopK top(k);
  for (double s : sims) {
    if (!std::isnan(s)) top.push(s);
  }
  return top.mean();
}

std::vector<double> SearchIndex::scores(const Eigen::VectorXd& query, Metric metric) const {
  std::vector<double> s = similarities(query);
  if (metric == Metric::kCosine) return s;
  const double penalty = query_penalty(s);
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!std::isnan(s[j])) s[j] = 2.0 * s[j] - penalty - rk_[j];
  }
  return s;
}

double SearchIndex::csls(const Eigen::VectorXd& query, std::size_t j) const {
  if (j >= size()) throw Error(ErrorCode::kInvalidArgument, "candidate index out of range");
  if (!valid_[j]) throw Error(ErrorCode::kInvalidArgument, "candidate is excluded from ranking");
  return scores(query, Metric::kCsls)[j];
}

std::vector<SearchHit> SearchIndex::rank(const Eigen::VectorXd& query, Metric metric,
                                         std::size_t top_n) const {
  const auto s = scores(query, metric);
  return top_hits(s, top_n);
}

std::vector<SearchHit> SearchIndex::search(std::string_view query, Metric metric,
                                           std::size_t top_n) const {
  return rank(query_vector(query), metric, top_n);
}

}  // namespace nlx
