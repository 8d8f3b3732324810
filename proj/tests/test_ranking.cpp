#include <gtest/gtest.h>

#include <random>
#include <set>

#include "nlx/error.hpp"
#include "nlx/parallel.hpp"
#include "nlx/ranking.hpp"
#include "nlx/utf8.hpp"
#include "oracles.hpp"

namespace nlx {
namespace {

std::vector<Candidate> candidates_of(const std::vector<std::string>& words) {
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < words.size(); ++i) out.push_back({"p1", i, words[i], {0, 0, 1, 1}, std::nullopt});
  return out;
}

std::vector<std::string> random_words(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::set<std::string> words;
  while (words.size() < count) {
    std::string w;
    const auto len = 2 + rng() % 9;
    for (std::size_t i = 0; i < len; ++i) w.push_back(static_cast<char>('a' + rng() % 26));
    words.insert(w);
  }
  return {words.begin(), words.end()};
}

Eigen::VectorXd oracle_phoc(const std::string& word, const PhocConfig& config) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(config.dimension()));
  for (auto b : oracle::phoc_bits(decode_utf8(word), config.charset(), config.levels())) {
    v(static_cast<Eigen::Index>(b)) = 1.0;
  }
  return v;
}

CcaModel random_model(std::size_t d, std::size_t p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  CcaModel m;
  m.wx.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(p));
  m.wy.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < m.wx.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.wx.rows(); ++i) {
      m.wx(i, j) = n(rng);
      m.wy(i, j) = n(rng);
    }
  }
  m.mean_x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  m.mean_y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  m.correlations = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(p));
  return m;
}

struct Oracle {
  Eigen::MatrixXd columns;  // scoring-space candidate vectors
  std::vector<double> rk;
};

Oracle projected_oracle(const SearchIndex& index, const CcaModel& model, std::size_t k) {
  Oracle o;
  const auto m = static_cast<Eigen::Index>(index.size());
  o.columns.resize(model.wy.cols(), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    o.columns.col(j) = model.wy.transpose() * oracle_phoc(index.vocab().tokens[static_cast<std::size_t>(j)], index.config());
  }
  o.rk = oracle::rk(o.columns, k);
  return o;
}

std::vector<double> oracle_scores(const Eigen::MatrixXd& columns, const std::vector<double>& rk,
                                  const Eigen::VectorXd& q, std::size_t k, bool csls) {
  std::vector<double> sims;
  for (Eigen::Index j = 0; j < columns.cols(); ++j) sims.push_back(oracle::cos_sim(q, columns.col(j)));
  if (!csls) return sims;
  const double rq = oracle::top_k_mean(sims, k);
  std::vector<double> s(sims.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = 2 * sims[j] - rq - rk[j];
  return s;
}

std::vector<std::size_t> hit_order(const std::vector<SearchHit>& hits) {
  std::vector<std::size_t> out;
  for (const auto& h : hits) out.push_back(h.index);
  return out;
}

TEST(Cosine, Basics) {
  const std::vector<double> a{1, 0, 0};
  const std::vector<double> b{1, 1, 0};
  EXPECT_DOUBLE_EQ(cosine(a, a), 1.0);
  EXPECT_NEAR(cosine(a, b), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(cosine(a, std::vector<double>{-2, 0, 0}), -1.0);
  EXPECT_THROW(cosine(a, std::vector<double>{0, 0, 0}), Error);
  EXPECT_THROW(cosine(a, std::vector<double>{1, 0}), Error);
}

TEST(TopHits, OrderTiesAndNaN) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> s{0.5, 0.9, nan, 0.5, 0.9, 0.1};
  EXPECT_EQ(hit_order(top_hits(s, 0)), (std::vector<std::size_t>{1, 4, 0, 3, 5}));
  EXPECT_EQ(hit_order(top_hits(s, 3)), (std::vector<std::size_t>{1, 4, 0}));
  EXPECT_EQ(top_hits(s, 99).size(), 5u);
}

TEST(SearchIndex, ProjectedMatchesBruteForce) {
  const PhocConfig config = PhocConfig::standard();
  const CcaModel model = random_model(config.dimension(), 32, 7);
  const auto index = SearchIndex::build(config, model, build_vocab(candidates_of(random_words(1000, 1))), 20);
  ASSERT_EQ(index.size(), 1000u);
  ASSERT_EQ(index.effective_k(), 20u);
  const Oracle o = projected_oracle(index, model, 20);
  for (std::size_t j = 0; j < 1000; ++j) EXPECT_NEAR(index.rk()[j], o.rk[j], 1e-12) << j;

  for (const auto& query : random_words(20, 99)) {
    const Eigen::VectorXd q = model.wx.transpose() * oracle_phoc(query, config);
    for (bool csls : {false, true}) {
      const auto want = oracle_scores(o.columns, o.rk, q, 20, csls);
      const auto hits = index.search(query, csls ? Metric::kCsls : Metric::kCosine);
      ASSERT_EQ(hits.size(), 1000u);
      EXPECT_EQ(hit_order(hits), oracle::order_desc(want)) << query;
      for (const auto& h : hits) EXPECT_NEAR(h.score, want[h.index], 1e-12);
    }
  }
}

TEST(SearchIndex, BinaryMatchesBruteForce) {
  const PhocConfig config = PhocConfig::standard();
  const auto index = SearchIndex::build(config, std::nullopt, build_vocab(candidates_of(random_words(300, 2))), 10);
  Eigen::MatrixXd cols(static_cast<Eigen::Index>(config.dimension()), 300);
  for (Eigen::Index j = 0; j < 300; ++j) cols.col(j) = oracle_phoc(index.vocab().tokens[static_cast<std::size_t>(j)], config);
  const auto rk = oracle::rk(cols, 10);
  for (std::size_t j = 0; j < 300; ++j) EXPECT_NEAR(index.rk()[j], rk[j], 1e-12);
  for (const auto& query : random_words(10, 98)) {
    const auto want = oracle_scores(cols, rk, oracle_phoc(query, config), 10, true);
    const auto hits = index.search(query, Metric::kCsls);
    ASSERT_EQ(hits.size(), 300u);
    for (std::size_t i = 0; i < hits.size(); ++i) {
      EXPECT_NEAR(hits[i].score, want[hits[i].index], 1e-12);
      if (i > 0) {
        EXPECT_TRUE(hits[i - 1].score > hits[i].score ||
                    (hits[i - 1].score == hits[i].score && hits[i - 1].index < hits[i].index));
      }
    }
  }
}

TEST(SearchIndex, ZeroNeighborsReducesToCosine) {
  const PhocConfig config = PhocConfig::standard();
  const CcaModel model = random_model(config.dimension(), 24, 8);
  const auto index = SearchIndex::build(config, model, build_vocab(candidates_of(random_words(400, 3))), 0);
  for (double r : index.rk()) EXPECT_EQ(r, 0.0);
  for (const auto& query : random_words(100, 97)) {
    EXPECT_EQ(hit_order(index.search(query, Metric::kCsls)), hit_order(index.search(query, Metric::kCosine)));
  }
}

TEST(SearchIndex, HubIsDemoted) {
  const PhocConfig config(U"abcdef", {1});
  const auto index = SearchIndex::build(config, std::nullopt, build_vocab(candidates_of({"ab", "de", "ad", "f", "ace"})), 1);
  // Vocabulary order: ab, ace, ad, de, f.
  ASSERT_EQ(index.vocab().tokens, (std::vector<std::string>{"ab", "ace", "ad", "de", "f"}));
  EXPECT_NEAR(index.rk()[0], 0.5, 1e-15);
  EXPECT_NEAR(index.rk()[4], 0.0, 1e-15);
  EXPECT_EQ(index.search("abf", Metric::kCosine).front().index, 0u);
  const auto csls = index.search("abf", Metric::kCsls);
  EXPECT_EQ(csls.front().index, 4u);
  EXPECT_NEAR(csls.front().score, 2 / std::sqrt(3.0) - std::sqrt(2.0 / 3.0), 1e-12);
}

TEST(SearchIndex, PenaltyShiftDoesNotChangeOrder) {
  const PhocConfig config = PhocConfig::standard();
  const CcaModel model = random_model(config.dimension(), 16, 9);
  const auto index = SearchIndex::build(config, model, build_vocab(candidates_of(random_words(200, 4))), 5);
  const Eigen::VectorXd q = index.query_vector("haus");
  std::vector<double> shifted = index.rk();
  for (double& r : shifted) r += 0.25;
  const auto moved = SearchIndex::from_parts(index.config(), index.model(), index.vocab(), index.phoc(),
                                             index.projected(), shifted, index.valid(), index.k());
  EXPECT_EQ(hit_order(index.rank(q, Metric::kCsls)), hit_order(moved.rank(q, Metric::kCsls)));
  EXPECT_NEAR(index.csls(q, 3) - moved.csls(q, 3), 0.25, 1e-12);
}

TEST(SearchIndex, QueryScaleInvariance) {
  const PhocConfig config = PhocConfig::standard();
  const CcaModel model = random_model(config.dimension(), 16, 10);
  const auto index = SearchIndex::build(config, model, build_vocab(candidates_of(random_words(200, 5))), 5);
  const Eigen::VectorXd q = index.query_vector("strasse");
  const auto a = index.scores(q, Metric::kCsls);
  const auto b = index.scores(q * 7.5, Metric::kCsls);
  for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-12);
}

TEST(SearchIndex, SingleCandidate) {
  const auto index = SearchIndex::build(PhocConfig::standard(), std::nullopt, build_vocab(candidates_of({"Wien"})), 20);
  EXPECT_EQ(index.effective_k(), 0u);
  EXPECT_EQ(index.rk()[0], 0.0);
  const auto hits = index.search("Wien", Metric::kCsls);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_NEAR(hits[0].score, 2.0, 1e-15);
}

TEST(SearchIndex, ExactMatchRanksFirst) {
  const auto words = random_words(300, 6);
  const auto index = SearchIndex::build(PhocConfig::standard(), std::nullopt, build_vocab(candidates_of(words)), 20);
  for (std::size_t i = 0; i < words.size(); i += 17) {
    const auto hits = index.search(words[i], Metric::kCosine, 1);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(index.vocab().tokens[hits[0].index], words[i]);
    EXPECT_NEAR(hits[0].score, 1.0, 1e-15);
  }
}

TEST(SearchIndex, TopNLimits) {
  const auto index = SearchIndex::build(PhocConfig::standard(), std::nullopt, build_vocab(candidates_of(random_words(50, 7))), 5);
  EXPECT_EQ(index.search("abc", Metric::kCsls, 10).size(), 10u);
  EXPECT_EQ(index.search("abc", Metric::kCsls, 500).size(), 50u);
  auto all = hit_order(index.search("abc", Metric::kCsls));
  all.resize(10);
  EXPECT_EQ(hit_order(index.search("abc", Metric::kCsls, 10)), all);
}

TEST(SearchIndex, IdentityModelMatchesBinaryBackend) {
  const PhocConfig config = PhocConfig::standard();
  const Vocabulary vocab = build_vocab(candidates_of(random_words(150, 8)));
  const auto binary = SearchIndex::build(config, std::nullopt, vocab, 7);
  const auto dense = SearchIndex::build(config, CcaModel::identity(config.dimension()), vocab, 7);
  for (std::size_t j = 0; j < vocab.size(); ++j) EXPECT_NEAR(binary.rk()[j], dense.rk()[j], 1e-12);
  for (const auto& q : random_words(10, 96)) {
    const auto a = binary.scores(binary.query_vector(q), Metric::kCsls);
    const auto b = dense.scores(dense.query_vector(q), Metric::kCsls);
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-12);
  }
}

TEST(SearchIndex, UnencodableTokensAreExcluded) {
  const auto index = SearchIndex::build(PhocConfig::standard(), std::nullopt, build_vocab(candidates_of({"Haus", "###", "Maus"})), 20);
  EXPECT_EQ(index.size(), 3u);
  EXPECT_EQ(index.valid_count(), 2u);
  const auto hits = index.search("Haus", Metric::kCsls);
  ASSERT_EQ(hits.size(), 2u);
  for (const auto& h : hits) EXPECT_NE(index.vocab().tokens[h.index], "###");
  EXPECT_THROW(index.search("§§", Metric::kCosine), Error);
}

TEST(SearchIndex, BuildErrors) {
  EXPECT_THROW(SearchIndex::build(PhocConfig::standard(), std::nullopt, Vocabulary{}, 20), Error);
  EXPECT_THROW(SearchIndex::build(PhocConfig::standard(), CcaModel::identity(10), build_vocab(candidates_of({"a"})), 20), Error);
}

TEST(SearchIndex, BuildIsIndependentOfThreadCount) {
  const PhocConfig config = PhocConfig::standard();
  const CcaModel model = random_model(config.dimension(), 16, 11);
  const Vocabulary vocab = build_vocab(candidates_of(random_words(500, 9)));
  const unsigned before = thread_count();
  set_thread_count(1);
  const auto one = SearchIndex::build(config, model, vocab, 20);
  set_thread_count(4);
  const auto four = SearchIndex::build(config, model, vocab, 20);
  set_thread_count(before);
  EXPECT_EQ(one.rk(), four.rk());
  EXPECT_EQ(one.projected(), four.projected());
}

}  // namespace
}  // namespace nlx
