#include <gtest/gtest.h>

#include <chrono>
#include <map>
#include <random>

#include "nlx/editdist.hpp"
#include "nlx/error.hpp"
#include "nlx/noise.hpp"
#include "nlx/utf8.hpp"
#include "oracles.hpp"

namespace nlx {
namespace {

std::vector<std::u32string> all_words(const std::u32string& alphabet, std::size_t max_len) {
  std::vector<std::u32string> out{U""};
  std::vector<std::u32string> layer{U""};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::u32string> next;
    for (const auto& w : layer) {
      for (char32_t c : alphabet) next.push_back(w + c);
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

std::u32string random_word(std::mt19937_64& rng, const std::u32string& alphabet, std::size_t max_len) {
  std::u32string w;
  const auto len = rng() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i) w.push_back(alphabet[rng() % alphabet.size()]);
  return w;
}

TEST(Levenshtein, Examples) {
  EXPECT_EQ(levenshtein(std::u32string_view(U"Wien"), U"Wien"), 0u);
  EXPECT_EQ(levenshtein(std::u32string_view(U""), U"abc"), 3u);
  EXPECT_EQ(levenshtein(std::u32string_view(U"beard"), U"bread"), 2u);
  EXPECT_EQ(levenshtein(std::string_view("Straße"), std::string_view("Strasse")), 2u);
  EXPECT_EQ(levenshtein(std::string_view("ab"), std::string_view("ba")), 2u);
}

TEST(Levenshtein, MatchesRecursiveOracleExhaustively) {
  const auto words = all_words(U"ab", 4);
  ASSERT_EQ(words.size(), 31u);
  for (const auto& s : words) {
    for (const auto& t : words) EXPECT_EQ(levenshtein(s, t), oracle::edit_distance(s, t));
  }
}

TEST(Levenshtein, MetricAxiomsAndBounds) {
  std::mt19937_64 rng(5);
  const std::u32string alphabet = U"abcä";
  for (int i = 0; i < 10000; ++i) {
    const auto a = random_word(rng, alphabet, 8);
    const auto b = random_word(rng, alphabet, 8);
    const auto c = random_word(rng, alphabet, 8);
    const auto ab = levenshtein(a, b);
    EXPECT_EQ(ab, levenshtein(b, a));
    EXPECT_EQ(ab == 0, a == b);
    EXPECT_LE(levenshtein(a, c), ab + levenshtein(b, c));
    const auto diff = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
    EXPECT_GE(ab, diff);
    EXPECT_LE(ab, std::max(a.size(), b.size()));
  }
}

TEST(Levenshtein, RoughlyQuadratic) {
  auto time_for = [](std::size_t n) {
    std::mt19937_64 rng(n);
    std::u32string a, b;
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(U'a' + static_cast<char32_t>(rng() % 4));
      b.push_back(U'a' + static_cast<char32_t>(rng() % 4));
    }
    const auto start = std::chrono::steady_clock::now();
    std::size_t sink = 0;
    for (int r = 0; r < 3; ++r) sink += levenshtein(a, b);
    EXPECT_GT(sink, 0u);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const double small = time_for(1500);
  const double large = time_for(3000);
  // Doubling n should cost about 4x; allow a wide band for timer noise.
  EXPECT_GT(large / small, 2.0);
  EXPECT_LT(large / small, 8.0);
}

TEST(WeightedLevenshtein, UniformCostsEqualUnweighted) {
  std::mt19937_64 rng(6);
  const CostTable uniform;
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_word(rng, U"abcde", 10);
    const auto b = random_word(rng, U"abcde", 10);
    EXPECT_EQ(weighted_levenshtein(a, b, uniform), static_cast<double>(levenshtein(a, b)));
  }
}

TEST(WeightedLevenshtein, CheapSubstitutions) {
  CostTable costs;
  costs.set_substitution(U'a', U'b', 0.1);
  EXPECT_NEAR(weighted_levenshtein(U"aa", U"bb", costs), 0.2, 1e-15);
  EXPECT_NEAR(weighted_levenshtein(U"bb", U"aa", costs), 2.0, 1e-15);
}

TEST(WeightedLevenshtein, MatchesExhaustiveOracleOnRandomTables) {
  const std::u32string alphabet = U"xyz";
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    CostTable costs;
    std::map<std::pair<char32_t, char32_t>, double> sub;
    std::map<char32_t, double> ins, del;
    for (char32_t a : alphabet) {
      ins[a] = u(rng);
      del[a] = u(rng);
      costs.set_insertion(a, ins[a]);
      costs.set_deletion(a, del[a]);
      for (char32_t b : alphabet) {
        if (a == b) continue;
        sub[{a, b}] = u(rng);
        costs.set_substitution(a, b, sub[{a, b}]);
      }
    }
    const auto words = all_words(alphabet, 5);
    for (int i = 0; i < 300; ++i) {
      const auto& s = words[rng() % words.size()];
      const auto& t = words[rng() % words.size()];
      const double want = oracle::weighted_edit(
          s, t, [&](char32_t a, char32_t b) { return sub.at({a, b}); }, [&](char32_t c) { return ins.at(c); },
          [&](char32_t c) { return del.at(c); });
      EXPECT_NEAR(weighted_levenshtein(s, t, costs), want, 1e-12);
    }
  }
}

TEST(CostTable, Validation) {
  CostTable t;
  EXPECT_THROW(t.set_substitution(U'a', U'b', -1.0), Error);
  EXPECT_THROW(t.set_substitution(U'a', U'a', 0.5), Error);
  EXPECT_NO_THROW(t.set_substitution(U'a', U'a', 0.0));
  EXPECT_THROW(t.set_insertion(U'a', std::nan("")), Error);
  EXPECT_THROW(t.set_defaults(1.0, INFINITY, 1.0), Error);
  EXPECT_EQ(t.substitution(U'q', U'q'), 0.0);
  EXPECT_EQ(t.substitution(U'q', U'r'), 1.0);
}

TEST(CostTable, TextRoundTrip) {
  CostTable t;
  t.set_defaults(0.9, 1.1, 1.2);
  t.set_substitution(U'ü', U'u', 0.125);
  t.set_insertion(U'ß', 0.3);
  t.set_deletion(U'\t', 0.7);
  const auto back = CostTable::from_text(t.to_text());
  EXPECT_EQ(back, t);
  EXPECT_THROW(CostTable::from_text("sub U+0061 0.5\n"), Error);
  EXPECT_THROW(CostTable::from_text("frob 1\n"), Error);
}

TEST(EditScript, CostEqualsDistance) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto s = random_word(rng, U"abc", 7);
    const auto t = random_word(rng, U"abc", 7);
    std::size_t cost = 0;
    std::u32string rebuilt;
    for (const auto& step : edit_script(s, t)) {
      if (step.op != EditOp::kMatch) ++cost;
      if (step.op != EditOp::kDelete) rebuilt.push_back(step.to);
    }
    EXPECT_EQ(cost, levenshtein(s, t));
    EXPECT_EQ(rebuilt, t);
  }
}

TEST(ConfusionMatrix, IdenticalPairsGiveDefaults) {
  const std::vector<std::pair<std::string, std::string>> pairs{{"Haus", "Haus"}, {"Wien", "Wien"}};
  EXPECT_EQ(estimate_confusion_matrix(pairs), CostTable());
  EXPECT_THROW(estimate_confusion_matrix(std::vector<std::pair<std::string, std::string>>{}), Error);
}

TEST(ConfusionMatrix, SingleObservedEventIsCheapest) {
  const std::vector<std::pair<std::string, std::string>> pairs{{"cat", "cal"}};
  const CostTable t = estimate_confusion_matrix(pairs);
  ASSERT_EQ(t.substitutions().size(), 1u);
  // One event, one event type: -log(2/3) / -log(1/3).
  EXPECT_NEAR(t.substitution(U't', U'l'), std::log(1.5) / std::log(3.0), 1e-15);
  EXPECT_EQ(t.substitution(U'l', U't'), 1.0);
  EXPECT_EQ(t.insertion(U'x'), 1.0);
}

TEST(ConfusionMatrix, RecoversChannelFrequencyOrdering) {
  NoiseChannel ch;
  ch.substitution = 0.3;
  ch.confusion[U'e'] = {{U'c', 6.0}, {U'o', 3.0}, {U'a', 1.0}};
  ch.confusion[U'n'] = {{U'u', 1.0}};
  std::vector<std::pair<std::string, std::string>> pairs;
  std::map<std::pair<char32_t, char32_t>, std::size_t> counts;
  for (std::uint64_t i = 0; i < 100; ++i) {
    ch.seed = i;
    const std::u32string gold = U"ennene";
    const auto ocr = corrupt(gold, ch);
    ASSERT_EQ(ocr.size(), gold.size());
    for (std::size_t k = 0; k < gold.size(); ++k) {
      if (ocr[k] != gold[k]) ++counts[{ocr[k], gold[k]}];
    }
    pairs.emplace_back(encode_utf8(ocr), encode_utf8(gold));
  }
  const CostTable t = estimate_confusion_matrix(pairs);
  ASSERT_GE(counts.size(), 3u);
  for (const auto& [a, ca] : counts) {
    for (const auto& [b, cb] : counts) {
      if (ca < cb) EXPECT_GT(t.substitution(a.first, a.second), t.substitution(b.first, b.second));
    }
  }
}

TEST(EditRanking, OrderingAndTies) {
  const std::vector<std::u32string> vocab{U"Haus", U"Maus", U"Hans", U"Haus", U"Baum"};
  const auto r = rank_by_edit_distance(U"Haus", vocab);
  ASSERT_EQ(r.hits.size(), 5u);
  EXPECT_EQ(r.hits[0].index, 0u);
  EXPECT_EQ(r.hits[1].index, 3u);
  EXPECT_EQ(r.hits[2].index, 1u);
  EXPECT_EQ(r.hits[3].index, 2u);
  EXPECT_EQ(r.hits[4].distance, 2.0);
  EXPECT_EQ(rank_by_edit_distance(U"Haus", vocab, 2).hits.size(), 2u);
  EXPECT_GE(r.seconds, 0.0);
  const std::vector<std::u32string> one{U"Zeitung"};
  EXPECT_EQ(rank_by_edit_distance(U"a", one).hits.size(), 1u);
}

TEST(EditRanking, MatchesRecomputeAndSort) {
  std::mt19937_64 rng(9);
  std::vector<std::u32string> vocab;
  for (int i = 0; i < 1000; ++i) vocab.push_back(random_word(rng, U"abcdefg", 9));
  const std::u32string q = U"bacfed";
  std::vector<double> neg;
  for (const auto& w : vocab) neg.push_back(-static_cast<double>(oracle::edit_distance(q, w)));
  const auto want = oracle::order_desc(neg);
  const auto got = rank_by_edit_distance(q, vocab);
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(got.hits[i].index, want[i]);
}

TEST(EditRanking, WeightedScoresCandidateToQuery) {
  CostTable costs;
  costs.set_substitution(U'c', U'e', 0.1);
  const std::vector<std::u32string> vocab{U"Hcrr", U"Herr", U"Hxrr"};
  const auto r = rank_by_weighted_edit_distance(U"Herr", vocab, costs);
  EXPECT_EQ(r.hits[0].index, 1u);
  EXPECT_EQ(r.hits[1].index, 0u);
  EXPECT_NEAR(r.hits[1].distance, 0.1, 1e-15);
}

}  // namespace
}  // namespace nlx
