#pragma once

// Retrieval evaluation over random page folds.
//
// For each fold, half of the pages (rounded down) train the CCA model from
// their (gold, OCR) pairs; the candidates on the other half are indexed, and
// every distinct gold word on the test pages is issued as a query. A
// candidate token is relevant to a query when one of its test-page
// occurrences has that gold transcription (case-sensitive string equality).
// Queries without any relevant candidate are excluded.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlx/corpus.hpp"
#include "nlx/phoc.hpp"
#include "nlx/ranking.hpp"
#include "nlx/stats.hpp"
#include "nlx/subspace.hpp"

namespace nlx {

enum class Method { kEdit, kCcaCsls, kCsls, kCcaCosine, kCosine, kWeightedEdit };

// Short names: edit, cca+csls, csls, cca+cosine, cosine, wedit.
const char* method_name(Method method);
// Display names as in a results table ("CCA and CSLS", ...).
const char* method_title(Method method);
// Comma-separated short names; "all" expands to the five standard methods.
// Throws Error(kInvalidArgument) on unknown or repeated names and on an
// empty list.
std::vector<Method> parse_methods(std::string_view csv);

// PHOC pairs (gold in x, OCR reading in y) from the records whose two sides
// are both encodable; other records are skipped.
TrainingPairSet training_pairs(const std::vector<AlignmentRecord>& records, const PhocConfig& config);

struct Fold {
  std::vector<std::string> train_pages;
  std::vector<std::string> test_pages;
};

struct FoldPlan {
  std::vector<Fold> folds;
  std::uint64_t seed = 0;
};

// Shuffles the sorted page list once per fold; the first floor(n/2) pages
// train. Throws Error(kInvalidArgument) for fewer than two pages or zero folds.
FoldPlan make_fold_plan(std::vector<std::string> pages, std::size_t folds, std::uint64_t seed);

// Mean over the relevant items of precision at each relevant item's rank;
// relevant items missing from the ranking contribute 0. Throws
// Error(kInvalidArgument) for an empty relevant set.
double average_precision(std::span<const std::string> ranking, std::span<const std::string> relevant);

// Same, given relevance flags in rank order and the total relevant count.
double average_precision(const std::vector<bool>& relevant_in_rank_order, std::size_t relevant_total);

struct EvalOptions {
  std::vector<Method> methods;
  std::size_t folds = 20;
  std::uint64_t seed = 0;
  double lambda = kRetrievalLambda;
  std::size_t projection_dim = kRetrievalProjectionDim;  // 0: min(d, pairs - 1); clamped to that
  std::size_t k = kDefaultNeighbors;
  bool occurrence_relevance = false;  // count each relevant occurrence
  PhocConfig config = PhocConfig::standard();
};

struct MethodResult {
  Method method;
  std::vector<double> fold_map;     // one value per evaluated fold
  double mean_map = 0.0;
  double sd_map = 0.0;
  std::vector<double> fold_seconds;  // wall time for the fold's query set
  double mean_seconds = 0.0;
};

struct PairTest {
  Method a;
  Method b;
  TTestResult test;
};

struct EvalReport {
  std::vector<std::size_t> folds;           // indices of evaluated folds
  std::vector<std::size_t> fold_queries;    // query count per evaluated fold
  std::vector<MethodResult> methods;
  std::vector<PairTest> tests;              // every method pair, table order
  std::vector<std::string> warnings;
  double character_error_rate = 0.0;        // of the whole corpus' alignments

  // Table-style text (mAP and t-tests only; deterministic).
  std::string table() const;
  // One JSON object per line: fold, summary and ttest records (deterministic).
  std::string records() const;
  // Wall-clock timing table (varies between runs).
  std::string timing() const;
  // "method<TAB>character_error_rate<TAB>mean_map" lines for plotting.
  std::string plot_data() const;
};

// Throws Error(kInvalidArgument) when the method list is empty or a page has
// no alignment records.
EvalReport run_protocol(const std::vector<Candidate>& tokens,
                        const std::vector<AlignmentRecord>& alignments, const EvalOptions& options);

}  // namespace nlx
