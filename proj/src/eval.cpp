#include "nlx/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "nlx/editdist.hpp"
#include "nlx/error.hpp"
#include "nlx/parallel.hpp"
#include "nlx/utf8.hpp"

namespace nlx {

namespace {

constexpr Method kAllMethods[] = {Method::kEdit, Method::kCcaCsls, Method::kCsls, Method::kCcaCosine,
                                  Method::kCosine, Method::kWeightedEdit};

using Clock = std::chrono::steady_clock;
using TokenKey = std::pair<std::string, std::uint64_t>;

bool uses_cca(Method m) { return m == Method::kCcaCsls || m == Method::kCcaCosine; }
bool uses_identity(Method m) { return m == Method::kCsls || m == Method::kCosine; }
Metric metric_of(Method m) {
  return (m == Method::kCcaCsls || m == Method::kCsls) ? Metric::kCsls : Metric::kCosine;
}

struct FoldOutcome {
  bool evaluated = false;
  std::vector<std::string> warnings;
  std::size_t queries = 0;
  std::vector<double> map;      // per method
  std::vector<double> seconds;  // per method
};

struct Corpus {
  const std::vector<Candidate>& tokens;
  const std::vector<AlignmentRecord>& alignments;
  std::map<TokenKey, std::string> gold;  // (page, word_id) -> gold text
};

FoldOutcome evaluate_fold(const Corpus& corpus, const Fold& fold, const EvalOptions& opt) {
  FoldOutcome out;
  const std::set<std::string> train(fold.train_pages.begin(), fold.train_pages.end());
  const std::set<std::string> test(fold.test_pages.begin(), fold.test_pages.end());
  const auto& config = opt.config;
  const std::size_t d = config.dimension();

  const bool need_cca = std::any_of(opt.methods.begin(), opt.methods.end(), uses_cca);
  const bool need_identity = std::any_of(opt.methods.begin(), opt.methods.end(), uses_identity);
  const bool need_costs = std::find(opt.methods.begin(), opt.methods.end(), Method::kWeightedEdit) !=
                          opt.methods.end();

  // Training material from the training pages only.
  std::vector<AlignmentRecord> train_records;
  std::vector<std::pair<std::string, std::string>> train_pairs;
  for (const auto& a : corpus.alignments) {
    if (!train.contains(a.page_id)) continue;
    train_pairs.emplace_back(a.ocr_text, a.gold_text);
    if (need_cca) train_records.push_back(a);
  }

  std::optional<CcaModel> model;
  if (need_cca) {
    const TrainingPairSet pairs = training_pairs(train_records, config);
    const auto n = static_cast<std::size_t>(pairs.x.cols());
    try {
      std::size_t p = opt.projection_dim;
      if (p != 0 && n > 1) p = std::min<std::size_t>(p, std::min<std::size_t>(d, n - 1));
      model = fit_cca(pairs, opt.lambda, p).model;
    } catch (const Error& e) {
      out.warnings.push_back(std::string("CCA fit failed: ") + e.what());
      return out;
    }
  }
  const CostTable costs = need_costs && !train_pairs.empty() ? estimate_confusion_matrix(train_pairs)
                                                             : CostTable();

  std::vector<Candidate> test_tokens;
  for (const auto& c : corpus.tokens) {
    if (test.contains(c.page_id)) test_tokens.push_back(c);
  }
  if (test_tokens.empty()) {
    out.warnings.push_back("no candidates on the test pages");
    return out;
  }
  Vocabulary vocab = build_vocab(test_tokens);
  const std::size_t m = vocab.size();

  // Gold transcription of every occurrence (empty when unaligned).
  std::vector<std::vector<std::string>> occurrence_gold(m);
  std::map<std::string, std::vector<std::size_t>> relevant_tokens;
  std::map<std::string, std::size_t> relevant_occurrences;
  for (std::size_t j = 0; j < m; ++j) {
    std::set<std::string> golds;
    for (const auto& o : vocab.postings[j]) {
      const auto it = corpus.gold.find({o.page_id, o.word_id});
      occurrence_gold[j].push_back(it == corpus.gold.end() ? std::string() : it->second);
      if (it != corpus.gold.end()) {
        golds.insert(it->second);
        ++relevant_occurrences[it->second];
      }
    }
    for (const auto& g : golds) relevant_tokens[g].push_back(j);
  }
  std::vector<std::string> queries;
  for (const auto& [g, tokens] : relevant_tokens) queries.push_back(g);
  if (queries.empty()) {
    out.warnings.push_back("no valid queries");
    return out;
  }

  std::vector<std::u32string> vocab32;
  vocab32.reserve(m);
  for (const auto& t : vocab.tokens) vocab32.push_back(decode_utf8(t));

  std::optional<SearchIndex> identity_index;
  std::optional<SearchIndex> cca_index;
  if (need_identity) identity_index = SearchIndex::build(config, std::nullopt, vocab, opt.k);
  if (need_cca) cca_index = SearchIndex::build(config, model, vocab, opt.k);

  auto score_ranking = [&](const std::string& query, const std::vector<std::size_t>& order) {
    if (!opt.occurrence_relevance) {
      std::vector<bool> flags(m, false);
      for (std::size_t j : relevant_tokens.at(query)) flags[j] = true;
      std::vector<bool> ranked;
      ranked.reserve(order.size());
      for (std::size_t j : order) ranked.push_back(flags[j]);
      return average_precision(ranked, relevant_tokens.at(query).size());
    }
    std::vector<bool> ranked;
    for (std::size_t j : order) {
      for (const auto& g : occurrence_gold[j]) ranked.push_back(g == query);
    }
    return average_precision(ranked, relevant_occurrences.at(query));
  };

  out.queries = queries.size();
  for (Method method : opt.methods) {
    double seconds = 0.0;
    double ap_sum = 0.0;
    for (const auto& query : queries) {
      std::vector<std::size_t> order;
      const auto start = Clock::now();
      if (method == Method::kEdit || method == Method::kWeightedEdit) {
        const auto q = decode_utf8(query);
        const EditRanking r = method == Method::kEdit ? rank_by_edit_distance(q, vocab32)
                                                      : rank_by_weighted_edit_distance(q, vocab32, costs);
        order.reserve(r.hits.size());
        for (const auto& h : r.hits) order.push_back(h.index);
      } else {
        const SearchIndex& index = uses_cca(method) ? *cca_index : *identity_index;
        try {
          const auto hits = index.search(query, metric_of(method));
          order.reserve(hits.size());
          for (const auto& h : hits) order.push_back(h.index);
        } catch (const Error&) {
          // Un-encodable query: nothing is retrieved.
        }
      }
      seconds += std::chrono::duration<double>(Clock::now() - start).count();
      ap_sum += score_ranking(query, order);
    }
    out.map.push_back(ap_sum / static_cast<double>(queries.size()));
    out.seconds.push_back(seconds);
  }
  out.evaluated = true;
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string scientific(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << v;
  return s.str();
}

}  // namespace

TrainingPairSet training_pairs(const std::vector<AlignmentRecord>& records, const PhocConfig& config) {
  std::vector<PhocVector> gold_bits;
  std::vector<PhocVector> ocr_bits;
  for (const auto& a : records) {
    const auto g = decode_utf8(a.gold_text);
    const auto o = decode_utf8(a.ocr_text);
    if (!encodable(g, config) || !encodable(o, config)) continue;
    gold_bits.push_back(encode(g, config));
    ocr_bits.push_back(encode(o, config));
  }
  const std::size_t d = config.dimension();
  const auto n = static_cast<Eigen::Index>(gold_bits.size());
  TrainingPairSet pairs;
  pairs.x.resize(static_cast<Eigen::Index>(d), n);
  pairs.y.resize(static_cast<Eigen::Index>(d), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gold_bits[static_cast<std::size_t>(i)].to_reals({pairs.x.col(i).data(), d});
    ocr_bits[static_cast<std::size_t>(i)].to_reals({pairs.y.col(i).data(), d});
  }
  return pairs;
}

const char* method_name(Method method) {
  switch (method) {
    case Method::kEdit: return "edit";
    case Method::kCcaCsls: return "cca+csls";
    case Method::kCsls: return "csls";
    case Method::kCcaCosine: return "cca+cosine";
    case Method::kCosine: return "cosine";
    case Method::kWeightedEdit: return "wedit";
  }
  return "?";
}

const char* method_title(Method method) {
  switch (method) {
    case Method::kEdit: return "Edit distance";
    case Method::kCcaCsls: return "CCA and CSLS";
    case Method::kCsls: return "CSLS";
    case Method::kCcaCosine: return "CCA and Cosine";
    case Method::kCosine: return "Cosine";
    case Method::kWeightedEdit: return "Weighted edit distance";
  }
  return "?";
}

std::vector<Method> parse_methods(std::string_view csv) {
  std::vector<Method> methods;
  auto add = [&](Method m) {
    if (std::find(methods.begin(), methods.end(), m) != methods.end()) {
      throw Error(ErrorCode::kInvalidArgument, std::string("method listed twice: ") + method_name(m));
    }
    methods.push_back(m);
  };
  while (!csv.empty()) {
    const auto comma = csv.find(',');
    const std::string_view name = csv.substr(0, comma);
    csv.remove_prefix(comma == std::string_view::npos ? csv.size() : comma + 1);
    if (name == "all") {
      for (Method m : {Method::kEdit, Method::kCcaCsls, Method::kCsls, Method::kCcaCosine, Method::kCosine}) {
        add(m);
      }
      continue;
    }
    bool found = false;
    for (Method m : kAllMethods) {
      if (name == method_name(m)) {
        add(m);
        found = true;
      }
    }
    if (!found) {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown method '" + std::string(name) +
                      "' (expected edit, cca+csls, csls, cca+cosine, cosine, wedit, all)");
    }
  }
  if (methods.empty()) throw Error(ErrorCode::kInvalidArgument, "no evaluation methods given");
  // Table order.
  std::stable_sort(methods.begin(), methods.end(),
                   [](Method a, Method b) { return static_cast<int>(a) < static_cast<int>(b); });
  return methods;
}

FoldPlan make_fold_plan(std::vector<std::string> pages, std::size_t folds, std::uint64_t seed) {
  std::sort(pages.begin(), pages.end());
  pages.erase(std::unique(pages.begin(), pages.end()), pages.end());
  if (pages.size() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two pages for folds");
  if (folds == 0) throw Error(ErrorCode::kInvalidArgument, "fold count must be positive");
  FoldPlan plan;
  plan.seed = seed;
  const std::size_t train_count = pages.size() / 2;
  for (std::size_t f = 0; f < folds; ++f) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(f), 0x464f4c44U};
    std::mt19937_64 engine(seq);
    std::vector<std::string> order = pages;
    // Fisher-Yates with raw engine output.
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(engine() % (i + 1));
      std::swap(order[i], order[j]);
    }
    Fold fold;
    fold.train_pages.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_count));
    fold.test_pages.assign(order.begin() + static_cast<std::ptrdiff_t>(train_count), order.end());
    std::sort(fold.train_pages.begin(), fold.train_pages.end());
    std::sort(fold.test_pages.begin(), fold.test_pages.end());
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

double average_precision(const std::vector<bool>& relevant_in_rank_order, std::size_t relevant_total) {
  if (relevant_total == 0) throw Error(ErrorCode::kInvalidArgument, "average precision needs a relevant item");
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < relevant_in_rank_order.size(); ++i) {
    if (!relevant_in_rank_order[i]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(relevant_total);
}

double average_precision(std::span<const std::string> ranking, std::span<const std::string> relevant) {
  const std::set<std::string> wanted(relevant.begin(), relevant.end());
  std::vector<bool> flags;
  flags.reserve(ranking.size());
  for (const auto& r : ranking) flags.push_back(wanted.contains(r));
  return average_precision(flags, wanted.size());
}

EvalReport run_protocol(const std::vector<Candidate>& tokens,
                        const std::vector<AlignmentRecord>& alignments, const EvalOptions& options) {
  if (options.methods.empty()) throw Error(ErrorCode::kInvalidArgument, "no evaluation methods given");
  Corpus corpus{tokens, alignments, {}};
  std::set<std::string> aligned_pages;
  std::size_t edits = 0;
  std::size_t gold_chars = 0;
  for (const auto& a : alignments) {
    corpus.gold[{a.page_id, a.word_id}] = a.gold_text;
    aligned_pages.insert(a.page_id);
    const auto gold = decode_utf8(a.gold_text);
    edits += levenshtein(gold, decode_utf8(a.ocr_text));
    gold_chars += gold.size();
  }
  std::vector<std::string> pages;
  for (const auto& c : tokens) pages.push_back(c.page_id);
  std::sort(pages.begin(), pages.end());
  pages.erase(std::unique(pages.begin(), pages.end()), pages.end());
  for (const auto& p : pages) {
    if (!aligned_pages.contains(p)) {
      throw Error(ErrorCode::kInvalidArgument, "page '" + p + "' has no alignment records");
    }
  }
  const FoldPlan plan = make_fold_plan(pages, options.folds, options.seed);

  std::vector<FoldOutcome> outcomes(plan.folds.size());
  parallel_for(plan.folds.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f) outcomes[f] = evaluate_fold(corpus, plan.folds[f], options);
  });

  EvalReport report;
  report.character_error_rate =
      gold_chars == 0 ? 0.0 : static_cast<double>(edits) / static_cast<double>(gold_chars);
  for (Method m : options.methods) report.methods.push_back({m, {}, 0.0, 0.0, {}, 0.0});
  for (std::size_t f = 0; f < outcomes.size(); ++f) {
    for (const auto& w : outcomes[f].warnings) {
      report.warnings.push_back("fold " + std::to_string(f) + ": " + w);
    }
    if (!outcomes[f].evaluated) {
      report.warnings.push_back("fold " + std::to_string(f) + " skipped");
      continue;
    }
    report.folds.push_back(f);
    report.fold_queries.push_back(outcomes[f].queries);
    for (std::size_t i = 0; i < report.methods.size(); ++i) {
      report.methods[i].fold_map.push_back(outcomes[f].map[i]);
      report.methods[i].fold_seconds.push_back(outcomes[f].seconds[i]);
    }
  }
  for (auto& r : report.methods) {
    r.mean_map = mean(r.fold_map);
    r.sd_map = sample_sd(r.fold_map);
    r.mean_seconds = mean(r.fold_seconds);
  }
  if (report.folds.size() >= 2) {
    for (std::size_t i = 0; i < report.methods.size(); ++i) {
      for (std::size_t j = i + 1; j < report.methods.size(); ++j) {
        report.tests.push_back({report.methods[i].method, report.methods[j].method,
                                paired_t_test(report.methods[i].fold_map, report.methods[j].fold_map)});
      }
    }
  }
  return report;
}

std::string EvalReport::table() const {
  std::ostringstream out;
  out << "Search results (" << folds.size() << " folds)\n";
  out << std::left << std::setw(24) << "Method" << std::setw(6) << "PHOC" << std::setw(5) << "CCA"
      << std::setw(10) << "Distance" << "mAP (% +- s.d.)\n";
  for (const auto& r : methods) {
    const bool edit = r.method == Method::kEdit || r.method == Method::kWeightedEdit;
    out << std::left << std::setw(24) << method_title(r.method) << std::setw(6) << (edit ? "no" : "yes")
        << std::setw(5) << (uses_cca(r.method) ? "yes" : "no") << std::setw(10)
        << (edit ? "edit" : metric_name(metric_of(r.method))) << fixed(100.0 * r.mean_map, 2) << " +- "
        << fixed(100.0 * r.sd_map, 2) << '\n';
  }
  if (!tests.empty()) {
    out << "\nPaired t-tests (alpha = 0.05)\n";
    out << std::left << std::setw(44) << "Pair" << std::setw(12) << "t" << std::setw(12) << "p-value"
        << "Reject H0?\n";
    for (const auto& pt : tests) {
      const std::string pair = std::string(method_title(pt.a)) + " <-> " + method_title(pt.b);
      out << std::left << std::setw(44) << pair << std::setw(12) << fixed(pt.test.t, 4) << std::setw(12)
          << scientific(pt.test.p) << (pt.test.reject ? "Yes" : "No")
          << (pt.test.degenerate ? " (zero variance)" : "") << '\n';
    }
  }
  for (const auto& w : warnings) out << "warning: " << w << '\n';
  return out.str();
}

std::string EvalReport::records() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    for (const auto& r : methods) {
      nlohmann::ordered_json rec;
      rec["record"] = "fold";
      rec["fold"] = folds[i];
      rec["method"] = method_name(r.method);
      rec["queries"] = fold_queries[i];
      rec["map"] = r.fold_map[i];
      out << rec.dump() << '\n';
    }
  }
  for (const auto& r : methods) {
    nlohmann::ordered_json rec;
    rec["record"] = "summary";
    rec["method"] = method_name(r.method);
    rec["folds"] = r.fold_map.size();
    rec["mean_map"] = r.mean_map;
    rec["sd_map"] = r.sd_map;
    out << rec.dump() << '\n';
  }
  for (const auto& pt : tests) {
    nlohmann::ordered_json rec;
    rec["record"] = "ttest";
    rec["a"] = method_name(pt.a);
    rec["b"] = method_name(pt.b);
    rec["t"] = std::isinf(pt.test.t) ? nlohmann::ordered_json(pt.test.t > 0 ? "inf" : "-inf")
                                     : nlohmann::ordered_json(pt.test.t);
    rec["p"] = pt.test.p;
    rec["df"] = pt.test.df;
    rec["reject"] = pt.test.reject;
    rec["degenerate"] = pt.test.degenerate;
    out << rec.dump() << '\n';
  }
  return out.str();
}

std::string EvalReport::timing() const {
  std::ostringstream out;
  out << std::left << std::setw(24) << "Method" << "Mean query-set time per fold (s)\n";
  for (const auto& r : methods) {
    out << std::left << std::setw(24) << method_title(r.method) << fixed(r.mean_seconds, 4) << '\n';
  }
  return out.str();
}

std::string EvalReport::plot_data() const {
  std::ostringstream out;
  out.precision(17);
  for (const auto& r : methods) {
    out << method_name(r.method) << '\t' << character_error_rate << '\t' << r.mean_map << '\n';
  }
  return out.str();
}

}  // namespace nlx
