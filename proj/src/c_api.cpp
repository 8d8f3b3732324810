#include "nlx/nlx.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlx/corpus.hpp"
#include "nlx/editdist.hpp"
#include "nlx/error.hpp"
#include "nlx/eval.hpp"
#include "nlx/index_file.hpp"
#include "nlx/noise.hpp"
#include "nlx/parallel.hpp"
#include "nlx/phoc.hpp"
#include "nlx/ranking.hpp"
#include "nlx/subspace.hpp"
#include "nlx/utf8.hpp"

struct nlx_phoc_config {
  nlx::PhocConfig config;
};

struct nlx_model {
  nlx::ModelFile file;
  std::size_t pairs = 0;
  std::vector<std::string> warnings;
};

struct nlx_index {
  nlx::SearchIndex index;
  std::vector<std::u32string> tokens32;
};

struct nlx_results {
  nlx_metric metric = NLX_METRIC_COSINE;
  std::vector<std::string> tokens;
  std::vector<double> scores;
  std::vector<std::vector<nlx::Occurrence>> occurrences;
};

struct nlx_eval_report {
  nlx::EvalReport report;
};

namespace {

thread_local std::string last_error;

nlx_status status_of(nlx::ErrorCode code) {
  switch (code) {
    case nlx::ErrorCode::kInvalidArgument:
    case nlx::ErrorCode::kDomain:
      return NLX_ERR_INVALID_ARGUMENT;
    case nlx::ErrorCode::kEncoding:
      return NLX_ERR_ENCODING;
    case nlx::ErrorCode::kParse:
      return NLX_ERR_PARSE;
    case nlx::ErrorCode::kIo:
      return NLX_ERR_IO;
    case nlx::ErrorCode::kNumeric:
      return NLX_ERR_NUMERIC;
    case nlx::ErrorCode::kChecksum:
      return NLX_ERR_CHECKSUM;
    case nlx::ErrorCode::kTruncated:
      return NLX_ERR_TRUNCATED;
    case nlx::ErrorCode::kVersion:
      return NLX_ERR_VERSION;
  }
  return NLX_ERR_INTERNAL;
}

nlx_status fail(nlx_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
nlx_status guarded(Fn&& fn) {
  last_error.clear();
  try {
    return fn();
  } catch (const nlx::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(NLX_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NLX_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NLX_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

std::string line_errors_text(const std::string& path, const std::vector<nlx::LineError>& errors) {
  std::ostringstream msg;
  msg << path << ": " << errors.size() << " malformed line(s)";
  const std::size_t shown = std::min<std::size_t>(errors.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) {
    msg << "\n  line " << errors[i].line << ": " << errors[i].message;
  }
  if (shown < errors.size()) msg << "\n  ...";
  return msg.str();
}

// Reads and validates a token file; parse problems become NLX_ERR_PARSE.
nlx_status load_tokens(const char* path, std::vector<nlx::Candidate>& out, const char* report_path) {
  auto parsed = nlx::read_tokens_file(path);
  if (parsed.ok() && parsed.items.empty()) {
    parsed.errors.push_back({1, "no tokens"});
  }
  if (!parsed.ok()) {
    std::string message = line_errors_text(path, parsed.errors);
    if (report_path != nullptr) {
      std::ofstream report(report_path, std::ios::binary);
      nlx::write_line_errors(report, parsed.errors);
      if (!report) return fail(NLX_ERR_IO, std::string("cannot write error report '") + report_path + "'");
      message += "\nfull report: ";
      message += report_path;
    }
    return fail(NLX_ERR_PARSE, message);
  }
  out = std::move(parsed.items);
  return NLX_OK;
}

nlx_status load_alignments(const char* path, std::vector<nlx::AlignmentRecord>& out) {
  auto parsed = nlx::read_alignments_file(path);
  if (!parsed.ok()) return fail(NLX_ERR_PARSE, line_errors_text(path, parsed.errors));
  out = std::move(parsed.items);
  return NLX_OK;
}

nlx_status check_dangling(const std::vector<nlx::Candidate>& tokens,
                          const std::vector<nlx::AlignmentRecord>& records) {
  const auto dangling = nlx::dangling_alignments(tokens, records);
  if (dangling.empty()) return NLX_OK;
  std::string message = std::to_string(dangling.size()) + " alignment record(s) do not match a token:";
  for (const auto& d : dangling) message += "\n  " + d;
  return fail(NLX_ERR_PARSE, message);
}

const nlx::Occurrence* occurrence_at(const nlx_results* r, std::size_t i, std::size_t j) {
  if (r == nullptr || i >= r->occurrences.size() || j >= r->occurrences[i].size()) return nullptr;
  return &r->occurrences[i][j];
}

}  // namespace

extern "C" {

const char* nlx_version(void) { return "1.0.0"; }

const char* nlx_status_string(nlx_status status) {
  switch (status) {
    case NLX_OK: return "ok";
    case NLX_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NLX_ERR_PARSE: return "parse error";
    case NLX_ERR_ENCODING: return "encoding error";
    case NLX_ERR_IO: return "I/O error";
    case NLX_ERR_NUMERIC: return "numerical failure";
    case NLX_ERR_CHECKSUM: return "checksum mismatch";
    case NLX_ERR_TRUNCATED: return "truncated data";
    case NLX_ERR_VERSION: return "unsupported format version";
    case NLX_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* nlx_last_error(void) { return last_error.c_str(); }

void nlx_set_threads(unsigned threads) { nlx::set_thread_count(threads); }

void nlx_string_free(char* s) { delete[] s; }

nlx_status nlx_phoc_config_standard(nlx_phoc_config** out) {
  return guarded([&] {
    if (out == nullptr) return fail(NLX_ERR_INVALID_ARGUMENT, "out is null");
    *out = new nlx_phoc_config{nlx::PhocConfig::standard()};
    return NLX_OK;
  });
}

nlx_status nlx_phoc_config_create(const char* charset_utf8, const int* levels, size_t level_count,
                                  int case_sensitive, nlx_phoc_config** out) {
  return guarded([&] {
    if (out == nullptr || charset_utf8 == nullptr || (levels == nullptr && level_count > 0)) {
      return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    }
    std::vector<int> lv(levels, levels + level_count);
    *out = new nlx_phoc_config{nlx::PhocConfig(nlx::decode_utf8(charset_utf8), lv, case_sensitive != 0)};
    return NLX_OK;
  });
}

nlx_status nlx_phoc_config_from_text(const char* text, nlx_phoc_config** out) {
  return guarded([&] {
    if (out == nullptr || text == nullptr) return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    *out = new nlx_phoc_config{nlx::PhocConfig::from_text(text)};
    return NLX_OK;
  });
}

nlx_status nlx_phoc_config_to_text(const nlx_phoc_config* config, char** out) {
  return guarded([&] {
    if (out == nullptr || config == nullptr) return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    *out = copy_string(config->config.to_text());
    return NLX_OK;
  });
}

size_t nlx_phoc_config_dimension(const nlx_phoc_config* config) {
  return config == nullptr ? 0 : config->config.dimension();
}

void nlx_phoc_config_free(nlx_phoc_config* config) { delete config; }

nlx_status nlx_phoc_encode(const nlx_phoc_config* config, const char* word, uint8_t* out, size_t out_len) {
  return guarded([&] {
    if (config == nullptr || word == nullptr || out == nullptr) {
      return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    }
    const auto bytes = nlx::encode(std::string_view(word), config->config).pack();
    if (out_len < bytes.size()) {
      return fail(NLX_ERR_INVALID_ARGUMENT,
                  "output buffer holds " + std::to_string(out_len) + " bytes, need " +
                      std::to_string(bytes.size()));
    }
    std::memcpy(out, bytes.data(), bytes.size());
    return NLX_OK;
  });
}

nlx_status nlx_levenshtein(const char* a, const char* b, size_t* out) {
  return guarded([&] {
    if (a == nullptr || b == nullptr || out == nullptr) return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    *out = nlx::levenshtein(std::string_view(a), std::string_view(b));
    return NLX_OK;
  });
}

nlx_status nlx_model_train(const char* tokens_path, const char* alignments_path,
                           const nlx_phoc_config* config, double lambda, size_t projection_dim,
                           nlx_model** out) {
  return guarded([&] {
    if (tokens_path == nullptr || alignments_path == nullptr || out == nullptr) {
      return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    }
    std::vector<nlx::Candidate> tokens;
    std::vector<nlx::AlignmentRecord> records;
    if (nlx_status s = load_tokens(tokens_path, tokens, nullptr); s != NLX_OK) return s;
    if (nlx_status s = load_alignments(alignments_path, records); s != NLX_OK) return s;
    if (nlx_status s = check_dangling(tokens, records); s != NLX_OK) return s;
    const nlx::PhocConfig cfg = config != nullptr ? config->config : nlx::PhocConfig::standard();
    const nlx::TrainingPairSet pairs = nlx::training_pairs(records, cfg);
    const auto n = static_cast<std::size_t>(pairs.x.cols());
    std::size_t p = projection_dim;
    if (p != 0 && n > 1) p = std::min(p, std::min(cfg.dimension(), n - 1));
    auto fit = nlx::fit_cca(pairs, lambda, p);
    *out = new nlx_model{{cfg, std::move(fit.model)}, static_cast<std::size_t>(pairs.x.cols()),
                         std::move(fit.warnings)};
    return NLX_OK;
  });
}

nlx_status nlx_model_save(const nlx_model* model, const char* path) {
  return guarded([&] {
    if (model == nullptr || path == nullptr) return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    nlx::save_model(model->file, path);
    return NLX_OK;
  });
}

nlx_status nlx_model_load(const char* path, nlx_model** out) {
  return guarded([&] {
    if (path == nullptr || out == nullptr) return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    *out = new nlx_model{nlx::load_model(path), 0, {}};
    return NLX_OK;
  });
}

size_t nlx_model_dimension(const nlx_model* model) {
  return model == nullptr ? 0 : model->file.model.dimension();
}

size_t nlx_model_projection_dim(const nlx_model* model) {
  return model == nullptr ? 0 : model->file.model.projection_dim();
}

size_t nlx_model_correlations(const nlx_model* model, double* out, size_t capacity) {
  if (model == nullptr) return 0;
  const auto& c = model->file.model.correlations;
  const auto n = static_cast<std::size_t>(c.size());
  for (std::size_t i = 0; i < std::min(n, capacity) && out != nullptr; ++i) {
    out[i] = c[static_cast<Eigen::Index>(i)];
  }
  return n;
}

nlx_status nlx_model_summary(const nlx_model* model, char** out) {
  return guarded([&] {
    if (model == nullptr || out == nullptr) return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    const auto& m = model->file.model;
    std::ostringstream s;
    s.precision(6);
    if (model->pairs > 0) s << "training pairs: " << model->pairs << '\n';
    s << "dimension: " << m.dimension() << '\n';
    s << "projection dimension: " << m.projection_dim() << '\n';
    s << "lambda: " << m.lambda << '\n';
    s << "canonical correlations:";
    const Eigen::Index shown = std::min<Eigen::Index>(m.correlations.size(), 10);
    for (Eigen::Index i = 0; i < shown; ++i) s << ' ' << std::fixed << m.correlations[i];
    if (shown < m.correlations.size()) s << " ...";
    s << '\n';
    if (m.correlations.size() > 0) {
      s << "mean correlation: " << std::fixed << m.correlations.mean() << '\n';
    }
    for (const auto& w : model->warnings) s << "warning: " << w << '\n';
    *out = copy_string(s.str());
    return NLX_OK;
  });
}

void nlx_model_free(nlx_model* model) { delete model; }

namespace {

nlx_index* wrap_index(nlx::SearchIndex index) {
  std::vector<std::u32string> tokens32;
  tokens32.reserve(index.size());
  for (const auto& t : index.vocab().tokens) tokens32.push_back(nlx::decode_utf8(t));
  return new nlx_index{std::move(index), std::move(tokens32)};
}

}  // namespace

nlx_status nlx_index_build(const char* tokens_path, const nlx_phoc_config* config, const nlx_model* model,
                           size_t k, const char* error_report_path, nlx_index** out) {
  return guarded([&] {
    if (tokens_path == nullptr || out == nullptr) return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    if (model != nullptr && config != nullptr && !(model->file.config == config->config)) {
      return fail(NLX_ERR_INVALID_ARGUMENT, "PHOC configuration differs from the model's configuration");
    }
    std::vector<nlx::Candidate> tokens;
    if (nlx_status s = load_tokens(tokens_path, tokens, error_report_path); s != NLX_OK) return s;
    nlx::PhocConfig cfg = model != nullptr   ? model->file.config
                          : config != nullptr ? config->config
                                              : nlx::PhocConfig::standard();
    std::optional<nlx::CcaModel> cca;
    if (model != nullptr) cca = model->file.model;
    *out = wrap_index(nlx::SearchIndex::build(cfg, std::move(cca), nlx::build_vocab(tokens), k));
    return NLX_OK;
  });
}

nlx_status nlx_index_save(const nlx_index* index, const char* path) {
  return guarded([&] {
    if (index == nullptr || path == nullptr) return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    nlx::save_index(index->index, path);
    return NLX_OK;
  });
}

nlx_status nlx_index_load(const char* path, nlx_index** out) {
  return guarded([&] {
    if (path == nullptr || out == nullptr) return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    *out = wrap_index(nlx::load_index(path));
    return NLX_OK;
  });
}

size_t nlx_index_size(const nlx_index* index) { return index == nullptr ? 0 : index->index.size(); }

const char* nlx_index_token(const nlx_index* index, size_t i) {
  if (index == nullptr || i >= index->index.size()) return nullptr;
  return index->index.vocab().tokens[i].c_str();
}

void nlx_index_free(nlx_index* index) { delete index; }

nlx_status nlx_metric_from_name(const char* name, nlx_metric* out) {
  if (name == nullptr || out == nullptr) return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
  const std::string_view n(name);
  if (n == "cosine") {
    *out = NLX_METRIC_COSINE;
  } else if (n == "csls") {
    *out = NLX_METRIC_CSLS;
  } else if (n == "edit") {
    *out = NLX_METRIC_EDIT;
  } else {
    return fail(NLX_ERR_INVALID_ARGUMENT, "unknown metric '" + std::string(n) + "' (cosine, csls, edit)");
  }
  return NLX_OK;
}

nlx_status nlx_index_query(const nlx_index* index, const char* query, nlx_metric metric, size_t top_n,
                           nlx_results** out) {
  return guarded([&] {
    if (index == nullptr || query == nullptr || out == nullptr) {
      return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    }
    auto results = std::make_unique<nlx_results>();
    results->metric = metric;
    const auto& vocab = index->index.vocab();
    auto add = [&](std::size_t j, double score) {
      results->tokens.push_back(vocab.tokens[j]);
      results->scores.push_back(score);
      results->occurrences.push_back(vocab.postings[j]);
    };
    switch (metric) {
      case NLX_METRIC_EDIT: {
        const auto ranking = nlx::rank_by_edit_distance(nlx::decode_utf8(query), index->tokens32, top_n);
        for (const auto& h : ranking.hits) add(h.index, h.distance);
        break;
      }
      case NLX_METRIC_COSINE:
      case NLX_METRIC_CSLS: {
        const auto m = metric == NLX_METRIC_CSLS ? nlx::Metric::kCsls : nlx::Metric::kCosine;
        for (const auto& h : index->index.search(query, m, top_n)) add(h.index, h.score);
        break;
      }
      default:
        return fail(NLX_ERR_INVALID_ARGUMENT, "unknown metric");
    }
    *out = results.release();
    return NLX_OK;
  });
}

size_t nlx_results_count(const nlx_results* results) {
  return results == nullptr ? 0 : results->tokens.size();
}

const char* nlx_results_token(const nlx_results* results, size_t i) {
  if (results == nullptr || i >= results->tokens.size()) return nullptr;
  return results->tokens[i].c_str();
}

double nlx_results_score(const nlx_results* results, size_t i) {
  if (results == nullptr || i >= results->scores.size()) return 0.0;
  return results->scores[i];
}

size_t nlx_results_occurrence_count(const nlx_results* results, size_t i) {
  if (results == nullptr || i >= results->occurrences.size()) return 0;
  return results->occurrences[i].size();
}

nlx_status nlx_results_occurrence(const nlx_results* results, size_t i, size_t j, nlx_occurrence* out) {
  const nlx::Occurrence* o = occurrence_at(results, i, j);
  if (o == nullptr || out == nullptr) return fail(NLX_ERR_INVALID_ARGUMENT, "occurrence out of range");
  out->page_id = o->page_id.c_str();
  out->word_id = o->word_id;
  out->x0 = o->box.x0;
  out->y0 = o->box.y0;
  out->x1 = o->box.x1;
  out->y1 = o->box.y1;
  out->has_confidence = o->confidence.has_value() ? 1 : 0;
  out->confidence = o->confidence.value_or(0.0);
  return NLX_OK;
}

nlx_status nlx_results_to_jsonl(const nlx_results* results, char** out) {
  return guarded([&] {
    if (results == nullptr || out == nullptr) return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    const char* metric = results->metric == NLX_METRIC_EDIT   ? "edit"
                         : results->metric == NLX_METRIC_CSLS ? "csls"
                                                              : "cosine";
    std::string text;
    for (std::size_t i = 0; i < results->tokens.size(); ++i) {
      nlohmann::ordered_json line;
      line["rank"] = i + 1;
      line["token"] = results->tokens[i];
      line["score"] = results->scores[i];
      line["metric"] = metric;
      auto occurrences = nlohmann::ordered_json::array();
      for (const auto& o : results->occurrences[i]) {
        nlohmann::ordered_json item;
        item["page_id"] = o.page_id;
        item["word_id"] = o.word_id;
        item["box"] = {o.box.x0, o.box.y0, o.box.x1, o.box.y1};
        item["confidence"] = o.confidence ? nlohmann::ordered_json(*o.confidence) : nlohmann::ordered_json();
        occurrences.push_back(std::move(item));
      }
      line["occurrences"] = std::move(occurrences);
      text += line.dump();
      text += '\n';
    }
    *out = copy_string(text);
    return NLX_OK;
  });
}

void nlx_results_free(nlx_results* results) { delete results; }

nlx_status nlx_generate_corpus(const char* lexicon_path, size_t pages, size_t words_per_page,
                               const char* noise_profile, uint64_t seed, const char* tokens_path,
                               const char* alignments_path) {
  return guarded([&] {
    if (tokens_path == nullptr || alignments_path == nullptr) {
      return fail(NLX_ERR_INVALID_ARGUMENT, "null output path");
    }
    std::vector<nlx::LexiconEntry> lexicon;
    if (lexicon_path != nullptr) {
      const auto bytes = nlx::read_file_bytes(lexicon_path);
      lexicon = nlx::parse_lexicon(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    } else {
      lexicon = nlx::default_lexicon();
    }
    const auto channel = nlx::noise_profile(noise_profile == nullptr ? "default" : noise_profile, seed);
    const auto corpus = nlx::generate_corpus(lexicon, pages, words_per_page, channel);
    std::ostringstream tokens;
    nlx::write_tokens(tokens, corpus.tokens);
    std::ostringstream alignments;
    nlx::write_alignments(alignments, corpus.alignments);
    const std::string t = tokens.str();
    const std::string a = alignments.str();
    nlx::write_file_bytes(tokens_path, {reinterpret_cast<const std::uint8_t*>(t.data()), t.size()});
    nlx::write_file_bytes(alignments_path, {reinterpret_cast<const std::uint8_t*>(a.data()), a.size()});
    return NLX_OK;
  });
}

void nlx_eval_options_init(nlx_eval_options* options) {
  if (options == nullptr) return;
  const nlx::EvalOptions defaults;
  options->methods = "all";
  options->folds = defaults.folds;
  options->seed = defaults.seed;
  options->lambda = defaults.lambda;
  options->projection_dim = defaults.projection_dim;
  options->k = defaults.k;
  options->occurrence_relevance = defaults.occurrence_relevance ? 1 : 0;
}

nlx_status nlx_eval_run(const char* tokens_path, const char* alignments_path, const nlx_phoc_config* config,
                        const nlx_eval_options* options, nlx_eval_report** out) {
  return guarded([&] {
    if (tokens_path == nullptr || alignments_path == nullptr || out == nullptr) {
      return fail(NLX_ERR_INVALID_ARGUMENT, "null argument");
    }
    nlx_eval_options o;
    nlx_eval_options_init(&o);
    if (options != nullptr) o = *options;
    nlx::EvalOptions opt;
    opt.methods = nlx::parse_methods(o.methods == nullptr ? "all" : o.methods);
    opt.folds = o.folds;
    opt.seed = o.seed;
    opt.lambda = o.lambda;
    opt.projection_dim = o.projection_dim;
    opt.k = o.k;
    opt.occurrence_relevance = o.occurrence_relevance != 0;
    if (config != nullptr) opt.config = config->config;

    std::vector<nlx::Candidate> tokens;
    std::vector<nlx::AlignmentRecord> records;
    if (nlx_status s = load_tokens(tokens_path, tokens, nullptr); s != NLX_OK) return s;
    if (nlx_status s = load_alignments(alignments_path, records); s != NLX_OK) return s;
    if (nlx_status s = check_dangling(tokens, records); s != NLX_OK) return s;
    *out = new nlx_eval_report{nlx::run_protocol(tokens, records, opt)};
    return NLX_OK;
  });
}

size_t nlx_eval_report_method_count(const nlx_eval_report* report) {
  return report == nullptr ? 0 : report->report.methods.size();
}

nlx_status nlx_eval_report_method(const nlx_eval_report* report, size_t i, const char** name, double* mean_map,
                                  double* sd_map) {
  if (report == nullptr || i >= report->report.methods.size()) {
    return fail(NLX_ERR_INVALID_ARGUMENT, "method index out of range");
  }
  const auto& m = report->report.methods[i];
  if (name != nullptr) *name = nlx::method_name(m.method);
  if (mean_map != nullptr) *mean_map = m.mean_map;
  if (sd_map != nullptr) *sd_map = m.sd_map;
  return NLX_OK;
}

#define NLX_REPORT_TEXT(fn, member)                                                               \
  nlx_status fn(const nlx_eval_report* report, char** out) {                                      \
    return guarded([&] {                                                                          \
      if (report == nullptr || out == nullptr) return fail(NLX_ERR_INVALID_ARGUMENT, "null argument"); \
      *out = copy_string(report->report.member());                                                \
      return NLX_OK;                                                                              \
    });                                                                                           \
  }

NLX_REPORT_TEXT(nlx_eval_report_table, table)
NLX_REPORT_TEXT(nlx_eval_report_records, records)
NLX_REPORT_TEXT(nlx_eval_report_timing, timing)
NLX_REPORT_TEXT(nlx_eval_report_plot_data, plot_data)

#undef NLX_REPORT_TEXT

void nlx_eval_report_free(nlx_eval_report* report) { delete report; }

}  // extern "C"
