// nlx command-line tool: index, train, query, eval, gen.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlx/nlx.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

int exit_code(nlx_status status) {
  switch (status) {
    case NLX_OK:
      return kExitOk;
    case NLX_ERR_IO:
      return kExitIo;
    case NLX_ERR_NUMERIC:
      return kExitNumeric;
    case NLX_ERR_INTERNAL:
      return 1;
    default:
      return kExitInput;
  }
}

int report(nlx_status status) {
  if (status != NLX_OK) {
    std::cerr << "nlx: " << nlx_status_string(status) << ": " << nlx_last_error() << '\n';
  }
  return exit_code(status);
}

// Takes ownership of a C string from the library.
std::string take(char* s) {
  std::string out = s == nullptr ? std::string() : std::string(s);
  nlx_string_free(s);
  return out;
}

bool write_text(const std::string& path, const std::string& text, bool append = false) {
  std::ofstream out(path, append ? std::ios::binary | std::ios::app : std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) {
    std::cerr << "nlx: I/O error: cannot write '" << path << "'\n";
    return false;
  }
  return true;
}

struct PhocFlags {
  std::string config_file;
  std::string charset;
  std::vector<int> levels;
  bool case_insensitive = false;

  void add_to(CLI::App* app) {
    app->add_option("--phoc-config", config_file, "PHOC configuration file (phoc-config text format)");
    app->add_option("--charset", charset, "PHOC character set (UTF-8)");
    app->add_option("--levels", levels, "PHOC pyramid levels")->delimiter(',');
    app->add_flag("--case-insensitive", case_insensitive, "fold case before encoding");
  }

  bool given() const { return !config_file.empty() || !charset.empty() || !levels.empty() || case_insensitive; }

  // Null when no override was given.
  nlx_status make(nlx_phoc_config** out) const {
    *out = nullptr;
    if (!given()) return NLX_OK;
    if (!config_file.empty()) {
      if (!charset.empty() || !levels.empty() || case_insensitive) {
        std::cerr << "nlx: --phoc-config cannot be combined with --charset, --levels or --case-insensitive\n";
        return NLX_ERR_INVALID_ARGUMENT;
      }
      std::ifstream in(config_file, std::ios::binary);
      if (!in) {
        std::cerr << "nlx: cannot read '" << config_file << "'\n";
        return NLX_ERR_IO;
      }
      std::ostringstream text;
      text << in.rdbuf();
      return nlx_phoc_config_from_text(text.str().c_str(), out);
    }
    nlx_phoc_config* standard = nullptr;
    nlx_status s = nlx_phoc_config_standard(&standard);
    if (s != NLX_OK) return s;
    std::string cs = charset;
    if (cs.empty()) {
      // Standard charset, taken from the standard config text.
      char* text = nullptr;
      nlx_phoc_config_to_text(standard, &text);
      std::istringstream lines(take(text));
      std::string line;
      while (std::getline(lines, line)) {
        if (line.rfind("charset ", 0) == 0) cs = line.substr(8);
      }
    }
    nlx_phoc_config_free(standard);
    std::vector<int> lv = levels.empty() ? std::vector<int>{1, 2, 4, 8} : levels;
    return nlx_phoc_config_create(cs.c_str(), lv.data(), lv.size(), case_insensitive ? 0 : 1, out);
  }
};

int run_index(const std::string& tokens, const std::string& out, const std::string& model_path, std::size_t k,
              const PhocFlags& phoc) {
  nlx_phoc_config* config = nullptr;
  if (nlx_status s = phoc.make(&config); s != NLX_OK) return report(s);
  nlx_model* model = nullptr;
  if (!model_path.empty()) {
    if (nlx_status s = nlx_model_load(model_path.c_str(), &model); s != NLX_OK) {
      nlx_phoc_config_free(config);
      return report(s);
    }
  }
  const std::string error_report = out + ".errors.txt";
  nlx_index* index = nullptr;
  nlx_status s = nlx_index_build(tokens.c_str(), config, model, k, error_report.c_str(), &index);
  nlx_model_free(model);
  nlx_phoc_config_free(config);
  if (s != NLX_OK) return report(s);
  s = nlx_index_save(index, out.c_str());
  if (s == NLX_OK) {
    std::cout << "indexed " << nlx_index_size(index) << " unique tokens into " << out << '\n';
  }
  nlx_index_free(index);
  return report(s);
}

int run_train(const std::string& tokens, const std::string& alignments, const std::string& out, double lambda,
              std::size_t p, const PhocFlags& phoc) {
  nlx_phoc_config* config = nullptr;
  if (nlx_status s = phoc.make(&config); s != NLX_OK) return report(s);
  nlx_model* model = nullptr;
  nlx_status s = nlx_model_train(tokens.c_str(), alignments.c_str(), config, lambda, p, &model);
  nlx_phoc_config_free(config);
  if (s != NLX_OK) return report(s);
  s = nlx_model_save(model, out.c_str());
  if (s == NLX_OK) {
    char* summary = nullptr;
    s = nlx_model_summary(model, &summary);
    std::cout << take(summary);
  }
  nlx_model_free(model);
  return report(s);
}

int run_query(const std::string& index_path, const std::string& query, const std::string& metric_name,
              std::size_t top) {
  nlx_metric metric;
  if (nlx_status s = nlx_metric_from_name(metric_name.c_str(), &metric); s != NLX_OK) return report(s);
  nlx_index* index = nullptr;
  if (nlx_status s = nlx_index_load(index_path.c_str(), &index); s != NLX_OK) return report(s);
  nlx_results* results = nullptr;
  nlx_status s = nlx_index_query(index, query.c_str(), metric, top, &results);
  if (s == NLX_OK) {
    char* text = nullptr;
    s = nlx_results_to_jsonl(results, &text);
    std::cout << take(text);
  }
  nlx_results_free(results);
  nlx_index_free(index);
  return report(s);
}

struct EvalFlags {
  std::string tokens;
  std::string alignments;
  std::string methods = "all";
  std::string out_dir = ".";
  std::string plot_data;
  std::size_t folds = 20;
  double lambda = 0.0;
  std::size_t p = 0;
  std::size_t k = 20;
  bool occurrence_relevance = false;
};

int run_eval(const EvalFlags& f, std::uint64_t seed, const PhocFlags& phoc) {
  nlx_phoc_config* config = nullptr;
  if (nlx_status s = phoc.make(&config); s != NLX_OK) return report(s);
  nlx_eval_options options;
  nlx_eval_options_init(&options);
  options.methods = f.methods.c_str();
  options.folds = f.folds;
  options.seed = seed;
  options.lambda = f.lambda;
  options.projection_dim = f.p;
  options.k = f.k;
  options.occurrence_relevance = f.occurrence_relevance ? 1 : 0;
  nlx_eval_report* result = nullptr;
  nlx_status s = nlx_eval_run(f.tokens.c_str(), f.alignments.c_str(), config, &options, &result);
  nlx_phoc_config_free(config);
  if (s != NLX_OK) return report(s);

  char* table = nullptr;
  char* records = nullptr;
  char* timing = nullptr;
  char* plot = nullptr;
  nlx_eval_report_table(result, &table);
  nlx_eval_report_records(result, &records);
  nlx_eval_report_timing(result, &timing);
  nlx_eval_report_plot_data(result, &plot);
  nlx_eval_report_free(result);
  const std::string table_text = take(table);
  const std::string records_text = take(records);
  const std::string timing_text = take(timing);
  const std::string plot_text = take(plot);

  std::error_code ec;
  std::filesystem::create_directories(f.out_dir, ec);
  const std::filesystem::path dir(f.out_dir);
  bool ok = write_text((dir / "report.txt").string(), table_text) &&
            write_text((dir / "records.jsonl").string(), records_text) &&
            write_text((dir / "timing.txt").string(), timing_text);
  if (ok && !f.plot_data.empty()) ok = write_text(f.plot_data, plot_text, true);
  if (!ok) return kExitIo;
  std::cout << table_text;
  return kExitOk;
}

int run_gen(const std::string& lexicon, std::size_t pages, std::size_t words, const std::string& profile,
            std::uint64_t seed, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::filesystem::path dir(out_dir);
  const std::string tokens = (dir / "tokens.tsv").string();
  const std::string alignments = (dir / "alignments.tsv").string();
  const nlx_status s = nlx_generate_corpus(lexicon.empty() ? nullptr : lexicon.c_str(), pages, words,
                                           profile.c_str(), seed, tokens.c_str(), alignments.c_str());
  if (s == NLX_OK) std::cout << "wrote " << tokens << " and " << alignments << '\n';
  return report(s);
}

unsigned threads_from_env() {
  const char* env = std::getenv("NLX_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  try {
    return static_cast<unsigned>(std::stoul(env));
  } catch (const std::exception&) {
    std::cerr << "nlx: ignoring invalid NLX_THREADS='" << env << "'\n";
    return 0;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy search over noisy OCR output"};
  app.require_subcommand(1);
  unsigned threads = threads_from_env();
  app.add_option("--threads", threads, "worker threads (0 = all cores; default $NLX_THREADS)");

  std::string tokens, alignments, out, model, index_path, query, metric = "csls", lexicon,
      profile = "default", gen_dir = ".";
  std::size_t k = 20, p = 0, top = 10, pages = 18, words = 238;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  PhocFlags phoc;
  EvalFlags eval;
  {
    nlx_eval_options defaults;
    nlx_eval_options_init(&defaults);
    eval.folds = defaults.folds;
    eval.lambda = defaults.lambda;
    eval.p = defaults.projection_dim;
    eval.k = defaults.k;
    lambda = defaults.lambda;
    p = defaults.projection_dim;
  }

  auto* index_cmd = app.add_subcommand("index", "build a search index from a token file");
  index_cmd->add_option("tokens", tokens, "token TSV")->required();
  index_cmd->add_option("-o,--out", out, "index file to write")->required();
  index_cmd->add_option("--model", model, "trained model file (identity projection if omitted)");
  index_cmd->add_option("-k,--neighbors", k, "CSLS neighborhood size");
  phoc.add_to(index_cmd);

  auto* train_cmd = app.add_subcommand("train", "fit the CCA projection from aligned pairs");
  train_cmd->add_option("tokens", tokens, "token TSV")->required();
  train_cmd->add_option("alignments", alignments, "alignment TSV")->required();
  train_cmd->add_option("-o,--out", out, "model file to write")->required();
  train_cmd->add_option("--lambda", lambda, "ridge regularization")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--p", p, "projection dimension (0 = maximum)");
  phoc.add_to(train_cmd);

  auto* query_cmd = app.add_subcommand("query", "rank index tokens against a query word");
  query_cmd->add_option("index", index_path, "index file")->required();
  query_cmd->add_option("query", query, "query word")->required();
  query_cmd->add_option("--metric", metric, "csls, cosine or edit")
      ->check(CLI::IsMember({"csls", "cosine", "edit"}));
  query_cmd->add_option("--top", top, "number of results (0 = all)");

  auto* eval_cmd = app.add_subcommand("eval", "run the fold-based retrieval evaluation");
  eval_cmd->add_option("tokens", eval.tokens, "token TSV")->required();
  eval_cmd->add_option("alignments", eval.alignments, "alignment TSV")->required();
  eval_cmd->add_option("--methods", eval.methods, "comma-separated methods or 'all'");
  eval_cmd->add_option("--folds", eval.folds, "number of random splits");
  eval_cmd->add_option("--seed", seed, "random seed");
  eval_cmd->add_option("--lambda", eval.lambda, "ridge regularization")->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--p", eval.p, "projection dimension (0 = maximum)");
  eval_cmd->add_option("-k,--neighbors", eval.k, "CSLS neighborhood size");
  eval_cmd->add_flag("--occurrence-relevance", eval.occurrence_relevance,
                     "count every relevant occurrence instead of unique tokens");
  eval_cmd->add_option("--out-dir", eval.out_dir, "directory for report.txt, records.jsonl, timing.txt");
  eval_cmd->add_option("--emit-plot-data", eval.plot_data, "append (method, CER, mAP) rows to this file");
  phoc.add_to(eval_cmd);

  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic noisy corpus");
  gen_cmd->add_option("--pages", pages, "page count");
  gen_cmd->add_option("--words-per-page", words, "words per page");
  gen_cmd->add_option("--noise-profile", profile, "none, light, default or heavy")
      ->check(CLI::IsMember({"none", "light", "default", "heavy"}));
  gen_cmd->add_option("--seed", seed, "random seed");
  gen_cmd->add_option("--lexicon", lexicon, "word<TAB>frequency file (built-in lexicon if omitted)");
  gen_cmd->add_option("--out-dir", gen_dir, "directory for tokens.tsv and alignments.tsv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  nlx_set_threads(threads);
  if (index_cmd->parsed()) return run_index(tokens, out, model, k, phoc);
  if (train_cmd->parsed()) return run_train(tokens, alignments, out, lambda, p, phoc);
  if (query_cmd->parsed()) return run_query(index_path, query, metric, top);
  if (eval_cmd->parsed()) return run_eval(eval, seed, phoc);
  return run_gen(lexicon, pages, words, profile, seed, gen_dir);
}
