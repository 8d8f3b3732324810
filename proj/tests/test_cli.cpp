#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nlx/nlx.h"

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(NLX_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nlx_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  void gen(const std::string& extra = "--pages 4 --words-per-page 80 --seed 5") {
    ASSERT_EQ(run("gen " + extra + " --out-dir " + dir_.string()).code, 0);
  }

  fs::path dir_;
};

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("query").code, 2);
  EXPECT_EQ(run("gen --noise-profile extreme").code, 2);
}

TEST_F(Cli, IndexExitCodes) {
  std::ofstream(p("empty.tsv")).close();
  EXPECT_EQ(run("index " + p("empty.tsv") + " -o " + p("x.nlx")).code, 2);
  EXPECT_TRUE(fs::exists(p("x.nlx.errors.txt")));
  EXPECT_EQ(run("index " + p("missing.tsv") + " -o " + p("x.nlx")).code, 3);
  gen();
  EXPECT_EQ(run("index " + p("tokens.tsv") + " -o " + p("no/such/dir/x.nlx")).code, 3);
  const CliRun ok = run("index " + p("tokens.tsv") + " -o " + p("x.nlx"));
  EXPECT_EQ(ok.code, 0);
  nlx_index* index = nullptr;
  ASSERT_EQ(nlx_index_load(p("x.nlx").c_str(), &index), NLX_OK);
  nlx_index_free(index);
}

TEST_F(Cli, TrainRejectsDanglingAlignments) {
  gen();
  std::ofstream(p("bad.tsv")) << "page_id\tword_id\tocr_text\tgold_text\np001\t99999\tx\ty\n";
  EXPECT_EQ(run("train " + p("tokens.tsv") + " " + p("bad.tsv") + " -o " + p("m.nlm")).code, 2);
  EXPECT_FALSE(fs::exists(p("m.nlm")));
}

TEST_F(Cli, TrainOnIdentityDataPrintsUnitCorrelations) {
  gen("--pages 4 --words-per-page 80 --seed 5 --noise-profile none");
  const CliRun r = run("train " + p("tokens.tsv") + " " + p("alignments.tsv") + " -o " + p("m.nlm") + " --lambda 0.001 --p 8");
  ASSERT_EQ(r.code, 0);
  nlx_model* model = nullptr;
  ASSERT_EQ(nlx_model_load(p("m.nlm").c_str(), &model), NLX_OK);
  std::array<double, 8> corr{};
  EXPECT_EQ(nlx_model_correlations(model, corr.data(), corr.size()), 8u);
  for (double c : corr) EXPECT_NEAR(c, 1.0, 1e-4);
  nlx_model_free(model);
  EXPECT_NE(r.out.find("canonical correlations: 0.99999"), std::string::npos);
}

TEST_F(Cli, ModelFileIsByteStable) {
  gen();
  const std::string args = "train " + p("tokens.tsv") + " " + p("alignments.tsv") + " --p 16 -o ";
  ASSERT_EQ(run(args + p("a.nlm")).code, 0);
  ASSERT_EQ(run("--threads 3 " + args + p("b.nlm")).code, 0);
  EXPECT_EQ(slurp(p("a.nlm")), slurp(p("b.nlm")));
}

TEST_F(Cli, QueryErrorsAndLimits) {
  gen();
  ASSERT_EQ(run("index " + p("tokens.tsv") + " -o " + p("x.nlx")).code, 0);
  EXPECT_EQ(run("query " + p("x.nlx") + " " + quote("§§")).code, 2);
  EXPECT_EQ(run("query " + p("missing.nlx") + " Haus").code, 3);
  nlx_index* index = nullptr;
  ASSERT_EQ(nlx_index_load(p("x.nlx").c_str(), &index), NLX_OK);
  const std::size_t m = nlx_index_size(index);
  const std::string token = nlx_index_token(index, m / 2);
  nlx_index_free(index);
  const CliRun all = run("query " + p("x.nlx") + " " + quote(token) + " --top 100000");
  ASSERT_EQ(all.code, 0);
  std::size_t lines = 0;
  for (char c : all.out) lines += c == '\n';
  EXPECT_GE(lines, m - 5);
  EXPECT_NE(all.out.find("\"token\":\"" + token + "\""), std::string::npos);
  const CliRun edit = run("query " + p("x.nlx") + " " + quote(token) + " --metric edit --top 1");
  EXPECT_EQ(edit.out.rfind("{\"rank\":1,\"token\":\"" + token + "\",\"score\":0", 0), 0u);
}

TEST_F(Cli, QueryParityWithLibrary) {
  gen("--pages 6 --words-per-page 120 --seed 8");
  ASSERT_EQ(run("train " + p("tokens.tsv") + " " + p("alignments.tsv") + " --p 32 -o " + p("m.nlm")).code, 0);
  ASSERT_EQ(run("index " + p("tokens.tsv") + " --model " + p("m.nlm") + " -o " + p("x.nlx")).code, 0);
  nlx_index* index = nullptr;
  ASSERT_EQ(nlx_index_load(p("x.nlx").c_str(), &index), NLX_OK);
  const std::size_t m = nlx_index_size(index);
  const char* metrics[] = {"csls", "cosine", "edit"};
  for (std::size_t q = 0; q < 100; ++q) {
    const std::string word = nlx_index_token(index, (q * 7919) % m);
    if (word.find('\'') != std::string::npos) continue;
    const char* metric_name = metrics[q % 3];
    nlx_metric metric;
    ASSERT_EQ(nlx_metric_from_name(metric_name, &metric), NLX_OK);
    nlx_results* results = nullptr;
    const nlx_status s = nlx_index_query(index, word.c_str(), metric, 10, &results);
    // "--" lets tokens that start with '-' through as the positional query.
    const CliRun cli = run("query " + p("x.nlx") + " --metric " + metric_name + " --top 10 -- " + quote(word));
    if (s != NLX_OK) {
      EXPECT_EQ(cli.code, 2) << word;
      continue;
    }
    char* json = nullptr;
    ASSERT_EQ(nlx_results_to_jsonl(results, &json), NLX_OK);
    EXPECT_EQ(cli.out, std::string(json)) << word;
    EXPECT_EQ(cli.code, 0);
    nlx_string_free(json);
    nlx_results_free(results);
  }
  nlx_index_free(index);
}

TEST_F(Cli, EvalWritesReports) {
  gen();
  const CliRun r = run("eval " + p("tokens.tsv") + " " + p("alignments.tsv") +
                    " --methods edit,csls,cca+csls --folds 2 --seed 1 --out-dir " + dir_.string() +
                    " --emit-plot-data " + p("plot.tsv"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("CCA and CSLS"), std::string::npos);
  EXPECT_EQ(slurp(dir_ / "report.txt"), r.out);
  EXPECT_FALSE(slurp(dir_ / "records.jsonl").empty());
  EXPECT_FALSE(slurp(dir_ / "timing.txt").empty());
  const std::string plot = slurp(p("plot.tsv"));
  ASSERT_EQ(run("eval " + p("tokens.tsv") + " " + p("alignments.tsv") + " --methods edit --folds 2 --out-dir " +
                dir_.string() + " --emit-plot-data " + p("plot.tsv"))
                .code,
            0);
  EXPECT_GT(slurp(p("plot.tsv")).size(), plot.size());
  EXPECT_EQ(run("eval " + p("tokens.tsv") + " " + p("alignments.tsv") + " --methods bogus").code, 2);
}

TEST_F(Cli, GenIsDeterministic) {
  gen("--pages 2 --words-per-page 30 --seed 11");
  const std::string first = slurp(dir_ / "tokens.tsv");
  gen("--pages 2 --words-per-page 30 --seed 11");
  EXPECT_EQ(slurp(dir_ / "tokens.tsv"), first);
  EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 61);
}

}  // namespace
