#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "oracles.hpp"
#include "qhmm/qhmm.hpp"

using namespace qhmm;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qhmm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }
  std::string write_model(const std::string& name, const AnyModel& m) {
    return write(name, io::to_json(m).dump());
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ValidateExitCodes) {
  EXPECT_EQ(run({"validate", write_model("ok.json", oracle::coin(0.5))}).code, 0);

  const auto bad = write("bad.json", R"({"type": "classical", "alphabet": ["0", "1"], "dim": 1,
      "transition": {"0": [[0.6]], "1": [[0.6]]}, "initial": [1]})");
  const auto r = run({"validate", bad});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("column_stochastic"), std::string::npos);
  EXPECT_NE(r.out.find("0.2"), std::string::npos);

  EXPECT_EQ(run({"validate", write("broken.json", "{\"type\": ")}).code, 2);
  EXPECT_EQ(run({"validate", path("missing.json")}).code, 2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"validate", write_model("m.json", oracle::coin(0.5)), "--bogus"}).code, 2);
  EXPECT_EQ(run({"spectrum", write_model("m.json", oracle::coin(0.5)), "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"example", "--alpha", "1.0"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, EvalWordAndDistribution) {
  const auto m = write_model("coin.json", oracle::coin(0.5));
  auto r = run({"eval", m, "--word", "01"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "P(01) = 0.25\n");
  r = run({"eval", m, "--length", "2", "--format", "csv"});
  EXPECT_EQ(r.out, "word,probability\n00,0.25\n01,0.25\n10,0.25\n11,0.25\n");
  r = run({"eval", m, "--word", "2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(run({"eval", m, "--word", "0", "--length", "2"}).code, 2);
}

TEST_F(CliTest, SampleIsDeterministic) {
  const auto m = write_model("m.json", random_qhmm(2, 2, 1, 3));
  const auto a = run({"sample", m, "--length", "12", "--count", "5", "--seed", "9"});
  const auto b = run({"sample", m, "--length", "12", "--count", "5", "--seed", "9"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 5);
  EXPECT_EQ(run({"sample", m, "--count", "5"}).code, 2);
}

TEST_F(CliTest, SpectrumOfCoin) {
  const auto r = run({"spectrum", write_model("coin.json", oracle::coin(0.5)), "--format", "json"});
  EXPECT_EQ(r.code, 0);
  const auto doc = io::json::parse(r.out);
  EXPECT_EQ(doc["effective_count"], 1);
  EXPECT_EQ(doc["distinct_nonzero"][0]["lambda"][0], 0.5);
}

TEST_F(CliTest, SpectrumTablePrintsBothCounts) {
  const auto r = run({"spectrum", write_model("p.json", example_model_family(0.5, 0.5, ExampleBranch::quantum_reduction))});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("raw |Lambda|:      5"), std::string::npos);
  EXPECT_NE(r.out.find("effective |Lambda|: 4"), std::string::npos);
}

TEST_F(CliTest, SpectrumAgreesForClassicalAndCompressed) {
  const auto src = write_model("p.json", example_model_family(0.5, 0.5, ExampleBranch::quantum_reduction));
  ASSERT_EQ(run({"compress", src, "--output", path("c.json")}).code, 0);
  const auto a = io::json::parse(run({"spectrum", src, "--format", "json"}).out);
  const auto b = io::json::parse(run({"spectrum", path("c.json"), "--format", "json"}).out);
  ASSERT_EQ(a["effective_count"], b["effective_count"]);
  std::vector<std::pair<double, double>> ea, eb;
  for (const auto& c : a["distinct_nonzero"]) if (c["effective"]) ea.emplace_back(c["lambda"][0], c["lambda"][1]);
  for (const auto& c : b["distinct_nonzero"]) if (c["effective"]) eb.emplace_back(c["lambda"][0], c["lambda"][1]);
  ASSERT_EQ(ea.size(), eb.size());
  for (std::size_t k = 0; k < ea.size(); ++k) {
    EXPECT_NEAR(ea[k].first, eb[k].first, 1e-9);
    EXPECT_NEAR(ea[k].second, eb[k].second, 1e-9);
  }
}

TEST_F(CliTest, DefectiveSpectrumWarnsAndFails) {
  const auto doc = R"({"type": "classical", "alphabet": ["0"], "dim": 3,
      "transition": {"0": [[0, 0, 0], [1, 0, 0], [0, 1, 1]]}, "initial": [0.4, 0.3, 0.3]})";
  const auto r = run({"spectrum", write("d.json", doc)});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("WARNING"), std::string::npos);
}

TEST_F(CliTest, Bounds) {
  auto r = run({"bounds", write_model("coin.json", oracle::coin(0.5)), "--format", "json"});
  EXPECT_EQ(r.code, 0);
  auto doc = io::json::parse(r.out);
  EXPECT_EQ(doc["quantum_min_dim"], 1);
  EXPECT_EQ(doc["classical_min_dim"], 1);

  r = run({"bounds", write_model("p.json", example_model_family(0.5, 0.5, ExampleBranch::quantum_reduction)),
           "--format", "json"});
  doc = io::json::parse(r.out);
  EXPECT_LE(doc["quantum_min_dim"].get<int>(), 2);
  EXPECT_LE(doc["classical_min_dim"].get<int>(), 3);
}

TEST_F(CliTest, BoundsForFiveEigenvalues) {
  // A sparse random three-state model whose self transfer has exactly five
  // effective eigenvalues (found by scanning seeds).
  const auto m = random_classical_hmm(3, 2, 7, 0.5);
  ASSERT_EQ(spectrum(build_self_transfer(m)).effective_count, 5u);
  const auto r = run({"bounds", write_model("five.json", m), "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto doc = io::json::parse(r.out);
  EXPECT_EQ(doc["spectrum_size"], 5);
  EXPECT_EQ(doc["quantum_min_dim"], 2);
  EXPECT_EQ(doc["classical_min_dim"], 3);
}

TEST_F(CliTest, CompareExitCodes) {
  const auto a = write_model("a.json", oracle::coin(0.5));
  const auto b = write_model("b.json", oracle::coin(0.6));
  EXPECT_EQ(run({"compare", a, a}).code, 0);
  const auto r = run({"compare", a, b, "--brute-L", "3", "--format", "json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(io::json::parse(r.out)["verdict"], "refuted");
  EXPECT_EQ(run({"compare", a, write_model("c.json", random_classical_hmm(2, 3, 1))}).code, 1);
}

TEST_F(CliTest, CompressWritesVerifiedModel) {
  const auto src = write_model("p.json", example_model_family(0.5, 0.5, ExampleBranch::quantum_reduction));
  const auto r = run({"compress", src, "--verify-L", "8", "--output", path("c.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("3 -> 2"), std::string::npos);
  const auto doc = io::json::parse(std::ifstream(path("c.json")));
  EXPECT_EQ(doc["dim"], 2);
  EXPECT_LE(doc["provenance"]["max_word_deviation"].get<double>(), 1e-10);
  EXPECT_EQ(run({"compress", src, "--phases", "random:4", "--output", path("r.json")}).code, 0);
  EXPECT_EQ(run({"compress", src, "--phases", "golden"}).code, 1);
  EXPECT_EQ(run({"compress", write_model("q.json", random_qhmm(2, 2, 1, 1))}).code, 1);
}

TEST_F(CliTest, ExampleAndSweep) {
  auto r = run({"example", "--alpha", "0.5", "--beta", "0.5", "--branch", "classical"});
  EXPECT_EQ(r.code, 0);
  const auto m = std::get<ClassicalHmm>(io::model_from_json(io::json::parse(r.out)));
  EXPECT_DOUBLE_EQ(m.transition(0)(0, 2), 0.5);

  r = run({"sweep", "--alpha", "0.5", "--beta-grid", "0.2:0.8:4"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 8);
  EXPECT_EQ(run({"sweep", "--beta-grid", "0.2:nope:3"}).code, 1);
}

TEST_F(CliTest, OutputIsByteIdentical) {
  const auto src = write_model("p.json", random_classical_hmm(3, 2, 5));
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"spectrum", src, "--format", "json"}, {"bounds", src}, {"compare", src, src}}) {
    EXPECT_EQ(run(args).out, run(args).out);
  }
}

TEST_F(CliTest, TransferExport) {
  const auto src = write_model("coin.json", oracle::coin(0.6));
  const auto r = run({"transfer", src});
  ASSERT_EQ(r.code, 0);
  const auto op = io::transfer_from_json(io::json::parse(r.out));
  EXPECT_NEAR(op.matrix(0, 0).real(), 0.52, 1e-15);
}
