#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "rfscreen/dataset.h"
#include "rfscreen/error.h"
#include "rfscreen/eval.h"
#include "rfscreen/serialize.h"
#include "run_config.h"

namespace rfscreen::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rfscreen_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    put(dir_ / "gen.cfg",
        "# small dataset\n"
        "n-classes = 3\nn-samples-per-class = 12\nn-true-features = 3\nn-fake-features = 5\n"
        "n-features-out = 40\nrandom-state = 9\n");
    put(dir_ / "screen.cfg",
        "step-size = 10\nreduced-size = 5\nn-trees = 10\nn-subfeatures = 4\nmin-purity-increase = 0\n"
        "n-canaries = 5\nrandom-state = 3\n");
    put(dir_ / "eval.cfg", slurp(dir_ / "screen.cfg") + "knn-k = 1,3\nfolds = 3\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  int call(std::vector<std::string> args) {
    args.insert(args.begin(), "rfscreen");
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int generate() { return call({"generate", "--config", path("gen.cfg"), "--out", path("data.csv")}); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(Cli, GenerateWritesDataAndProvenance) {
  ASSERT_EQ(generate(), kExitOk) << err_.str();
  const Dataset d = load_csv(path("data.csv"), "label");
  EXPECT_EQ(d.n_samples(), 36u);
  EXPECT_EQ(d.n_features(), 40u);
  EXPECT_TRUE(fs::exists(dir_ / "data.provenance.json"));
  const std::string first = slurp(dir_ / "data.csv");
  ASSERT_EQ(generate(), kExitOk);
  EXPECT_EQ(slurp(dir_ / "data.csv"), first);
}

TEST_F(Cli, UnknownConfigKeyIsValidationError) {
  put(dir_ / "bad.cfg", "n-classez = 3\n");
  EXPECT_EQ(call({"generate", "--config", path("bad.cfg"), "--out", path("x.csv")}), kExitValidation);
  EXPECT_NE(err_.str().find("n-classez"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "x.csv"));
}

TEST_F(Cli, BetaAboveAlphaWritesNothing) {
  ASSERT_EQ(generate(), kExitOk);
  put(dir_ / "bad.cfg", "step-size = 5\nreduced-size = 6\n");
  EXPECT_EQ(call({"screen", "--config", path("bad.cfg"), "--data", path("data.csv"), "--out", path("s.json")}),
            kExitValidation);
  EXPECT_FALSE(fs::exists(dir_ / "s.json"));
}

TEST_F(Cli, MissingFileIsRuntimeError) {
  EXPECT_EQ(call({"screen", "--config", path("screen.cfg"), "--data", path("none.csv"), "--out", path("s.json")}),
            kExitRuntime);
}

TEST_F(Cli, ScreenIsReproducibleUpToTiming) {
  ASSERT_EQ(generate(), kExitOk);
  const std::vector<std::string> args{"screen", "--config", path("screen.cfg"), "--data", path("data.csv"),
                                      "--out", path("s.json"), "--threads", "2"};
  ASSERT_EQ(call(args), kExitOk) << err_.str();
  const auto first = nlohmann::ordered_json::parse(slurp(dir_ / "s.json"));
  ASSERT_EQ(call(args), kExitOk);
  const auto second = nlohmann::ordered_json::parse(slurp(dir_ / "s.json"));
  EXPECT_EQ(mask_timing(first), mask_timing(second));
  EXPECT_EQ(first["selected"].size(), 5u);

  for (const std::string screener : {"kbest", "pca", "random"}) {
    EXPECT_EQ(call({"screen", "--config", path("screen.cfg"), "--data", path("data.csv"), "--out",
                    path(screener + ".json"), "--screener", screener}),
              kExitOk)
        << screener << ": " << err_.str();
  }
}

TEST_F(Cli, EvaluateIdentityMatchesLibrary) {
  ASSERT_EQ(generate(), kExitOk);
  ASSERT_EQ(call({"evaluate", "--config", path("eval.cfg"), "--data", path("data.csv"), "--out", path("r.json")}),
            kExitOk)
      << err_.str();
  const auto report = nlohmann::json::parse(slurp(dir_ / "r.json"));
  ASSERT_EQ(report["entries"].size(), 2u);
  const Dataset d = load_csv(path("data.csv"), "label");
  const CvOptions cv{.folds = 3, .seed = 3, .leak_safe = false};
  const ReportEntry want = cross_validate(d, ScreenerSpec::identity(), ClassifierSpec::knn(3), cv);
  EXPECT_EQ(report["entries"][1]["screener"], "none");
  EXPECT_DOUBLE_EQ(report["entries"][1]["mean_accuracy"].get<double>(), want.mean_accuracy);
  EXPECT_EQ(line_count(slurp(dir_ / "r.csv")), 3u);
}

TEST_F(Cli, EvaluateWithScreeningFile) {
  ASSERT_EQ(generate(), kExitOk);
  ASSERT_EQ(call({"screen", "--config", path("screen.cfg"), "--data", path("data.csv"), "--out", path("s.json")}),
            kExitOk);
  ASSERT_EQ(call({"evaluate", "--config", path("eval.cfg"), "--data", path("data.csv"), "--screening",
                  path("s.json"), "--out", path("r.json")}),
            kExitOk)
      << err_.str();
  const auto report = nlohmann::json::parse(slurp(dir_ / "r.json"));
  EXPECT_LE(report["entries"][0]["n_features_out"].get<std::size_t>(), 5u);
}

TEST_F(Cli, ScreeningNamesMustMatchData) {
  ASSERT_EQ(generate(), kExitOk);
  ASSERT_EQ(call({"screen", "--config", path("screen.cfg"), "--data", path("data.csv"), "--out", path("s.json")}),
            kExitOk);
  std::string csv = slurp(dir_ / "data.csv");
  csv.replace(csv.find("f_1,"), 4, "g_1,");
  put(dir_ / "renamed.csv", csv);
  EXPECT_EQ(call({"evaluate", "--config", path("eval.cfg"), "--data", path("renamed.csv"), "--screening",
                  path("s.json"), "--out", path("r.json")}),
            kExitValidation);
}

TEST_F(Cli, SweepWritesOneRowPerCount) {
  ASSERT_EQ(generate(), kExitOk);
  put(dir_ / "sweep.cfg", "counts = 10,25,40\nknn-k = 1\nstep-size = 40\nn-trees = 5\nn-subfeatures = 4\nfolds = 3\n");
  ASSERT_EQ(call({"sweep", "--config", path("sweep.cfg"), "--data", path("data.csv"), "--screener", "kbest",
                  "--out", path("sw.json")}),
            kExitOk)
      << err_.str();
  const std::string csv = slurp(dir_ / "sw.csv");
  EXPECT_EQ(line_count(csv), 4u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n_features_out,best_accuracy,best_classifier");
}

TEST_F(Cli, AuditExitCodes) {
  ASSERT_EQ(generate(), kExitOk);
  ASSERT_EQ(call({"screen", "--config", path("screen.cfg"), "--data", path("data.csv"), "--out", path("s.json")}),
            kExitOk);
  auto doc = nlohmann::ordered_json::parse(slurp(dir_ / "s.json"));
  doc["selected"] = nlohmann::ordered_json::array({{{"id", 1}, {"name", "f_1"}}});
  put(dir_ / "clean.json", doc.dump());
  EXPECT_EQ(call({"audit", "--screening", path("clean.json")}), kExitOk) << err_.str();
  const auto canary = doc["canaries"]["ids"][0].get<std::size_t>();
  doc["selected"].push_back({{"id", canary}, {"name", "canary_1"}});
  put(dir_ / "leak.json", doc.dump());
  EXPECT_EQ(call({"audit", "--screening", path("leak.json")}), kExitCanaryLeak);
  EXPECT_NE(out_.str().find("leaked: 1"), std::string::npos);
}

TEST_F(Cli, ThreadsFromEnvironmentDoNotChangeOutput) {
  ASSERT_EQ(generate(), kExitOk);
  const std::vector<std::string> args{"screen", "--config", path("screen.cfg"), "--data", path("data.csv"),
                                      "--out", path("s.json")};
  ::setenv("RFSCREEN_THREADS", "1", 1);
  ASSERT_EQ(call(args), kExitOk);
  const auto one = mask_timing(nlohmann::ordered_json::parse(slurp(dir_ / "s.json")));
  ::setenv("RFSCREEN_THREADS", "3", 1);
  ASSERT_EQ(call(args), kExitOk);
  ::unsetenv("RFSCREEN_THREADS");
  EXPECT_EQ(mask_timing(nlohmann::ordered_json::parse(slurp(dir_ / "s.json"))), one);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(call({}), kExitValidation);
  EXPECT_EQ(call({"bogus"}), kExitValidation);
  EXPECT_EQ(call({"--help"}), kExitOk);
  EXPECT_EQ(call({"generate", "--out", path("x.csv")}), kExitValidation);
}

TEST(RunConfig, Parsing) {
  const std::set<std::string> allowed{"a", "b", "list"};
  std::istringstream ok("# comment\n a = 1_000 \n\nlist = 1, 2,3\nb=0.5 # trailing\n");
  const RunConfig c = RunConfig::parse(ok, allowed);
  EXPECT_EQ(c.get_u64("a", 0), 1000u);
  EXPECT_DOUBLE_EQ(c.get_double("b", 0), 0.5);
  EXPECT_EQ(c.get_size_list("list", {}), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(c.get_size("missing", 7), 7u);

  const auto fails = [&](const std::string& text) {
    std::istringstream in(text);
    EXPECT_THROW(RunConfig::parse(in, allowed), ValidationError) << text;
  };
  fails("zz = 1\n");
  fails("a = 1\na = 2\n");
  fails("a\n");
  std::istringstream bad_number("a = x1\n");
  const RunConfig n = RunConfig::parse(bad_number, allowed);
  EXPECT_THROW(n.get_size("a", 0), ValidationError);
  EXPECT_THROW(RunConfig::load("/nonexistent/cfg", allowed), IoError);
}

}  // namespace
}  // namespace rfscreen::cli
