#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "lspce/persistence.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int exit_code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lspce_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliRun run(const std::string& args) {
    const std::string cmd = std::string(LSPCE_CLI_PATH) + " " + args + " > " + (dir_ / "stdout").string() +
                            " 2> " + (dir_ / "stderr").string();
    const int status = std::system(cmd.c_str());
    return {WEXITSTATUS(status), lspce::read_text_file(dir_ / "stdout"),
            lspce::read_text_file(dir_ / "stderr")};
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) { lspce::write_text_file(dir_ / name, text); }

  fs::path dir_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_F(CliTest, BuildPolyIsExactAndReproducible) {
  const CliRun a = run("build --model poly-2d --criterion K --limit 10 --budget 60 --out " + path("a"));
  ASSERT_EQ(a.exit_code, 0) << a.err;
  const auto history = lines(lspce::read_text_file(dir_ / "a" / "history.csv"));
  ASSERT_GE(history.size(), 2u);
  EXPECT_EQ(history[0], "L,terms,ls_terms,criterion_value,heldout_error");
  const std::string last = history.back();
  EXPECT_EQ(last.substr(0, 3), "60,");
  EXPECT_LT(std::stod(last.substr(last.rfind(',') + 1)), 1e-10);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "dataset.csv"));

  const CliRun b = run("build --model poly-2d --criterion K --limit 10 --budget 60 --out " + path("b"));
  ASSERT_EQ(b.exit_code, 0);
  EXPECT_EQ(lspce::read_text_file(dir_ / "a" / "model.json"), lspce::read_text_file(dir_ / "b" / "model.json"));

  const CliRun post = run("postproc " + path("a/model.json") + " --out " + path("sobol.csv"));
  ASSERT_EQ(post.exit_code, 0) << post.err;
  const auto sobol = lines(lspce::read_text_file(dir_ / "sobol.csv"));
  ASSERT_EQ(sobol.size(), 3u);
  EXPECT_EQ(sobol[0], "variable,first_order,total");
  EXPECT_NEAR(std::stod(sobol[1].substr(3)), 0.21053, 1e-5);
  EXPECT_NEAR(std::stod(sobol[2].substr(3)), 0.78947, 1e-5);
}

TEST_F(CliTest, ConfigFileMatchesFlags) {
  write("cfg.json", R"({"model": "poly-2d", "criterion": "K", "limit": 10, "budget": 60, "out": ")" +
                        path("c") + "\"}");
  ASSERT_EQ(run("build --config " + path("cfg.json")).exit_code, 0);
  ASSERT_EQ(run("build --model poly-2d --criterion K --limit 10 --budget 60 --out " + path("f")).exit_code, 0);
  EXPECT_EQ(lspce::read_text_file(dir_ / "c" / "model.json"), lspce::read_text_file(dir_ / "f" / "model.json"));
  write("bad.json", R"({"modle": "poly-2d"})");
  const CliRun bad = run("build --config " + path("bad.json"));
  EXPECT_NE(bad.exit_code, 0);
  EXPECT_NE(bad.err.find("error: parse:"), std::string::npos);
}

TEST_F(CliTest, DatasetBuildAndShortfall) {
  ASSERT_EQ(run("build --model poly-2d --budget 40 --out " + path("src")).exit_code, 0);
  const CliRun ok = run("build --dataset " + path("src/dataset.csv") + " --bounds=-1:1,-1:1 --out " + path("d"));
  ASSERT_EQ(ok.exit_code, 0) << ok.err;
  EXPECT_FALSE(fs::exists(dir_ / "d" / "dataset.csv"));

  const CliRun short_run = run("build --dataset " + path("src/dataset.csv") + " --model poly-2d --budget 55 --out " +
                            path("e"));
  EXPECT_EQ(short_run.exit_code, 1);
  EXPECT_NE(short_run.err.find("error: dataset_exhausted:"), std::string::npos);
  EXPECT_NE(short_run.err.find("15"), std::string::npos);
  EXPECT_EQ(lines(short_run.err).size(), 1u);
}

TEST_F(CliTest, EvalConstantModel) {
  const std::string model =
      R"({"schema_version":1,"input_model":[{"lower":0,"upper":1},{"lower":0,"upper":1}],)"
      R"("basis":["0,0"],"coefficients":[2.5],"build_info":{"criterion":"K","limit":10,"seed":0,)"
      R"("evaluations":0,"stop_reason":"max_evals","model_name":"manual","time_unit":null,"history":[]}})";
  write("model.json", model);
  write("points.csv", "y1,y2\n0.1,0.2\n0.5,0.5\n0.9,0.0\n");
  const CliRun r = run("eval " + path("model.json") + " " + path("points.csv"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out, "prediction\n2.5\n2.5\n2.5\n");

  write("bad.csv", "a,b\n0.1,0.2\n");
  const CliRun bad = run("eval " + path("model.json") + " " + path("bad.csv"));
  EXPECT_EQ(bad.exit_code, 1);
  EXPECT_NE(bad.err.find("y1,y2"), std::string::npos);

  write("out.csv", "y1,y2\n0.1,0.2\n1.5,0.5\n");
  const CliRun oob = run("eval " + path("model.json") + " " + path("out.csv"));
  EXPECT_EQ(oob.exit_code, 1);
  EXPECT_NE(oob.err.find("out_of_bounds"), std::string::npos);
  EXPECT_NE(oob.err.find("row 2"), std::string::npos);
}

TEST_F(CliTest, StudyOutputs) {
  const CliRun r = run("study --model poly-2d --gate K:10 --gate E:2 --replicates 3 --budget 30 --cv-size 200 "
                    "--threads 2 --out " + path("s"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto raw = lines(lspce::read_text_file(dir_ / "s" / "study.csv"));
  EXPECT_EQ(raw[0], "criterion,limit,seed,L,rms_cv");
  // Default initial size N+2 = 4, one checkpoint per L up to 30.
  EXPECT_EQ(raw.size(), 1u + 3u * 2u * 27u);
  const auto stats = lines(lspce::read_text_file(dir_ / "s" / "stats.csv"));
  EXPECT_EQ(stats[0], "criterion,limit,L,mean_log10_err,std_log10_err");
  EXPECT_EQ(stats.size(), 1u + 2u * 27u);
  const auto meta = nlohmann::json::parse(lspce::read_text_file(dir_ / "s" / "study_meta.json"));
  EXPECT_EQ(meta["replicates"], 3);

  const CliRun serial = run("study --model poly-2d --gate K:10 --gate E:2 --replicates 3 --budget 30 "
                         "--cv-size 200 --threads 1 --out " + path("t"));
  ASSERT_EQ(serial.exit_code, 0);
  EXPECT_EQ(lspce::read_text_file(dir_ / "s" / "study.csv"), lspce::read_text_file(dir_ / "t" / "study.csv"));
  EXPECT_EQ(lspce::read_text_file(dir_ / "s" / "stats.csv"), lspce::read_text_file(dir_ / "t" / "stats.csv"));
}

TEST_F(CliTest, StudySingleReplicate) {
  const CliRun r = run("study --model poly-2d --gate K:10 --replicates 1 --budget 20 --cv-size 50 --out " + path("s"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("insufficient_replicates"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "s" / "study.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "s" / "stats.csv"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run("").exit_code, 2);
  EXPECT_EQ(run("build --budget notanumber").exit_code, 2);
  const CliRun unknown = run("build --model nosuch");
  EXPECT_EQ(unknown.exit_code, 1);
  EXPECT_EQ(unknown.err.rfind("error: unknown_model:", 0), 0u);
}
