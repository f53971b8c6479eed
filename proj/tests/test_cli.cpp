/*
 * Copyright 2026 The xdata Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run(const std::string& args) {
  const fs::path err = fs::temp_directory_path() / "xdata_cli_stderr.txt";
  const std::string cmd = std::string(XDATA_COMPLETE_BIN) + " " + args + " 2> " + err.string() + " > /dev/null";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("xdata_cli_" + std::string(
        ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string shipped_config() const { return std::string(XDATA_DATA_DIR) + "/synthetic/xdata.cfg"; }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SyntheticRunWritesAllOutputs) {
  const auto r = run("--config " + shipped_config() + " --out-dir " + (dir_ / "out").string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  for (const char* f : {"completed.arff", "assignments.csv", "iterations.csv", "report.txt"}) {
    EXPECT_TRUE(fs::is_regular_file(dir_ / "out" / f)) << f;
  }
  std::istringstream csv(slurp(dir_ / "out" / "assignments.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "iteration,instance,dataset_origin,task,label,confidence");
}

TEST_F(CliTest, MissingInputFileIsADataError) {
  std::ofstream(dir_ / "run.cfg") << "dataset.1.file = nowhere.arff\noutput.dir = out\n";
  const auto r = run("--config " + (dir_ / "run.cfg").string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("nowhere.arff"), std::string::npos) << r.err;
}

TEST_F(CliTest, MalformedArffIsADataError) {
  std::ofstream(dir_ / "bad.arff") << "@relation r\n@attribute x numeric\n@attribute y numeric\n@data\n1,2,3\n";
  std::ofstream(dir_ / "run.cfg") << "dataset.1.file = bad.arff\ndataset.1.num_targets = 1\noutput.dir = out\n";
  const auto r = run("--config " + (dir_ / "run.cfg").string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("line 5"), std::string::npos) << r.err;
}

TEST_F(CliTest, ConfigErrorsExitWithOne) {
  std::ofstream(dir_ / "run.cfg") << "dataset.1.file = a.arff\noutput.dir = out\nnet.dropout = 1.5\n";
  const auto r = run("--config " + (dir_ / "run.cfg").string());
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("net.dropout"), std::string::npos) << r.err;
  EXPECT_EQ(run("").exit_code, 1);
  EXPECT_EQ(run("--config " + (dir_ / "absent.cfg").string()).exit_code, 1);
}

TEST_F(CliTest, SeedFlagMatchesSeedInConfig) {
  const std::string base = slurp(shipped_config());
  const fs::path src = fs::path(shipped_config()).parent_path();
  std::ofstream(dir_ / "seeded.cfg") << base << "net.seed = 7\n";
  for (const char* f : {"file1.arff", "file2.arff", "file3.arff", "file4.arff", "test.arff"}) {
    fs::copy_file(src / f, dir_ / f);
  }
  ASSERT_EQ(run("--quiet --config " + shipped_config() + " --seed 7 --out-dir " + (dir_ / "a").string()).exit_code,
            0);
  ASSERT_EQ(run("--quiet --config " + (dir_ / "seeded.cfg").string() + " --out-dir " + (dir_ / "b").string()).exit_code,
            0);
  EXPECT_EQ(slurp(dir_ / "a" / "assignments.csv"), slurp(dir_ / "b" / "assignments.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "iterations.csv"), slurp(dir_ / "b" / "iterations.csv"));
  ASSERT_EQ(run("--quiet --config " + shipped_config() + " --out-dir " + (dir_ / "c").string()).exit_code, 0);
  EXPECT_NE(slurp(dir_ / "a" / "assignments.csv"), slurp(dir_ / "c" / "assignments.csv"));
}
