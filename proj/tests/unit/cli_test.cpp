/* Copyright 2026 The bwsynth Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(BWSYNTH_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bwsynth_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, GenerateAnalyzeSynthVerify) {
  ASSERT_EQ(run("gen-topo -p two_level_cluster --clusters 2 --per-cluster 4 --local-bw 10 "
                "--global-bw 1 -o " + path("t.json")).code,
            0);
  const CliRun a = run("analyze " + path("t.json"));
  ASSERT_EQ(a.code, 0);
  EXPECT_NE(a.out.find("ratio: 1/1"), std::string::npos) << a.out;
  EXPECT_NE(a.out.find("allreduce lb_degree: 7/44"), std::string::npos) << a.out;
  EXPECT_NE(a.out.find("allgather lower bound per unit: 1/8"), std::string::npos);

  for (const char* c : {"allgather", "reduce-scatter", "allreduce"}) {
    const std::string out = path(std::string(c) + ".json");
    const CliRun s = run("synth " + path("t.json") + " -c " + c + " -o " + out);
    ASSERT_EQ(s.code, 0) << c;
    EXPECT_NE(s.out.find("collective: " + std::string(c)), std::string::npos);
    const CliRun v = run("verify " + path("t.json") + " " + out);
    EXPECT_EQ(v.code, 0) << v.out;
    const auto report = nlohmann::json::parse(v.out);
    for (const auto& check : report["checks"]) EXPECT_TRUE(check["pass"].get<bool>());
  }
  const CliRun b = run("synth " + path("t.json") + " -c broadcast -r v1_1");
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(nlohmann::json::parse(b.out)["runtime_per_unit"], "1/4");
}

TEST_F(Cli, InputErrorsExitOne) {
  EXPECT_EQ(run("analyze " + path("missing.json")).code, 1);
  std::ofstream(path("bad.json")) << R"({"nodes": []})";
  EXPECT_EQ(run("analyze " + path("bad.json")).code, 1);
  ASSERT_EQ(run("gen-topo -p ring --n 3 -o " + path("r.json")).code, 0);
  EXPECT_EQ(run("synth " + path("r.json") + " -c broadcast").code, 1);
  EXPECT_EQ(run("synth " + path("r.json") + " -c broadcast -r nobody").code, 1);
  EXPECT_NE(run("synth " + path("r.json") + " -c scatter").code, 0);
}

TEST_F(Cli, TamperedScheduleFailsVerification) {
  ASSERT_EQ(run("gen-topo -p ring --n 3 -o " + path("r.json")).code, 0);
  const CliRun s = run("synth " + path("r.json") + " -c allgather");
  ASSERT_EQ(s.code, 0);
  auto j = nlohmann::json::parse(s.out);
  j["runtime_per_unit"] = "1/3";
  std::ofstream(path("s.json")) << j.dump();
  const CliRun v = run("verify " + path("r.json") + " " + path("s.json"));
  EXPECT_EQ(v.code, 1);
  EXPECT_NE(v.out.find("\"pass\": false"), std::string::npos);
}

TEST_F(Cli, FixedKGapExitsThree) {
  ASSERT_EQ(run("gen-topo -p two_level_cluster --clusters 2 --per-cluster 3 --local-bw 3 "
                "--global-bw 1 -o " + path("t.json")).code,
            0);
  const CliRun gap = run("synth " + path("t.json") + " -c allgather -k 1 -o " + path("s.json"));
  EXPECT_EQ(gap.code, 3);
  EXPECT_NE(gap.out.find("gap: 1/72"), std::string::npos) << gap.out;
  EXPECT_EQ(run("verify " + path("t.json") + " " + path("s.json")).code, 0);
  EXPECT_EQ(run("synth " + path("t.json") + " -c allgather -k 4 -o " + path("s4.json")).code,
            0);
}

TEST_F(Cli, OutputIsDeterministic) {
  ASSERT_EQ(run("gen-topo -p fat_tree --leaves 2 --hosts-per-leaf 3 --spines 2 -o " +
                path("f.json")).code,
            0);
  const CliRun a = run("synth " + path("f.json") + " -c allreduce");
  const CliRun b = run("-j 4 synth " + path("f.json") + " -c allreduce");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

}  // namespace
