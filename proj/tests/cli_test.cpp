// Copyright 2026 The coordsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "channels.hpp"
#include "coordsim/cli/cli.hpp"
#include "coordsim/error.hpp"
#include "coordsim/prob/json_io.hpp"
#include "coordsim/rate/json_io.hpp"

namespace coordsim::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("coordsim_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const nlohmann::json& j) {
    const auto p = (dir_ / name).string();
    std::ofstream(p) << j.dump();
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int call(std::vector<std::string> args) {
    args.insert(args.begin(), "coordsim");
    out_.str("");
    err_.str("");
    return main_with_args(args, out_, err_);
  }
  nlohmann::json out_json() const { return nlohmann::json::parse(out_.str()); }

  static std::string slurp(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST(CliParse, RateStrings) {
  const auto p = parse_rate_point("1, 0.5,0");
  EXPECT_EQ(p.r0, 1.0);
  EXPECT_EQ(p.r12, 0.5);
  EXPECT_THROW(parse_rate_point("1,2"), ParseError);
  EXPECT_THROW(parse_rate_point("1,x,2"), ParseError);
  EXPECT_THROW(parse_rate_point("1,-2,2"), ParseError);
  const auto q = parse_protocol_rates("0.4;1,0.5;0,0.25");
  EXPECT_EQ(q.r, (std::vector<double>{1, 0.5}));
  EXPECT_EQ(q.rt, (std::vector<double>{0, 0.25}));
  EXPECT_THROW(parse_protocol_rates("0.4;1"), ParseError);
  EXPECT_THROW(parse_protocol_rates("0.4;1,2;0"), ParseError);
  EXPECT_EQ(parse_int_list("4,8,12"), (std::vector<int>{4, 8, 12}));
  EXPECT_THROW(parse_int_list("4,8.5"), ParseError);
}

TEST(CliParse, TwelveDigits) {
  EXPECT_EQ(format_number(1.0 / 3), "0.333333333333");
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(rounded(nlohmann::json{{"a", {2.0 / 3, 1}}}).dump(), R"({"a":[0.666666666667,1]})");
}

TEST(CliParse, InducedChannelValidates) {
  Rng rng(3);
  const auto c = random_channel(rng);
  const auto s = random_scheme(c, {2, 3}, rng);
  const auto ic = induced_channel(c, s);
  EXPECT_TRUE(validate_T_r(ic, assemble_joint(ic, s)).pass);
}

TEST_F(CliTest, HelpAndBadFlags) {
  EXPECT_EQ(call({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("simulate"), std::string::npos);
  EXPECT_EQ(call({"region", "--bogus", "1"}), kExitParse);
  EXPECT_EQ(call({}), kExitParse);
  EXPECT_EQ(call({"region"}), kExitParse);
  EXPECT_EQ(call({"region", "--channel", path("missing.json")}), kExitParse);
  std::ofstream(path("bad.json")) << "{ not json";
  EXPECT_EQ(call({"region", "--channel", path("bad.json")}), kExitParse);
  EXPECT_EQ(call({"simulate", "--exact", "--mc"}), kExitParse);
}

TEST_F(CliTest, RegionBscOneWay) {
  const auto c = testing::bsc(0.1);
  const auto ch = file("c.json", to_json(c));
  const auto sc = file("s.json", to_json(testing::f1_is_y2(c)));
  ASSERT_EQ(call({"region", "--channel", ch, "--scheme", sc, "--rates", "2,0.7,0", "--protocol-rates", "2;0.7;0.4"}),
            kExitOk)
      << err_.str();
  const auto j = out_json();
  EXPECT_EQ(j["region"]["rhs"][0].get<double>(), 0.531004406411);
  EXPECT_EQ(j["region"]["rhs"][2].get<double>(), 1.0);
  EXPECT_TRUE(j["validation"]["pass"].get<bool>());
  EXPECT_TRUE(j["membership"]["member"].get<bool>());
  EXPECT_EQ(j["margins"]["constraints"][0]["slack"].get<double>(), 2.1);
  EXPECT_EQ(j["margins"]["class"], "exterior");
}

TEST_F(CliTest, RegionConstantScheme) {
  ChannelSpec c(testing::uniform_x1_only(), Alphabet(1), Alphabet(2), {0.7, 0.3, 0.7, 0.3});
  auto s = blank_scheme(c, {1});
  for (auto& v : s.rounds[0].table) v = 1.0;
  for (auto& v : s.out1.table) v = 1.0;
  s.out2.table = {0.7, 0.3};
  ASSERT_EQ(call({"region", "--channel", file("c.json", to_json(c)), "--scheme", file("s.json", to_json(s)), "--out",
                  path("r.json")}),
            kExitOk);
  EXPECT_TRUE(out_.str().empty());
  const auto j = read_json_file(path("r.json"));
  for (int k = 0; k < 4; ++k) EXPECT_EQ(j["region"]["rhs"][k].get<double>(), 0.0);
}

TEST_F(CliTest, RegionBrokenJointFails) {
  // Y1 copies X2 although terminal 1 never sees it.
  const DenseJoint q({{"X1", Alphabet(2)}, {"X2", Alphabet(2)}}, {0.25, 0.25, 0.25, 0.25});
  ChannelSpec c(q, Alphabet(2), Alphabet(1), {1, 0, 0, 1, 1, 0, 0, 1});
  std::vector<double> mass;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int y1 = 0; y1 < 2; ++y1) mass.push_back(y1 == x2 ? 0.25 : 0.0);
  const DenseJoint j({{"F1", Alphabet(1)}, {"X1", Alphabet(2)}, {"X2", Alphabet(2)}, {"Y1", Alphabet(2)},
                      {"Y2", Alphabet(1)}},
                     mass);
  EXPECT_EQ(call({"region", "--channel", file("c.json", to_json(c)), "--joint", file("j.json", to_json(j))}),
            kExitValidation);
  const auto rep = out_json();
  EXPECT_FALSE(rep["validation"]["pass"].get<bool>());
  EXPECT_NEAR(rep["validation"]["chains"][1]["slack"].get<double>(), 1.0, 1e-9);
}

TEST_F(CliTest, MembershipAndMinRate) {
  const auto ch = file("c.json", to_json(testing::copy_channel()));
  ASSERT_EQ(call({"membership", "--channel", ch, "--rates", "0,0,0", "--restarts", "3"}), kExitOk);
  EXPECT_FALSE(out_json()["member"].get<bool>());
  ASSERT_EQ(call({"minrate", "--channel", ch, "--restarts", "3", "--max-alphabet", "2"}), kExitOk);
  EXPECT_NEAR(out_json()["value"].get<double>(), 1.0, 0.02);
  EXPECT_EQ(call({"membership", "--channel", ch}), kExitParse);
}

TEST_F(CliTest, FmeVerify) {
  EXPECT_EQ(call({"fme-verify", "--random-schemes", "3", "--r", "1", "--seed", "2"}), kExitOk) << err_.str();
  EXPECT_LT(out_json()["worst_gap"].get<double>(), 1e-6);
  EXPECT_EQ(call({"fme-verify", "--random-schemes", "4", "--r", "2", "--seed", "2", "--workers", "2"}), kExitOk);
  EXPECT_TRUE(out_json()["all_equal"].get<bool>());
  EXPECT_EQ(call({"fme-verify", "--random-schemes", "2", "--r", "2", "--seed", "2", "--drop-sum-constraints"}),
            kExitValidation);
  EXPECT_GT(out_json()["worst_gap"].get<double>(), 1e-6);
  EXPECT_EQ(call({"fme-verify", "--random-schemes", "1", "--r", "5"}), kExitBudget);

  const auto c = testing::bsc(0.1);
  EXPECT_EQ(call({"fme-verify", "--channel", file("c.json", to_json(c)), "--scheme",
                  file("s.json", to_json(testing::f1_is_y2(c)))}),
            kExitOk);
}

class SimulateTest : public CliTest {
 protected:
  void SetUp() override {
    CliTest::SetUp();
    const auto [c, s] = testing::noisy_chain(0.3, 0.05);
    ch_ = file("c.json", to_json(c));
    sc_ = file("s.json", to_json(s));
  }
  std::vector<std::string> base(const std::string& n) {
    return {"simulate", "--channel", ch_, "--scheme", sc_, "--protocol-rates", "0.4;1.0;0", "--n", n, "--seed", "7"};
  }
  static std::vector<std::vector<std::string>> rows(const std::string& csv) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::istringstream l(line);
      std::string cell;
      while (std::getline(l, cell, ',')) cells.push_back(cell);
      out.push_back(cells);
    }
    return out;
  }
  std::string ch_, sc_;
};

TEST_F(SimulateTest, MonotoneExactColumn) {
  ASSERT_EQ(call(base("4,8,12")), kExitOk) << err_.str();
  const auto r = rows(out_.str());
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(out_.str().substr(0, out_.str().find('\n')), "n,mode,tv,sw_error_mean,emp_tv_median");
  for (std::size_t k = 1; k < 4; ++k) EXPECT_EQ(r[k][1], "exact");
  EXPECT_GT(std::stod(r[1][2]), std::stod(r[2][2]));
  EXPECT_GT(std::stod(r[2][2]), std::stod(r[3][2]));
}

TEST_F(SimulateTest, MonteCarloRows) {
  auto args = base("4,8");
  args.insert(args.end(), {"--trials", "300", "--mc"});
  ASSERT_EQ(call(args), kExitOk);
  const auto r = rows(out_.str());
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[1][1], "mc");
  EXPECT_EQ(r[1][2], "nan");
  args = base("4");
  args.insert(args.end(), {"--trials", "300"});
  ASSERT_EQ(call(args), kExitOk);
  EXPECT_EQ(rows(out_.str()).size(), 3u);
}

TEST_F(SimulateTest, ByteIdenticalAcrossRunsAndWorkers) {
  std::vector<std::string> texts;
  for (const char* w : {"1", "1", "4"}) {
    auto args = base("4,8");
    const auto out = path(std::string("run") + std::to_string(texts.size()) + ".csv");
    args.insert(args.end(), {"--trials", "500", "--workers", w, "--out", out});
    ASSERT_EQ(call(args), kExitOk);
    texts.push_back(slurp(out) + slurp(out + ".json"));
  }
  EXPECT_EQ(texts[0], texts[1]);
  EXPECT_EQ(texts[0], texts[2]);
  EXPECT_FALSE(texts[0].empty());
}

TEST_F(SimulateTest, BudgetGivesPartialResults) {
  auto args = base("4,8,12");
  args.insert(args.end(), {"--budget", "1e5"});
  EXPECT_EQ(call(args), kExitBudget);
  const auto r = rows(out_.str());
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[1][0], "4");
  EXPECT_EQ(r[3][0].rfind("# budget exceeded at n=12", 0), 0u);
}

TEST_F(SimulateTest, ConfigFileAndOverrides) {
  const auto cfg = file("run.json", {{"channel", ch_},
                                     {"scheme", sc_},
                                     {"protocol_rates", {{"R0", 0.4}, {"R", {1.0}}, {"Rt", {0}}}},
                                     {"n", {4}},
                                     {"seed", 7}});
  ASSERT_EQ(call({"sweep", "--config", cfg}), kExitOk) << err_.str();
  const auto a = out_.str();
  ASSERT_EQ(call({"sweep", "--config", cfg, "--seed", "8"}), kExitOk);
  EXPECT_NE(a, out_.str());
  ASSERT_EQ(call(base("4")), kExitOk);
  EXPECT_EQ(a, out_.str());
  EXPECT_EQ(call({"sweep", "--config", file("bad.json", {{"mode", "fast"}})}), kExitParse);
  EXPECT_EQ(call({"sweep", "--config", cfg, "--delta", "0"}), kExitValidation);
}

TEST_F(CliTest, BoundsCheck) {
  ASSERT_EQ(call({"bounds-check", "--instances", "200", "--seed", "4"}), kExitOk) << err_.str();
  auto j = out_json();
  EXPECT_TRUE(j["pass"].get<bool>());
  for (const auto& s : j["sweeps"]) {
    EXPECT_EQ(s["violations"].get<int>(), 0);
    EXPECT_LE(s["max_excess"].get<double>(), 0.0);
    EXPECT_EQ(s["max_lhs_at_zero_eps"].get<double>(), 0.0);
  }
  EXPECT_EQ(call({"bounds-check", "--instances", "200", "--seed", "4", "--corrupt-eps", "0"}), kExitValidation);
  j = out_json();
  EXPECT_FALSE(j["pass"].get<bool>());
}

}  // namespace
}  // namespace coordsim::cli
