#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <krf/config.hpp>

using namespace krf;

namespace {
std::string message_of(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}
}  // namespace

TEST(Config, EmptyGivesDefaults) {
  const auto cfg = parse_config_string("");
  EXPECT_EQ(cfg.model.b0, 1.0);
  EXPECT_EQ(cfg.model.n, 513u);
  EXPECT_EQ(cfg.stepper.dt, 1e-3);
  EXPECT_EQ(cfg.probes.A, 10.0);
  EXPECT_EQ(cfg.gh.slice.neighbours, 8);
  EXPECT_EQ(cfg.seed, 20240601u);
}

TEST(Config, ParsesEveryKind) {
  const auto cfg = parse_config_string(
      "# comment\n"
      "  model.n = 257  \n"
      "\n"
      "stepper.snapshot_times = 0, 0.5,2\n"
      "stepper.bracket_snapshots = true\n"
      "gh.neighbours = 16\n"
      "seed = 7\n"
      "out_dir = results/a b\n");
  EXPECT_EQ(cfg.model.n, 257u);
  EXPECT_EQ(cfg.stepper.snapshot_times, (std::vector<double>{0.0, 0.5, 2.0}));
  EXPECT_TRUE(cfg.stepper.bracket_snapshots);
  EXPECT_EQ(cfg.gh.slice.neighbours, 16);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.out_dir, "results/a b");
}

TEST(Config, UnknownKeyIsNamed) {
  EXPECT_NE(message_of("stepper.dtt = 0.1\n").find("unknown config key 'stepper.dtt'"), std::string::npos);
}

TEST(Config, RepeatedKeyNamesBothLines) {
  const auto msg = message_of("model.b0 = 1\n# x\nmodel.b0 = 2\n");
  EXPECT_NE(msg.find("lines 1 and 3"), std::string::npos) << msg;
}

TEST(Config, MalformedValues) {
  EXPECT_NE(message_of("model.n = 12x\n").find("model.n"), std::string::npos);
  EXPECT_NE(message_of("stepper.bracket_snapshots = yes\n").find("true or false"), std::string::npos);
  EXPECT_NE(message_of("just text\n").find("line 1"), std::string::npos);
}

TEST(Config, ValidationRejectsBadValues) {
  EXPECT_FALSE(message_of("model.b0 = 0\n").empty());
  EXPECT_FALSE(message_of("stepper.dt = -1\n").empty());
  EXPECT_FALSE(message_of("probes.delta_exp = 1.5\n").empty());
  EXPECT_FALSE(message_of("gh.samples = 1\n").empty());
  EXPECT_FALSE(message_of("conical.v_floor = 1\n").empty());
  EXPECT_FALSE(message_of("probes.tube_deltas = 0.1, -1\n").empty());
}

TEST(Config, DefaultDeltaLists) {
  const RunConfig cfg;
  EXPECT_EQ(cfg.gh.delta_list().size(), 17u);
  EXPECT_EQ(cfg.conical.delta_list().front(), 0.125);
  EXPECT_EQ(cfg.conical.delta_list().back(), std::ldexp(1.0, -10));
}

TEST(Config, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "krf_config_test.cfg";
  std::ofstream(path) << "model.b0 = 2.5\n";
  EXPECT_EQ(load_config(path.string()).model.b0, 2.5);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path.string()), Error);
}
