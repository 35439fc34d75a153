#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <krf/io.hpp>

using namespace krf;

namespace {
std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("krf_io_" + name);
}

std::vector<std::string> lines_of(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}
}  // namespace

TEST(FormatNumber, RoundTripsAndSpecials) {
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_number(x)), x);
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_number(2.0), "2");
}

TEST(CsvWriter, HeaderAndRows) {
  const auto path = scratch("plain.csv");
  {
    CsvWriter csv(path, {"a", "b"});
    csv.numbers({1.5, -2.0});
  }
  EXPECT_EQ(lines_of(path), (std::vector<std::string>{"a,b", "1.5,-2"}));
  std::filesystem::remove(path);
}

TEST(CsvWriter, UnwritablePathThrows) {
  EXPECT_THROW(CsvWriter(scratch("missing_dir") / "x.csv", {"a"}), Error);
}

TEST(SnapshotsCsv, OneRowPerNode) {
  ModelConfig model;
  model.n = 65;
  const auto s = initial_state(std::make_shared<const ReferenceFamily>(model));
  const auto path = scratch("snap.csv");
  write_snapshots_csv(path, {s, s});
  const auto lines = lines_of(path);
  EXPECT_EQ(lines.size(), 1u + 2u * 65u);
  EXPECT_EQ(lines[0].rfind("t[time],rho", 0), 0u);
  std::filesystem::remove(path);
}

TEST(EstimatesCsv, TubeColumnsFollowDeltas) {
  ModelConfig model;
  model.n = 65;
  const auto s = initial_state(std::make_shared<const ReferenceFamily>(model));
  const auto report = estimate_report({s}, ProbeParams{}, {0.25, 0.5});
  const auto path = scratch("est.csv");
  write_estimates_csv(path, report);
  const auto lines = lines_of(path);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_NE(lines[0].find("diam_tube(0.5)"), std::string::npos);
  EXPECT_NE(lines[1].find("nan"), std::string::npos);  // no trace residual without neighbours
  EXPECT_EQ(std::count(lines[0].begin(), lines[0].end(), ','), std::count(lines[1].begin(), lines[1].end(), ','));
  std::filesystem::remove(path);
}

TEST(Json, CriterionResult) {
  CriterionResult r;
  r.id = 4;
  r.name = "area";
  r.pass = true;
  r.record("error", 1e-14);
  r.record("missing", std::numeric_limits<double>::quiet_NaN());
  const auto j = to_json(r);
  EXPECT_EQ(j["id"], 4);
  EXPECT_EQ(j["pass"], true);
  EXPECT_EQ(j["values"]["error"], 1e-14);
  EXPECT_EQ(j["values"]["missing"], "nan");
  EXPECT_FALSE(j.contains("error"));
  EXPECT_EQ(to_json(ProbeParams{})["A"], 10.0);
}

TEST(Json, WriteAndReadBack) {
  const auto path = scratch("out.json");
  write_json(path, {{"x", 1}, {"y", "z"}});
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["x"], 1);
  EXPECT_EQ(j["y"], "z");
  std::filesystem::remove(path);
}
