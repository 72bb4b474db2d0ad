// Copyright 2026 The modpulse Authors
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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "modpulse/error.hpp"
#include "modpulse/spec_io.hpp"

using namespace modpulse;

namespace {

const std::filesystem::path kData = MODPULSE_TEST_DATA_DIR;

struct CliRun {
  int code = 0;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "modpulse");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("modpulse_test_" + name);
}

std::vector<std::vector<double>> read_columns(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || !(std::isdigit(line[0]) || line[0] == '-')) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(SpecIo, ShippedSetsRoundTrip) {
  const auto sets = load_datasets(kData);
  EXPECT_GE(sets.size(), 20u);
  for (const auto& d : sets) {
    const SpecDocument back = parse_spec_string(serialize_spec(d));
    EXPECT_EQ(back.spec, d.spec) << d.spec.dataset;
    EXPECT_EQ(back.order, d.order);
    EXPECT_EQ(back.noise, d.noise);
    EXPECT_EQ(back.bath, d.bath);
    EXPECT_EQ(back.spec.target.token, d.spec.target.token);
  }
}

TEST(SpecIo, RandomSpecsRoundTripBitExactly) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 50; ++k) {
    SpecDocument d;
    d.order = 1 + k % 2;
    FmSpec f;
    f.amplitude = std::fabs(u(rng)) + 1;
    for (int i = 1; i <= 1 + k % 9; ++i) f.coefficients.push_back({i, u(rng)});
    if (k % 3 == 0) f.switching_time = 0.05 + 0.01 * std::fabs(u(rng));
    d.spec.target = TargetAngle::parse(k % 2 ? "pi/2" : "pi");
    d.spec.shape = f;
    d.spec.duration = std::fabs(u(rng)) + 0.1;
    EXPECT_EQ(parse_spec_string(serialize_spec(d)).spec, d.spec);
  }
}

TEST(SpecIo, ParseErrorsCarryLineNumbers) {
  try {
    parse_spec_string("family = fm\ntheta = pi\namplitude = abc\n");
    FAIL() << "no exception";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(parse_spec_string("family = fm\nbogus = 1\n"), ParseError);
  EXPECT_THROW(parse_spec_string("family = fm\nfamily = fm\n"), ParseError);
  EXPECT_THROW(parse_spec_string("family = nope\n"), ParseError);
}

TEST(SpecIo, ConfigOverridesNumerics) {
  std::istringstream in("[numerics]\nacceptance = 1e-12\nensemble = 123\nseed = 9\n");
  const NumericsConfig c = parse_config(in);
  EXPECT_EQ(c.solver.acceptance, 1e-12);
  EXPECT_EQ(c.scaling.ensemble, 123u);
  EXPECT_EQ(c.scaling.seed, 9u);
  std::istringstream bad("[numerics]\nensemble = many\n");
  EXPECT_THROW(parse_config(bad), ParseError);
}

TEST(SpecIo, WaveformHasConstantFmAmplitudeAndUnitEnvelopePlateau) {
  const SpecDocument d = find_dataset("table5-pi", kData);
  const auto& fm = std::get<FmSpec>(d.spec.shape);
  ASSERT_TRUE(fm.switching_time);
  std::ostringstream out;
  write_waveform(out, d.spec, 1001);
  const auto rows = read_columns(out.str());
  ASSERT_EQ(rows.size(), 1001u);
  const double ts = *fm.switching_time;
  for (const auto& r : rows) {
    const double t = r[0] / d.spec.duration;
    EXPECT_NEAR(std::hypot(r[1], r[2]) , fm.amplitude * r[5] / d.spec.duration, 1e-9);
    if (t >= ts && t <= 1 - ts) EXPECT_NEAR(r[5], 1, 1e-12);
  }
  EXPECT_NEAR(rows.front()[5], 0, 1e-12);
}

TEST(SpecIo, TrajectoryEndsAtTarget) {
  const SpecDocument d = find_dataset("table2-pi", kData);
  std::ostringstream out;
  write_trajectory(out, d.spec, 201);
  const auto rows = read_columns(out.str());
  ASSERT_EQ(rows.size(), 201u);
  EXPECT_NEAR(rows.back()[1], std::numbers::pi, 1e-5);
}

TEST(Cli, TablesPassAndAreReproducible) {
  const CliRun a = run({"--no-timestamp", "--data-dir", kData.string(), "tables"});
  EXPECT_EQ(a.code, cli::kExitPass) << a.err;
  EXPECT_NE(a.out.find("all shipped sets as expected"), std::string::npos);
  EXPECT_NE(a.out.find("SKIPPED"), std::string::npos);
  const CliRun b = run({"--no-timestamp", "--data-dir", kData.string(), "tables"});
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, CheckExitCodes) {
  EXPECT_EQ(run({"check", (kData / "specs/table3-pi.pulse").string()}).code, cli::kExitPass);
  const CliRun u = run({"check", (kData / "specs/unshaped-pi.pulse").string()});
  EXPECT_EQ(u.code, cli::kExitFail);
  EXPECT_NE(u.out.find("FAIL"), std::string::npos);
  const CliRun q = run({"check", (kData / "specs/table3-pi-quantum.pulse").string()});
  EXPECT_NE(q.out.find("SKIPPED"), std::string::npos);
  EXPECT_EQ(run({"check", "/nonexistent.pulse"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kExitPass);
}

TEST(Cli, MalformedSpecReportsLine) {
  const auto path = temp_file("bad.pulse");
  {
    std::ofstream f(path);
    f << "family = fm\ntheta = pi\namplitude = x\n";
  }
  const CliRun r = run({"check", path.string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  std::filesystem::remove(path);
}

TEST(Cli, SynthesizeWritesCheckableSpec) {
  const auto path = temp_file("t2.pulse");
  const CliRun r = run({"--no-timestamp", "--data-dir", kData.string(), "synthesize", "--family", "fm", "--order", "1",
                     "--coefficients", "2,4", "--symmetric", "--start", "table2-pi", "-o", path.string()});
  ASSERT_EQ(r.code, cli::kExitPass) << r.err << r.out;
  const SpecDocument d = load_spec(path);
  EXPECT_TRUE(check_spec(d.spec, 1, d.noise_model(), 1e-10).passed());
  EXPECT_EQ(run({"check", path.string(), "--tolerance", "1e-10"}).code, cli::kExitPass);
  std::filesystem::remove(path);
  EXPECT_EQ(run({"synthesize", "--family", "fm", "--order", "2", "--coefficients", "2,4"}).code, cli::kExitUsage);
}

TEST(Cli, ExportWritesRequestedSamples) {
  const auto path = temp_file("wave.csv");
  ASSERT_EQ(run({"export", (kData / "specs/table2-pi.pulse").string(), "--samples", "64", "-o", path.string()}).code,
            cli::kExitPass);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(read_columns(ss.str()).size(), 64u);
  std::filesystem::remove(path);
}
