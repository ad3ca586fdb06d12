#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <string>

#include "doctest.h"
#include "fhn/errors.hpp"
#include "fhn/io.hpp"

using namespace fhn;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Sample sample_at(double t, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  Sample s;
  s.t = t;
  for (int i = 0; i < 4; ++i) {
    s.y.push_back(d(rng));
    s.y_ref.push_back(d(rng) * 1e-9);
    s.i_se.push_back(d(rng) / 3.0);
  }
  s.e_norm = std::abs(d(rng));
  s.funnel_radius = t < 0.05 ? kInf : 1.0 + std::abs(d(rng));
  s.v_l2 = std::abs(d(rng));
  s.u_l2 = 1e-300;
  s.margin = d(rng) / 7.0;
  return s;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::string error_of(const std::string& csv) {
  try {
    trajectory_from_csv(csv);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "fhn_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 2000; ++i) {
    double x;
    const std::uint64_t b = bits(rng);
    std::memcpy(&x, &b, sizeof x);
    if (std::isnan(x)) continue;
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(format_double(kInf) == "inf");
  CHECK(parse_double("inf") == kInf);
  CHECK(parse_double("-inf") == -kInf);
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::signbit(parse_double(format_double(-0.0))));
  CHECK_THROWS_AS(parse_double(""), FormatError);
  CHECK_THROWS_AS(parse_double("nan"), FormatError);
  CHECK_THROWS_AS(parse_double("+1"), FormatError);
  CHECK_THROWS_AS(parse_double("1.0x"), FormatError);
  CHECK_THROWS_AS(parse_double(" 1"), FormatError);
}

TEST_CASE("empty log is a header-only file") {
  const std::string csv = trajectory_to_csv(TrajectoryLog{});
  CHECK(csv == std::string(kTrajectoryHeader) + "\n");
  CHECK(trajectory_from_csv(csv).empty());
}

TEST_CASE("trajectory csv round-trips bitwise") {
  std::mt19937_64 rng(9);
  TrajectoryLog log;
  for (int i = 0; i < 200; ++i) log.samples.push_back(sample_at(0.01 * i, rng));
  const std::string csv = trajectory_to_csv(log);
  CHECK(first_line(csv) == kTrajectoryHeader);
  const TrajectoryLog back = trajectory_from_csv(csv);
  CHECK(back == log);
  CHECK(trajectory_to_csv(back) == csv);
  CHECK(csv.find(",inf,") != std::string::npos);

  const auto path = scratch("log.csv");
  write_trajectory(log, path.string());
  CHECK(read_trajectory(path.string()) == log);
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
}

TEST_CASE("trajectory csv errors") {
  std::mt19937_64 rng(2);
  TrajectoryLog log;
  for (int i = 0; i < 3; ++i) log.samples.push_back(sample_at(1.0 + i, rng));
  const std::string good = trajectory_to_csv(log);

  CHECK(error_of("t,y1\n1,2\n").find("header") != std::string::npos);
  CHECK(error_of("").find("header") != std::string::npos);

  std::string bad_cell = good;
  const auto pos = bad_cell.find('\n') + 1;
  bad_cell.replace(pos, bad_cell.find(',', pos) - pos, "abc");
  const auto cell = error_of(bad_cell);
  CHECK(cell.find("line 2") != std::string::npos);
  CHECK(cell.find("column 1") != std::string::npos);

  TrajectoryLog back = log;
  back.samples[2].t = 1.5;
  std::string unsorted = std::string(kTrajectoryHeader) + "\n";
  for (const auto& s : {log.samples[0], log.samples[1], back.samples[2]}) {
    TrajectoryLog one;
    one.samples.push_back(s);
    const std::string row = trajectory_to_csv(one);
    unsorted += row.substr(row.find('\n') + 1);
  }
  CHECK(error_of(unsorted).find("increasing") != std::string::npos);

  std::string short_row = good;
  short_row.erase(short_row.rfind(','));
  CHECK_FALSE(error_of(short_row).empty());
  CHECK_THROWS_AS(read_trajectory("/nonexistent/none.csv"), FormatError);
}

TEST_CASE("snapshot text format") {
  Snapshot z{1, 1, 0.0, {0, 0, 0, 0}, {0, 0, 0, 0}};
  const std::string text = snapshot_to_text(z);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  CHECK(first_line(text) == "1 1 0");
  CHECK(snapshot_from_text(text) == z);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> d(0.0, 30.0);
  Snapshot s{3, 2, 100.0, {}, {}};
  for (int i = 0; i < 12; ++i) {
    s.v.push_back(d(rng));
    s.u.push_back(d(rng) * 1e-3);
  }
  CHECK(snapshot_from_text(snapshot_to_text(s)) == s);
  const auto path = scratch("snap.txt");
  write_snapshot(s, path.string());
  CHECK(read_snapshot(path.string()) == s);
}

TEST_CASE("snapshot errors") {
  const std::string truncated = "2 2 1.5\n0 0\n0 0\n0 0\n";
  try {
    snapshot_from_text(truncated);
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    const std::string what = e.what();
    CHECK(what.find("expected 9") != std::string::npos);
    CHECK(what.find("found 3") != std::string::npos);
  }
  CHECK_THROWS_AS(snapshot_from_text("1 1\n"), FormatError);
  CHECK_THROWS_AS(snapshot_from_text("1 1 0\n0 0\n0 0\n0 x\n0 0\n"), FormatError);
  CHECK_THROWS_AS(snapshot_from_text("0 1 0\n"), FormatError);
  Snapshot mismatch{1, 1, 0.0, {0, 0, 0}, {0, 0, 0}};
  CHECK_THROWS_AS(snapshot_to_text(mismatch), DomainError);
}

TEST_CASE("report rendering") {
  VerificationReport pass;
  pass.name = "funnel_invariant";
  pass.pass = true;
  pass.measured = {{"eps0", 0.25}, {"radius", kInf}};
  pass.tolerance = 0.0;
  pass.provenance = "funnel invariant";
  VerificationReport info;
  info.name = "quiescence";
  info.gating = false;
  info.offending_times = {1.0, 2.5};

  const std::string json = reports_to_json({pass, info});
  CHECK(json.find("\"funnel_invariant\"") != std::string::npos);
  CHECK(json.find("\"inf\"") != std::string::npos);
  CHECK(json.find("2.5") != std::string::npos);
  const std::string text = reports_to_text({pass, info});
  CHECK(text.find("PASS  funnel_invariant") != std::string::npos);
  CHECK(text.find("eps0=0.25") != std::string::npos);
  CHECK(text.find("FAIL (informational)") != std::string::npos);
}

TEST_CASE("atomic file writes") {
  const auto path = scratch("atomic.txt");
  write_file_atomic(path.string(), "first");
  write_file_atomic(path.string(), "second");
  CHECK(read_file(path.string()) == "second");
  const auto nested = scratch("nested") / "a" / "b.txt";
  std::filesystem::remove_all(scratch("nested"));
  write_file_atomic(nested.string(), "deep");
  CHECK(read_file(nested.string()) == "deep");
  CHECK_THROWS(write_file_atomic((path / "child").string(), "x"));
}
