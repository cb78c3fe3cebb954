#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "tacifa/io.hpp"
#include "tacifa/rng.hpp"

using tacifa::Matrix;

namespace {

namespace fs = std::filesystem;

// Per-process scratch directory for files the io tests create.
fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "tacifa_io_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path, std::ios::binary);
  REQUIRE(bool(out));
  out << content;
  out.close();
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("numbers format to the shortest exact decimal form") {
  CHECK(tacifa::format_double(0.1) == "0.1");
  CHECK(tacifa::format_double(0.0) == "0");
  CHECK(tacifa::format_double(-2.0) == "-2");
  CHECK(tacifa::format_double(0.5) == "0.5");
  CHECK(tacifa::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(tacifa::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(tacifa::format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");

  const std::vector<double> gnarly = {
      0.1,
      1.0 / 3.0,
      1e-300,
      -2.5e17,
      0.0,
      123456789.123456789,
      std::nextafter(1.0, 2.0),
      std::numeric_limits<double>::denorm_min(),
      std::numeric_limits<double>::max(),
      -std::numeric_limits<double>::min()};
  for (const double x : gnarly) {
    const double back = tacifa::parse_double(tacifa::format_double(x));
    CHECK(back == x);  // bitwise round trip for finite values
  }
  CHECK(std::isinf(tacifa::parse_double("inf")));
  CHECK(tacifa::parse_double("-inf") < 0);
  CHECK(std::isnan(tacifa::parse_double("nan")));
}

TEST_CASE("parsing is strict about the whole token") {
  CHECK(tacifa::parse_double("2e4") == 20000.0);
  CHECK(tacifa::parse_double("-0.25") == -0.25);
  CHECK_THROWS_WITH_AS(tacifa::parse_double("1.5x"),
                       doctest::Contains("cannot parse '1.5x'"),
                       std::invalid_argument);
  CHECK_THROWS_AS(tacifa::parse_double(""), std::invalid_argument);
  CHECK(tacifa::parse_double(" 1 ") == 1.0);  // surrounding spaces are trimmed
  CHECK_THROWS_AS(tacifa::parse_double("1 2"), std::invalid_argument);

  CHECK(tacifa::parse_int("-3") == -3);
  CHECK(tacifa::parse_int("4000000000") == 4000000000LL);
  CHECK_THROWS_WITH_AS(tacifa::parse_int("1.5"),
                       doctest::Contains("as an integer"),
                       std::invalid_argument);
  CHECK_THROWS_AS(tacifa::parse_int("abc"), std::invalid_argument);
}

TEST_CASE("series files survive a write/read cycle bitwise") {
  tacifa::Rng rng(314);
  Matrix values(4, 7);
  for (int j = 0; j < values.cols(); ++j) {
    for (int i = 0; i < values.rows(); ++i) values(i, j) = rng.normal();
  }
  values(2, 3) = 1.0 / 3.0;
  values(0, 0) = -1e-17;
  const std::vector<double> times = {0.0, 1e-9, 0.1, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1e9};
  const std::vector<std::string> names = {"alpha", "beta", "gamma delta", "f4"};

  const fs::path path = scratch_dir() / "roundtrip.csv";
  tacifa::write_series_csv(path.string(), values, times, names);
  const tacifa::SeriesTable table = tacifa::read_series_csv(path.string());

  CHECK(table.values == values);
  CHECK(table.times == times);
  CHECK(table.feature_names == names);
}

TEST_CASE("loading a pair rescales each time axis onto the unit interval") {
  const std::string x = write_file("pair_x.csv",
                                   "feature,0,5,10\n"
                                   "a,1,2,3\n"
                                   "b,4,5,6\n");
  const std::string y = write_file("pair_y.csv",
                                   "feature,2,3,4,7\n"
                                   "a,1,2,3,4\n"
                                   "b,5,6,7,8\n");
  const tacifa::SeriesPair pair = tacifa::load_series(x, y);
  CHECK(pair.grid_x == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(pair.grid_y == std::vector<double>{0.0, 0.2, 0.4, 1.0});
  CHECK(pair.grid_x.front() == 0.0);
  CHECK(pair.grid_x.back() == 1.0);
  CHECK(pair.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(pair.x(1, 2) == 6.0);
  CHECK(pair.y(0, 3) == 4.0);
}

TEST_CASE("mismatched feature sets between the two files are rejected") {
  const std::string x = write_file("mm_x.csv", "feature,0,1\na,1,2\nb,3,4\n");
  const std::string extra =
      write_file("mm_extra.csv", "feature,0,1\na,1,2\nb,3,4\nc,5,6\n");
  const std::string swapped =
      write_file("mm_swapped.csv", "feature,0,1\nb,1,2\na,3,4\n");
  CHECK_THROWS_WITH_AS(tacifa::load_series(x, extra),
                       doctest::Contains("has 2 features but"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(tacifa::load_series(x, swapped),
                       doctest::Contains("feature 1 is"), std::runtime_error);
}

TEST_CASE("malformed series files report the offending location") {
  const std::string ragged =
      write_file("bad_ragged.csv", "feature,0,1,2\na,1,2,3\nb,4,5\n");
  CHECK_THROWS_WITH_AS(tacifa::read_series_csv(ragged),
                       doctest::Contains("row 3"), std::runtime_error);

  const std::string text_cell =
      write_file("bad_cell.csv", "feature,0,1,2\na,1,2,3\nb,4,x,6\n");
  CHECK_THROWS_WITH(tacifa::read_series_csv(text_cell),
                    doctest::Contains("row 3, column 3"));
  CHECK_THROWS_WITH(tacifa::read_series_csv(text_cell),
                    doctest::Contains("cannot parse 'x'"));

  const std::string decreasing =
      write_file("bad_times.csv", "feature,0,2,1\na,1,2,3\n");
  CHECK_THROWS_WITH(tacifa::read_series_csv(decreasing),
                    doctest::Contains("strictly increase"));

  const std::string one_time = write_file("bad_one_time.csv", "feature,0\na,1\n");
  CHECK_THROWS_WITH(tacifa::read_series_csv(one_time),
                    doctest::Contains("two time columns"));

  const std::string empty = write_file("bad_empty.csv", "");
  CHECK_THROWS_WITH(tacifa::read_series_csv(empty),
                    doctest::Contains("header row"));

  CHECK_THROWS_WITH(tacifa::read_series_csv(
                        (scratch_dir() / "does_not_exist.csv").string()),
                    doctest::Contains("cannot be opened"));

  const std::string dup =
      write_file("bad_dup.csv", "feature,0,1\na,1,2\na,3,4\n");
  CHECK_THROWS_WITH(tacifa::read_series_csv(dup),
                    doctest::Contains("duplicate feature name 'a'"));

  const std::string unnamed =
      write_file("bad_unnamed.csv", "feature,0,1\n,1,2\n");
  CHECK_THROWS_WITH(tacifa::read_series_csv(unnamed),
                    doctest::Contains("empty feature name"));

  const std::string bad_header_time =
      write_file("bad_header_time.csv", "feature,0,oops\na,1,2\n");
  CHECK_THROWS_WITH(tacifa::read_series_csv(bad_header_time),
                    doctest::Contains("row 1, column 3"));
}

TEST_CASE("windows line endings and surrounding spaces are tolerated") {
  const std::string crlf = write_file(
      "crlf.csv", "feature,0,1,2\r\n a , 1 , 2 , 3 \r\nb,4,5,6\r\n\r\n");
  const tacifa::SeriesTable table = tacifa::read_series_csv(crlf);
  CHECK(table.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(table.values(0, 2) == 3.0);
  CHECK(table.times == std::vector<double>{0.0, 1.0, 2.0});
}

TEST_CASE("series writing validates its inputs") {
  const Matrix values = Matrix::Zero(2, 3);
  const std::vector<double> times = {0.0, 0.5, 1.0};
  const std::string path = (scratch_dir() / "unwritten.csv").string();
  const std::vector<double> short_times = {0.0, 1.0};
  CHECK_THROWS_AS(
      tacifa::write_series_csv(path, values, short_times, {"a", "b"}),
      std::invalid_argument);
  CHECK_THROWS_AS(tacifa::write_series_csv(path, values, times, {"a"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      tacifa::write_series_csv(path, values, times, {"a", "with,comma"}),
      std::invalid_argument);
}

TEST_CASE("config files parse into ordered key/value entries") {
  const std::string path = write_file("good.cfg",
                                      "# sampler settings\n"
                                      "\n"
                                      "J = 20\n"
                                      "  seed=9\n"
                                      "note = a=b\n");
  const std::vector<tacifa::ConfigEntry> entries =
      tacifa::read_config_lines(path);
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].key == "J");
  CHECK(entries[0].value == "20");
  CHECK(entries[0].line == 3);
  CHECK(entries[1].key == "seed");
  CHECK(entries[1].value == "9");
  CHECK(entries[1].line == 4);
  CHECK(entries[2].key == "note");
  CHECK(entries[2].value == "a=b");
}

TEST_CASE("malformed config lines are rejected with their line number") {
  const std::string dup = write_file("dup.cfg", "J = 20\nJ = 21\n");
  CHECK_THROWS_WITH(tacifa::read_config_lines(dup),
                    doctest::Contains("line 2: duplicate key 'J'"));

  const std::string noeq = write_file("noeq.cfg", "# fine\njust words\n");
  CHECK_THROWS_WITH(tacifa::read_config_lines(noeq),
                    doctest::Contains("line 2: expected key = value"));

  const std::string nokey = write_file("nokey.cfg", "= 5\n");
  CHECK_THROWS_WITH(tacifa::read_config_lines(nokey),
                    doctest::Contains("line 1: empty key"));

  CHECK_THROWS_WITH(
      tacifa::read_config_lines((scratch_dir() / "missing.cfg").string()),
      doctest::Contains("cannot be opened"));
}

TEST_CASE("written files end with a trailing newline and plain commas") {
  const Matrix values = (Matrix(1, 2) << 0.25, -4.0).finished();
  const std::vector<double> times = {0.0, 1.0};
  const fs::path path = scratch_dir() / "layout.csv";
  tacifa::write_series_csv(path.string(), values, times, {"only"});
  const std::string text = slurp(path.string());
  CHECK(text == "feature,0,1\nonly,0.25,-4\n");
}

TEST_SUITE_END();
