#pragma once

#include <string>
#include <vector>

#include "tacifa/model.hpp"

namespace tacifa {

/// Shortest decimal text that parses back to exactly the same double
/// (round-trip safe); infinities and NaN print as "inf"/"-inf"/"nan".
std::string format_double(double v);

/// Strict full-string parse of a decimal number; throws on anything else
/// (including trailing junk). Accepts "inf"/"nan" spellings.
double parse_double(const std::string& text);

/// Strict full-string parse of a decimal integer; throws on anything else.
long long parse_int(const std::string& text);

/// One series table as stored on disk: a header row of increasing raw time
/// stamps over a "feature" label cell, then one row per feature holding its
/// name and values. Times here stay exactly as written in the file.
struct SeriesTable {
  Matrix values;                           // p x T
  std::vector<double> times;               // length T, strictly increasing
  std::vector<std::string> feature_names;  // length p
};

/// Writes the table as UTF-8 CSV ("." decimal separator, no grouping).
/// Feature names must be nonempty and free of commas, quotes and newlines.
void write_series_csv(const std::string& path, const Matrix& values,
                      const std::vector<double>& times,
                      const std::vector<std::string>& feature_names);

/// Parses a file written in the write_series_csv layout. Errors name the
/// file plus the offending row/column: ragged rows, non-numeric cells,
/// non-increasing time stamps, duplicate or empty feature names, fewer than
/// two time columns.
SeriesTable read_series_csv(const std::string& path);

/// Loads the two series files into one pair. The files must list the same
/// feature names in the same order; each series' time stamps are rescaled
/// affinely onto [0, 1] (first stamp to 0, last to 1), so the two grids may
/// differ in length and in raw units.
SeriesPair load_series(const std::string& x_csv, const std::string& y_csv);

/// One `key = value` assignment and the 1-based line it came from.
struct ConfigEntry {
  int line = 0;
  std::string key, value;
};

/// Line-oriented `key = value` text. Blank lines and lines starting with '#'
/// are skipped; keys may not repeat; a line without '=' or with an empty key
/// is an error naming the line.
std::vector<ConfigEntry> read_config_lines(const std::string& path);

}  // namespace tacifa
