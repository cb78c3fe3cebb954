#include "tacifa/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>

namespace tacifa {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trimmed(line.substr(start)));
      return out;
    }
    out.push_back(trimmed(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::vector<std::string> read_lines(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(std::string(what) + " file '" + path +
                             "' cannot be opened");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

[[noreturn]] void cell_error(const std::string& path, int row, int col,
                             const std::string& what) {
  throw std::runtime_error("'" + path + "' row " + std::to_string(row) +
                           ", column " + std::to_string(col) + ": " + what);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  const std::string t = trimmed(text);
  if (t == "inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  const std::from_chars_result res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end || t.empty()) {
    throw std::invalid_argument("cannot parse '" + text + "' as a number");
  }
  return v;
}

long long parse_int(const std::string& text) {
  const std::string t = trimmed(text);
  long long v = 0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  const std::from_chars_result res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end || t.empty()) {
    throw std::invalid_argument("cannot parse '" + text + "' as an integer");
  }
  return v;
}

void write_series_csv(const std::string& path, const Matrix& values,
                      const std::vector<double>& times,
                      const std::vector<std::string>& feature_names) {
  if (values.cols() != static_cast<Eigen::Index>(times.size())) {
    throw std::invalid_argument("write_series_csv: " +
                                std::to_string(values.cols()) + " columns but " +
                                std::to_string(times.size()) + " time stamps");
  }
  if (values.rows() != static_cast<Eigen::Index>(feature_names.size())) {
    throw std::invalid_argument("write_series_csv: " +
                                std::to_string(values.rows()) + " rows but " +
                                std::to_string(feature_names.size()) +
                                " feature names");
  }
  for (const std::string& name : feature_names) {
    if (name.empty() || name.find_first_of(",\"\n\r") != std::string::npos) {
      throw std::invalid_argument(
          "write_series_csv: feature name '" + name +
          "' is empty or contains a comma, quote or line break");
    }
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << "feature";
  for (double t : times) out << ',' << format_double(t);
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out << feature_names[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      out << ',' << format_double(values(i, j));
    }
    out << '\n';
  }
  if (!out.flush()) {
    throw std::runtime_error("writing '" + path + "' failed");
  }
}

SeriesTable read_series_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path, "series");
  std::size_t n_lines = lines.size();
  while (n_lines > 0 && trimmed(lines[n_lines - 1]).empty()) --n_lines;
  if (n_lines < 2) {
    throw std::runtime_error("'" + path +
                             "': need a header row and at least one feature row");
  }

  const std::vector<std::string> header = split_fields(lines[0]);
  if (header.size() < 3) {
    throw std::runtime_error("'" + path +
                             "' row 1: need at least two time columns");
  }
  SeriesTable table;
  const int t = static_cast<int>(header.size()) - 1;
  table.times.resize(t);
  for (int j = 0; j < t; ++j) {
    try {
      table.times[j] = parse_double(header[j + 1]);
    } catch (const std::exception& e) {
      cell_error(path, 1, j + 2, e.what());
    }
    if (j > 0 && !(table.times[j] > table.times[j - 1])) {
      cell_error(path, 1, j + 2,
                 "time stamps must strictly increase (" +
                     format_double(table.times[j - 1]) + " then " +
                     format_double(table.times[j]) + ")");
    }
  }

  const int p = static_cast<int>(n_lines) - 1;
  table.values.resize(p, t);
  table.feature_names.resize(p);
  std::set<std::string> seen;
  for (int i = 0; i < p; ++i) {
    const int row = i + 2;
    const std::vector<std::string> fields = split_fields(lines[i + 1]);
    if (fields.size() != header.size()) {
      throw std::runtime_error("'" + path + "' row " + std::to_string(row) +
                               ": expected " + std::to_string(header.size()) +
                               " fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      cell_error(path, row, 1, "empty feature name");
    }
    if (!seen.insert(fields[0]).second) {
      cell_error(path, row, 1, "duplicate feature name '" + fields[0] + "'");
    }
    table.feature_names[i] = fields[0];
    for (int j = 0; j < t; ++j) {
      try {
        table.values(i, j) = parse_double(fields[j + 1]);
      } catch (const std::exception& e) {
        cell_error(path, row, j + 2, e.what());
      }
    }
  }
  return table;
}

SeriesPair load_series(const std::string& x_csv, const std::string& y_csv) {
  SeriesTable x = read_series_csv(x_csv);
  SeriesTable y = read_series_csv(y_csv);
  if (x.feature_names.size() != y.feature_names.size()) {
    throw std::runtime_error("'" + x_csv + "' has " +
                             std::to_string(x.feature_names.size()) +
                             " features but '" + y_csv + "' has " +
                             std::to_string(y.feature_names.size()));
  }
  for (std::size_t i = 0; i < x.feature_names.size(); ++i) {
    if (x.feature_names[i] != y.feature_names[i]) {
      throw std::runtime_error("feature " + std::to_string(i + 1) + " is '" +
                               x.feature_names[i] + "' in '" + x_csv +
                               "' but '" + y.feature_names[i] + "' in '" +
                               y_csv + "'");
    }
  }
  auto rescaled = [](const std::vector<double>& times) {
    const double lo = times.front(), hi = times.back();
    std::vector<double> out(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
      out[j] = (times[j] - lo) / (hi - lo);
    }
    out.front() = 0.0;
    out.back() = 1.0;
    return out;
  };
  SeriesPair pair;
  pair.x = std::move(x.values);
  pair.y = std::move(y.values);
  pair.grid_x = rescaled(x.times);
  pair.grid_y = rescaled(y.times);
  pair.feature_names = std::move(x.feature_names);
  pair.validate();
  return pair;
}

std::vector<ConfigEntry> read_config_lines(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path, "config");
  std::vector<ConfigEntry> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    const std::string line = trimmed(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("'" + path + "' line " + std::to_string(line_no) +
                               ": expected key = value, got '" + line + "'");
    }
    ConfigEntry entry;
    entry.line = line_no;
    entry.key = trimmed(line.substr(0, eq));
    entry.value = trimmed(line.substr(eq + 1));
    if (entry.key.empty()) {
      throw std::runtime_error("'" + path + "' line " + std::to_string(line_no) +
                               ": empty key");
    }
    if (!seen.insert(entry.key).second) {
      throw std::runtime_error("'" + path + "' line " + std::to_string(line_no) +
                               ": duplicate key '" + entry.key + "'");
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace tacifa
