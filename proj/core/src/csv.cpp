#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fjscb/errors.hpp"
#include "fjscb/fdata.hpp"

namespace fjscb {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string where(const std::filesystem::path& file, std::size_t row, std::size_t col) {
  return file.string() + ":" + std::to_string(row) + ":" + std::to_string(col);
}

// Locale-independent decimal parse.
double parse_number(std::string_view field, const std::filesystem::path& file, std::size_t row, std::size_t col) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(where(file, row, col) + ": expected a number, got '" + std::string(field) + "'");
  }
  return value;
}

struct Lines {
  std::vector<std::string> text;
};

Lines read_lines(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open " + file.string());
  Lines l;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    l.text.push_back(line);
  }
  if (l.text.empty()) throw ParseError(file.string() + ": file is empty");
  // strip UTF-8 BOM
  if (l.text.front().rfind("\xEF\xBB\xBF", 0) == 0) l.text.front().erase(0, 3);
  return l;
}

}  // namespace

CurveTable load_curve_table(const std::filesystem::path& curves_file) {
  const Lines lines = read_lines(curves_file);
  const auto header = split(lines.text.front());
  if (header.empty() || header[0] != "id") {
    throw ParseError(where(curves_file, 1, 1) + ": header must start with 'id'");
  }
  const bool has_pred = header.size() > 1 && header[1] == "pred";
  const std::size_t first = has_pred ? 2 : 1;
  if (header.size() < first + 2) throw ParseError(where(curves_file, 1, first + 1) + ": need at least two grid values");

  std::vector<double> raw_grid;
  for (std::size_t c = first; c < header.size(); ++c) {
    raw_grid.push_back(parse_number(header[c], curves_file, 1, c + 1));
    if (raw_grid.size() > 1 && !(raw_grid.back() > raw_grid[raw_grid.size() - 2])) {
      throw ParseError(where(curves_file, 1, c + 1) + ": grid header is not strictly increasing");
    }
  }
  const double lo = raw_grid.front();
  const double span = raw_grid.back() - lo;
  CurveTable table;
  table.grid.reserve(raw_grid.size());
  for (double t : raw_grid) table.grid.push_back((t - lo) / span);
  table.grid.front() = 0.0;
  table.grid.back() = 1.0;

  const std::size_t width = header.size();
  const std::size_t grid_size = raw_grid.size();
  // (id -> row index), values per predictor
  std::unordered_map<std::string, std::size_t> id_row;
  std::map<std::size_t, std::vector<std::vector<double>>> by_pred;  // pred -> rows indexed by id_row
  std::map<std::size_t, std::vector<bool>> seen;
  for (std::size_t r = 1; r < lines.text.size(); ++r) {
    const std::size_t row = r + 1;
    const auto fields = split(lines.text[r]);
    if (fields.size() != width) {
      throw ParseError(where(curves_file, row, std::min(fields.size(), width) + 1) + ": expected " +
                       std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    }
    std::string id(fields[0]);
    if (id.empty()) throw ParseError(where(curves_file, row, 1) + ": empty id");
    std::size_t pred = 1;
    if (has_pred) {
      const double v = parse_number(fields[1], curves_file, row, 2);
      if (v < 1.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw ParseError(where(curves_file, row, 2) + ": pred must be a positive integer");
      }
      pred = static_cast<std::size_t>(v);
    }
    auto [it, inserted] = id_row.try_emplace(id, table.ids.size());
    if (inserted) table.ids.push_back(id);
    auto& rows = by_pred[pred];
    auto& flags = seen[pred];
    if (rows.size() <= it->second) {
      rows.resize(it->second + 1);
      flags.resize(it->second + 1, false);
    }
    if (flags[it->second]) {
      throw ParseError(where(curves_file, row, 1) + ": duplicate row for id '" + id + "' pred " + std::to_string(pred));
    }
    flags[it->second] = true;
    std::vector<double> values(grid_size);
    for (std::size_t g = 0; g < grid_size; ++g) values[g] = parse_number(fields[first + g], curves_file, row, first + g + 1);
    rows[it->second] = std::move(values);
  }
  if (table.ids.empty()) throw ParseError(curves_file.string() + ": no data rows");

  std::size_t expected = 1;
  for (const auto& [pred, rows] : by_pred) {
    if (pred != expected) {
      throw ParseError(curves_file.string() + ": predictor indices must be consecutive from 1; missing pred " +
                       std::to_string(expected));
    }
    ++expected;
    const auto& flags = seen[pred];
    Eigen::MatrixXd m(static_cast<Eigen::Index>(table.ids.size()), static_cast<Eigen::Index>(grid_size));
    for (std::size_t i = 0; i < table.ids.size(); ++i) {
      if (i >= flags.size() || !flags[i]) {
        throw ParseError(curves_file.string() + ": id '" + table.ids[i] + "' has no row for pred " +
                         std::to_string(pred));
      }
      for (std::size_t g = 0; g < grid_size; ++g) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(g)) = rows[i][g];
      }
    }
    table.curves.push_back(std::move(m));
  }
  return table;
}

FunctionalDataSet load_curves(const std::filesystem::path& curves_file, const std::filesystem::path& responses_file) {
  CurveTable table = load_curve_table(curves_file);

  const Lines lines = read_lines(responses_file);
  const auto header = split(lines.text.front());
  if (header.size() != 2 || header[0] != "id" || header[1] != "y") {
    throw ParseError(where(responses_file, 1, 1) + ": header must be 'id,y'");
  }
  std::unordered_map<std::string, double> y_by_id;
  for (std::size_t r = 1; r < lines.text.size(); ++r) {
    const std::size_t row = r + 1;
    const auto fields = split(lines.text[r]);
    if (fields.size() != 2) {
      throw ParseError(where(responses_file, row, std::min<std::size_t>(fields.size(), 2) + 1) +
                       ": expected 2 fields, found " + std::to_string(fields.size()));
    }
    std::string id(fields[0]);
    if (!y_by_id.emplace(id, parse_number(fields[1], responses_file, row, 2)).second) {
      throw ParseError(where(responses_file, row, 1) + ": duplicate id '" + id + "'");
    }
  }

  FunctionalDataSet data;
  data.grid = std::move(table.grid);
  data.curves = std::move(table.curves);
  data.responses.resize(static_cast<Eigen::Index>(table.ids.size()));
  for (std::size_t i = 0; i < table.ids.size(); ++i) {
    const auto it = y_by_id.find(table.ids[i]);
    if (it == y_by_id.end()) {
      throw ParseError(responses_file.string() + ": missing response for id '" + table.ids[i] + "'");
    }
    data.responses(static_cast<Eigen::Index>(i)) = it->second;
  }
  if (y_by_id.size() != table.ids.size()) {
    for (const auto& [id, y] : y_by_id) {
      if (std::find(table.ids.begin(), table.ids.end(), id) == table.ids.end()) {
        throw ParseError(responses_file.string() + ": id '" + id + "' has no curve in " + curves_file.string());
      }
    }
  }
  data.ids = std::move(table.ids);
  data.validate(2);
  return data;
}

}  // namespace fjscb
