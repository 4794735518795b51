#include "lcorr/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "lcorr/errors.hpp"

namespace lcorr {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) cells.push_back(cell);
  if (!line.empty() && line.back() == sep) cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& cell, const std::filesystem::path& path, int line) {
  const std::string t = trim(cell);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(ErrorKind::Config, path.string() + ":" + std::to_string(line) + ": bad number '" + t + "'");
  }
  return v;
}

int parse_index(const std::string& cell, const std::filesystem::path& path, int line) {
  const std::string t = trim(cell);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || v < 0) {
    throw Error(ErrorKind::Config, path.string() + ":" + std::to_string(line) + ": bad index '" + t + "'");
  }
  return v;
}

// Reads "x_idx,y_idx,<values...>" rows into a dense grid of `width` values per node.
std::pair<Grid, std::vector<double>> read_node_table(const std::filesystem::path& path, std::size_t width) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");

  std::map<std::pair<int, int>, std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  int max_i = -1;
  int max_j = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (line_no == 1 && !cells.empty() && trim(cells[0]) == "x_idx") continue;
    if (cells.size() != width + 2) {
      throw Error(ErrorKind::Config, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(width + 2) + " columns");
    }
    const int i = parse_index(cells[0], path, line_no);
    const int j = parse_index(cells[1], path, line_no);
    std::vector<double> vals(width);
    for (std::size_t c = 0; c < width; ++c) vals[c] = parse_real(cells[c + 2], path, line_no);
    if (!rows.emplace(std::make_pair(i, j), std::move(vals)).second) {
      throw Error(ErrorKind::Config, path.string() + ": node (" + std::to_string(i) + ", " +
                                         std::to_string(j) + ") listed twice");
    }
    max_i = std::max(max_i, i);
    max_j = std::max(max_j, j);
  }
  const Grid grid(max_i + 1, max_j + 1);
  if (rows.size() != grid.size()) {
    throw Error(ErrorKind::Config, path.string() + ": " + std::to_string(rows.size()) + " rows for a " +
                                       std::to_string(grid.nx()) + "x" + std::to_string(grid.ny()) + " grid");
  }
  std::vector<double> dense(grid.size() * width);
  for (const auto& [ij, vals] : rows) {
    std::copy(vals.begin(), vals.end(), dense.begin() + grid.index(ij.first, ij.second) * width);
  }
  return {grid, std::move(dense)};
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_obj(const std::filesystem::path& path, const EmbeddingJet& f) {
  auto out = open_out(path);
  const Grid& g = f.grid;
  out << "# " << g.nx() << "x" << g.ny() << " grid\n";
  for (const auto& p : f.position) {
    out << "v " << format_real(p.x) << ' ' << format_real(p.y) << ' ' << format_real(p.z) << '\n';
  }
  for (int j = 0; j + 1 < g.ny(); ++j) {
    for (int i = 0; i + 1 < g.nx(); ++i) {
      const std::size_t a = g.index(i, j) + 1;
      const std::size_t b = g.index(i + 1, j) + 1;
      const std::size_t c = g.index(i + 1, j + 1) + 1;
      const std::size_t d = g.index(i, j + 1) + 1;
      out << "f " << a << ' ' << b << ' ' << c << '\n';
      out << "f " << a << ' ' << c << ' ' << d << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

void write_metric_csv(const std::filesystem::path& path, const MetricField& m) {
  CsvTable t({"x_idx", "y_idx", "E", "F", "G"});
  for (std::size_t k = 0; k < m.size(); ++k) {
    t.add_row({std::to_string(m.grid.col(k)), std::to_string(m.grid.row(k)), format_real(m[k].E),
               format_real(m[k].F), format_real(m[k].G)});
  }
  t.write(path);
}

MetricField read_metric_csv(const std::filesystem::path& path) {
  auto [grid, dense] = read_node_table(path, 3);
  MetricField m(grid);
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = {dense[3 * k], dense[3 * k + 1], dense[3 * k + 2]};
  return m;
}

void write_scalar_csv(const std::filesystem::path& path, const ScalarField& s, const std::string& column) {
  CsvTable t({"x_idx", "y_idx", column});
  for (std::size_t k = 0; k < s.size(); ++k) {
    t.add_row({std::to_string(s.grid.col(k)), std::to_string(s.grid.row(k)), format_real(s[k])});
  }
  t.write(path);
}

ScalarField read_scalar_csv(const std::filesystem::path& path) {
  auto [grid, dense] = read_node_table(path, 1);
  ScalarField s(grid);
  s.values = std::move(dense);
  return s;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw Error(ErrorKind::Io, "csv row has " + std::to_string(row.size()) + " cells, header has " +
                                   std::to_string(header_.size()));
  }
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out += ',';
      out += cells[c];
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text_file(path, str()); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    auto out = open_out(tmp);
    out << text;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot move '" + tmp.string() + "' to '" + path.string() + "'");
}

}  // namespace lcorr
