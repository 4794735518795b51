#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lcorr/fields.hpp"

namespace lcorr {

/// Fixed 17-significant-digit rendering used by every text artifact.
std::string format_real(double v);

/// Wavefront OBJ: one vertex per node in row-major order, each grid cell split
/// into two triangles along its (i, j)-(i+1, j+1) diagonal.
void write_obj(const std::filesystem::path& path, const EmbeddingJet& f);

/// Rows "x_idx,y_idx,E,F,G", one per node, row-major.
void write_metric_csv(const std::filesystem::path& path, const MetricField& m);
/// Reads the format above. The grid is sized from the largest indices; every
/// node must appear exactly once. Throws Error{Io} or Error{Config}.
MetricField read_metric_csv(const std::filesystem::path& path);

/// Rows "x_idx,y_idx,value".
void write_scalar_csv(const std::filesystem::path& path, const ScalarField& s,
                      const std::string& column = "value");
ScalarField read_scalar_csv(const std::filesystem::path& path);

/// Minimal CSV table writer: header first, then rows of preformatted cells.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  /// Writes to a temporary sibling and renames it over `path`.
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lcorr
