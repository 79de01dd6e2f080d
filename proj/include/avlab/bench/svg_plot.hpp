#pragma once

#include <optional>
#include <string>
#include <vector>

namespace avlab {

/// Header row plus numeric rows of a comma-separated table.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, std::size_t col) const;
};

CsvTable parse_csv(const std::string& text);

struct PlotSpec {
  std::string title;
  std::string x_column, y_column;
  /// Rows are grouped into one line per distinct value of this column.
  std::string series_column;
  std::string x_label, y_label;
  bool log_x = false;
  /// Dashed horizontal reference line.
  std::optional<double> reference;
  int width = 640, height = 420;
};

/// Static SVG line chart of the CSV text. Points with non-positive x are
/// skipped on a log axis.
std::string render_svg(const std::string& csv_text, const PlotSpec& spec);

}  // namespace avlab
