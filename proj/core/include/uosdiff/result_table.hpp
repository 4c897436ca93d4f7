#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace uosdiff {

/// Column-named table of string cells; serialized as plain CSV (no quoting,
/// cells never contain commas).
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name`; throws InvalidArgument when absent.
  std::size_t column(const std::string& name) const;

  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;
  static ResultTable parse_csv(const std::string& text);
  static ResultTable read_csv(const std::filesystem::path& path);
};

/// Shortest round-trip representation ("%.17g"); "nan" for NaN.
std::string format_number(double v);

struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
  std::size_t points = 0;
};

/// OLS of log y on log x over rows with x in [lo, hi]. Uses only aggregate
/// rows (replicate == "agg") when the table has a replicate column; rows with
/// non-positive or non-finite values are skipped. Throws InsufficientPoints
/// with fewer than 3 usable rows.
SlopeFit fit_loglog_slope(const ResultTable& table, const std::string& x_col, const std::string& y_col, double lo,
                          double hi);

/// OLS slope of log y against log x for raw vectors.
SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct PlotSeries {
  std::string label;
  std::vector<double> x, y, err;  // err may be empty
};

/// Static log-log SVG line plot with decade ticks and error bars.
std::string render_loglog_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                              const std::vector<PlotSeries>& series);

}  // namespace uosdiff
