#include "uosdiff/result_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "uosdiff/error.hpp"

namespace uosdiff {

std::size_t ResultTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error(ErrorKind::InvalidArgument, "no column named '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::string ResultTable::to_csv() const {
  std::string out;
  auto append_row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  append_row(columns);
  for (const auto& row : rows) append_row(row);
  return out;
}

void ResultTable::write_csv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << to_csv();
}

ResultTable ResultTable::parse_csv(const std::string& text) {
  ResultTable table;
  std::stringstream ss(text);
  std::string line;
  bool header = true;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (header) {
      table.columns = std::move(cells);
      header = false;
    } else {
      if (cells.size() != table.columns.size()) throw Error(ErrorKind::IoError, "ragged CSV row: " + line);
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

ResultTable ResultTable::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorKind::SizeMismatch, "slope fit needs paired values");
  if (x.size() < 3) throw Error(ErrorKind::InsufficientPoints, "slope fit needs at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::InsufficientPoints, "slope fit needs distinct x values");
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::log(y[i]) - my - slope * (std::log(x[i]) - mx);
    sse += r * r;
  }
  return {slope, std::sqrt(sse / (n - 2.0) / sxx), x.size()};
}

SlopeFit fit_loglog_slope(const ResultTable& table, const std::string& x_col, const std::string& y_col, double lo,
                          double hi) {
  const std::size_t xi = table.column(x_col);
  const std::size_t yi = table.column(y_col);
  const auto rep = std::find(table.columns.begin(), table.columns.end(), "replicate");
  const bool aggregate_only = rep != table.columns.end();
  const std::size_t ri = static_cast<std::size_t>(rep - table.columns.begin());

  std::vector<double> xs, ys;
  for (const auto& row : table.rows) {
    if (aggregate_only && row[ri] != "agg") continue;
    double x = 0.0, y = 0.0;
    try {
      x = std::stod(row[xi]);
      y = std::stod(row[yi]);
    } catch (const std::exception&) {
      continue;
    }
    if (!(x >= lo && x <= hi) || !(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) continue;
    xs.push_back(x);
    ys.push_back(y);
  }
  return fit_loglog_slope(xs, ys);
}

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string render_loglog_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                              const std::vector<PlotSeries>& series) {
  constexpr double width = 640, height = 480, left = 80, right = 20, top = 40, bottom = 60;
  constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      const double e = i < s.err.size() && std::isfinite(s.err[i]) ? s.err[i] : 0.0;
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i] - e > 0.0 ? s.y[i] - e : s.y[i]);
      y_max = std::max(y_max, s.y[i] + e);
    }
  if (!std::isfinite(x_min)) x_min = 0.1, x_max = 10.0, y_min = 0.1, y_max = 10.0;
  const double lx0 = std::floor(std::log10(x_min)), lx1 = std::max(lx0 + 1, std::ceil(std::log10(x_max)));
  const double ly0 = std::floor(std::log10(y_min)), ly1 = std::max(ly0 + 1, std::ceil(std::log10(y_max)));
  auto px = [&](double x) { return left + (std::log10(x) - lx0) / (lx1 - lx0) * (width - left - right); };
  auto py = [&](double y) { return height - bottom - (std::log10(y) - ly0) / (ly1 - ly0) * (height - top - bottom); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) + "</text>\n";
  svg += "<rect x=\"" + fmt("%.1f", left) + "\" y=\"" + fmt("%.1f", top) + "\" width=\"" +
         fmt("%.1f", width - left - right) + "\" height=\"" + fmt("%.1f", height - top - bottom) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = lx0; e <= lx1; e += 1.0) {
    const double x = px(std::pow(10.0, e));
    svg += "<line x1=\"" + fmt("%.1f", x) + "\" y1=\"" + fmt("%.1f", top) + "\" x2=\"" + fmt("%.1f", x) + "\" y2=\"" +
           fmt("%.1f", height - bottom) + "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + fmt("%.1f", x) + "\" y=\"" + fmt("%.1f", height - bottom + 18) +
           "\" text-anchor=\"middle\">1e" + fmt("%.0f", e) + "</text>\n";
  }
  for (double e = ly0; e <= ly1; e += 1.0) {
    const double y = py(std::pow(10.0, e));
    svg += "<line x1=\"" + fmt("%.1f", left) + "\" y1=\"" + fmt("%.1f", y) + "\" x2=\"" + fmt("%.1f", width - right) +
           "\" y2=\"" + fmt("%.1f", y) + "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + fmt("%.1f", left - 6) + "\" y=\"" + fmt("%.1f", y + 4) + "\" text-anchor=\"end\">1e" +
           fmt("%.0f", e) + "</text>\n";
  }
  svg += "<text x=\"" + fmt("%.1f", (left + width - right) / 2) + "\" y=\"" + fmt("%.1f", height - 16) +
         "\" text-anchor=\"middle\">" + escape(x_label) + "</text>\n";
  svg += "<text transform=\"translate(20," + fmt("%.1f", (top + height - bottom) / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(y_label) + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const std::string color = colors[s % 5];
    std::string points;
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (!(ser.x[i] > 0.0) || !(ser.y[i] > 0.0)) continue;
      points += fmt("%.2f", px(ser.x[i])) + "," + fmt("%.2f", py(ser.y[i])) + " ";
      if (i < ser.err.size() && ser.err[i] > 0.0) {
        const double lo = std::max(ser.y[i] - ser.err[i], std::pow(10.0, ly0));
        svg += "<line x1=\"" + fmt("%.2f", px(ser.x[i])) + "\" y1=\"" + fmt("%.2f", py(lo)) + "\" x2=\"" +
               fmt("%.2f", px(ser.x[i])) + "\" y2=\"" + fmt("%.2f", py(ser.y[i] + ser.err[i])) + "\" stroke=\"" +
               color + "\"/>\n";
      }
      svg += "<circle cx=\"" + fmt("%.2f", px(ser.x[i])) + "\" cy=\"" + fmt("%.2f", py(ser.y[i])) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    svg += "<text x=\"" + fmt("%.1f", left + 10) + "\" y=\"" + fmt("%.1f", top + 16 + 16 * static_cast<double>(s)) +
           "\" fill=\"" + color + "\">" + escape(ser.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace uosdiff
