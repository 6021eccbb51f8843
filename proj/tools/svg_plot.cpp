#include "svg_plot.hpp"

#include "membrane/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace membrane::cli {
namespace {

const char* kConvergenceHeader = "dim,object,model,N,M,epsilon,quantity,max_error,cond_estimate,status";
const char* kSweepHeader = "object,N,M,epsilon,max_error,cond_estimate";
const char* kEpsilonHeader = "epsilon,gap,cond_estimate,status";

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double number(const std::string& cell, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || *end != '\0') throw ParseError(line, "expected a number, got '" + cell + "'");
  return v;
}

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

struct Range {
  double lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
  void add(double v) { lo = std::min(lo, v), hi = std::max(hi, v); }
  bool empty() const { return lo > hi; }
};

bool plottable(double x, double y, bool log_x) {
  return std::isfinite(x) && std::isfinite(y) && y > 0 && (!log_x || x > 0);
}

}  // namespace

PlotSpec plot_spec_from_csv(std::istream& in, const std::string& title) {
  std::string header;
  if (!std::getline(in, header) || header.empty()) throw ParseError(1, "empty CSV");
  if (header.back() == '\r') header.pop_back();
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  const std::size_t width = split(header).size();
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != width)
      throw ParseError(line_no, "expected " + std::to_string(width) + " cells, got " +
                                    std::to_string(cells.size()));
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw ParseError(line_no, "CSV has a header but no rows");

  PlotSpec spec;
  spec.title = title;
  std::map<std::string, Series> by_key;
  std::vector<std::string> order;
  auto add = [&](const std::string& key, double x, double y) {
    if (!by_key.count(key)) {
      by_key[key].label = key;
      order.push_back(key);
    }
    by_key[key].points.emplace_back(x, y);
  };

  if (header == kConvergenceHeader) {
    spec.x_label = "N (data sites)";
    spec.y_label = "max error";
    std::set<std::string> dims, objects, quantities;
    for (const auto& r : rows) dims.insert(r[0]), objects.insert(r[1]), quantities.insert(r[6]);
    std::size_t line = 1;
    for (const auto& r : rows) {
      ++line;
      std::string key;
      if (dims.size() > 1) key += r[0] + "D ";
      if (objects.size() > 1) key += r[1] + " ";
      if (quantities.size() > 1) key += r[6] + " ";
      key += r[2];
      add(key, number(r[3], line), number(r[7], line));
    }
    for (auto& [key, s] : by_key)
      s.reference = key.size() >= 3 && key.compare(key.size() - 3, 3, "pwl") == 0 && s.points.size() == 1;
  } else if (header == kSweepHeader) {
    spec.x_label = "shape parameter";
    spec.y_label = "max shape error";
    spec.log_x = true;
    std::size_t line = 1;
    for (const auto& r : rows) {
      ++line;
      add(r[0] + " N=" + r[1], number(r[3], line), number(r[4], line));
    }
  } else if (header == kEpsilonHeader) {
    spec.x_label = "shape parameter";
    spec.y_label = "RBF - trigonometric gap";
    spec.log_x = true;
    std::size_t line = 1;
    for (const auto& r : rows) {
      ++line;
      add("gap", number(r[0], line), number(r[1], line));
    }
  } else {
    throw ParseError(1, "unrecognized CSV header '" + header + "'");
  }
  for (const auto& key : order) {
    auto& s = by_key[key];
    std::sort(s.points.begin(), s.points.end());
    spec.series.push_back(std::move(s));
  }
  return spec;
}

std::string render_svg(const PlotSpec& spec) {
  constexpr double W = 720, H = 440, L = 80, R = 190, T = 40, B = 60;
  const double pw = W - L - R, ph = H - T - B;

  Range xr, yr;
  for (const auto& s : spec.series)
    for (const auto& [x, y] : s.points)
      if (plottable(x, y, spec.log_x)) {
        if (!s.reference) xr.add(spec.log_x ? std::log10(x) : x);
        yr.add(std::log10(y));
      }
  if (xr.empty()) xr = {0, 1};
  if (yr.empty()) yr = {-1, 0};
  double ylo = std::floor(yr.lo), yhi = std::ceil(yr.hi);
  if (yhi <= ylo) yhi = ylo + 1;
  double xlo = xr.lo, xhi = xr.hi;
  if (spec.log_x) xlo = std::floor(xlo), xhi = std::ceil(xhi);
  if (xhi <= xlo) xlo -= 1, xhi += 1;

  auto px = [&](double x) { return L + (( spec.log_x ? std::log10(x) : x) - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) { return T + (yhi - std::log10(y)) / (yhi - ylo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << L + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(spec.title) << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  // y ticks at decades, thinned so at most ten are labelled.
  const int ystep = std::max(1, static_cast<int>(std::ceil((yhi - ylo) / 10)));
  for (int e = static_cast<int>(ylo); e <= static_cast<int>(yhi); e += ystep) {
    const double y = py(std::pow(10.0, e));
    o << "<line x1=\"" << L << "\" y1=\"" << fmt("%.2f", y) << "\" x2=\"" << L + pw << "\" y2=\""
      << fmt("%.2f", y) << "\" stroke=\"#dddddd\"/>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << fmt("%.2f", y + 4)
      << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  std::vector<double> xticks;
  if (spec.log_x) {
    for (int e = static_cast<int>(xlo); e <= static_cast<int>(xhi); ++e) xticks.push_back(std::pow(10.0, e));
  } else {
    for (int i = 0; i <= 6; ++i) xticks.push_back(xlo + (xhi - xlo) * i / 6);
  }
  for (double xt : xticks) {
    const double x = px(xt);
    o << "<line x1=\"" << fmt("%.2f", x) << "\" y1=\"" << T + ph << "\" x2=\"" << fmt("%.2f", x)
      << "\" y2=\"" << T + ph + 5 << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt("%.2f", x) << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\">"
      << (spec.log_x ? "1e" + std::to_string(static_cast<int>(std::lround(std::log10(xt)))) : fmt("%g", xt))
      << "</text>\n";
  }
  o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">"
    << escape(spec.x_label) << "</text>\n";
  o << "<text x=\"18\" y=\"" << T + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << T + ph / 2 << ")\">" << escape(spec.y_label) << "</text>\n";

  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const auto& s = spec.series[i];
    const char* color = kColors[i % std::size(kColors)];
    std::string pts;
    for (const auto& [x, y] : s.points) {
      if (!plottable(x, y, spec.log_x)) continue;
      if (s.reference) {
        const std::string yy = fmt("%.2f", py(y));
        pts = fmt("%.2f", L) + "," + yy + " " + fmt("%.2f", L + pw) + "," + yy;
        break;
      }
      if (!pts.empty()) pts += ' ';
      pts += fmt("%.2f", px(x)) + "," + fmt("%.2f", py(y));
    }
    o << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
      << (s.reference ? " stroke-dasharray=\"6 4\"" : "") << " points=\"" << pts << "\"><title>"
      << escape(s.label) << "</title></polyline>\n";
    if (!s.reference)
      for (const auto& [x, y] : s.points)
        if (plottable(x, y, spec.log_x))
          o << "<circle cx=\"" << fmt("%.2f", px(x)) << "\" cy=\"" << fmt("%.2f", py(y))
            << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    const double ly = T + 14 + 18 * static_cast<double>(i);
    o << "<line x1=\"" << L + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << L + pw + 36 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << L + pw + 42 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace membrane::cli
