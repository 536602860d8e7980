#include "bbayes/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "bbayes/errors.hpp"

namespace bbayes {

namespace {

std::string fmt(double v) { return std::isfinite(v) ? format_double(v) : (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")); }

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "none"; }

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_notes(std::ostream& os, const std::vector<std::string>& notes) {
  for (const auto& n : notes) os << "# note: " << n << '\n';
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Line with the given slope through the centroid of the points.
double centroid_intercept(const std::vector<double>& x, const std::vector<double>& y, double slope) {
  return mean(y) - slope * mean(x);
}

}  // namespace

void write_svg(std::ostream& os, const PlotSeries& plot) {
  constexpr double W = 640, H = 440, left = 70, right = 20, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!plot.x.empty()) {
    x0 = *std::min_element(plot.x.begin(), plot.x.end());
    x1 = *std::max_element(plot.x.begin(), plot.x.end());
    y0 = *std::min_element(plot.y.begin(), plot.y.end());
    y1 = *std::max_element(plot.y.begin(), plot.y.end());
  }
  auto line_y = [](double slope, double icpt, double x) { return icpt + slope * x; };
  const bool fit_ok = std::isfinite(plot.fit_slope) && std::isfinite(plot.fit_intercept);
  const bool ref_ok = std::isfinite(plot.ref_slope) && std::isfinite(plot.ref_intercept);
  for (double x : {x0, x1}) {
    if (fit_ok) {
      y0 = std::min(y0, line_y(plot.fit_slope, plot.fit_intercept, x));
      y1 = std::max(y1, line_y(plot.fit_slope, plot.fit_intercept, x));
    }
    if (ref_ok) {
      y0 = std::min(y0, line_y(plot.ref_slope, plot.ref_intercept, x));
      y1 = std::max(y1, line_y(plot.ref_slope, plot.ref_intercept, x));
    }
  }
  if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
  if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
  const double padx = 0.05 * (x1 - x0), pady = 0.05 * (y1 - y0);
  x0 -= padx; x1 += padx; y0 -= pady; y1 += pady;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
     << W << ' ' << H << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(plot.title)
     << "</text>\n";
  os << "<path d=\"M" << left << ' ' << top << " V" << top + ph << " H" << left + pw
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    os << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
       << std::round(xv * 100) / 100 << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << fmt(sy(yv) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
       << std::round(yv * 100) / 100 << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\" font-size=\"13\">"
     << escape_xml(plot.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
     << top + ph / 2 << ")\">" << escape_xml(plot.y_label) << "</text>\n";

  auto draw_line = [&](double slope, double icpt, bool ok, const char* colour, const char* dash, const std::string& label) {
    const double lo = plot.x.empty() ? x0 : *std::min_element(plot.x.begin(), plot.x.end());
    const double hi = plot.x.empty() ? x1 : *std::max_element(plot.x.begin(), plot.x.end());
    const double ya = ok ? line_y(slope, icpt, lo) : (y0 + y1) / 2;
    const double yb = ok ? line_y(slope, icpt, hi) : (y0 + y1) / 2;
    os << "<line x1=\"" << fmt(sx(lo)) << "\" y1=\"" << fmt(sy(ya)) << "\" x2=\"" << fmt(sx(hi)) << "\" y2=\""
       << fmt(sy(yb)) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"" << dash << "><title>"
       << escape_xml(label) << "</title></line>\n";
  };
  draw_line(plot.fit_slope, plot.fit_intercept, fit_ok, "#1f77b4", "", "fit slope " + fmt(plot.fit_slope));
  draw_line(plot.ref_slope, plot.ref_intercept, ref_ok, "#d62728", " stroke-dasharray=\"6 4\"", plot.ref_label);

  os << "<g fill=\"black\">\n";
  for (std::size_t i = 0; i < plot.x.size(); ++i)
    os << "<circle cx=\"" << fmt(sx(plot.x[i])) << "\" cy=\"" << fmt(sy(plot.y[i])) << "\" r=\"4\"/>\n";
  os << "</g>\n";
  os << "<text x=\"" << left + 10 << "\" y=\"" << top + 14 << "\" font-size=\"12\" fill=\"#1f77b4\">fit: slope "
     << escape_xml(fmt(plot.fit_slope)) << "</text>\n";
  os << "<text x=\"" << left + 10 << "\" y=\"" << top + 30 << "\" font-size=\"12\" fill=\"#d62728\">"
     << escape_xml(plot.ref_label) << "</text>\n";
  os << "</svg>\n";
}

void write_rate_csv(std::ostream& os, const RateStudyReport& r) {
  os << "# columns: n,median,q1,q3,included,excluded\n";
  os << "# prior=" << r.prior_name << " ceiling=" << fmt(r.ceiling) << '\n';
  os << "# fitted_slope=" << fmt(r.fitted_slope) << " intercept=" << fmt(r.intercept) << " theory=" << fmt(r.theory)
     << " margin=" << fmt(r.margin) << " tolerance=" << fmt(r.tolerance) << '\n';
  os << "# excluded=" << r.excluded << " outside_hypothesis=" << (r.outside_hypothesis ? 1 : 0)
     << " pass=" << (r.pass ? 1 : 0) << '\n';
  write_notes(os, r.notes);
  os << "n,median,q1,q3,included,excluded\n";
  for (const auto& p : r.points)
    os << fmt(p.n) << ',' << fmt(p.median) << ',' << fmt(p.q1) << ',' << fmt(p.q3) << ',' << p.included << ','
       << p.excluded << '\n';
}

void write_cells_csv(std::ostream& os, const std::vector<RateCell>& cells, const std::string& value_name) {
  os << "# columns: n_index,replicate,n,points,excluded," << value_name << "\n";
  os << "n_index,replicate,n,points,excluded," << value_name << '\n';
  for (const auto& c : cells)
    os << c.n_index << ',' << c.replicate << ',' << fmt(c.n) << ',' << c.points << ',' << (c.excluded ? 1 : 0) << ','
       << (c.excluded ? std::string("nan") : fmt(c.error)) << '\n';
}

void write_small_ball_csv(std::ostream& os, const SmallBallReport& r) {
  os << "# columns: eps,probability,se,excluded,log_lower_bound,bound_holds\n";
  os << "# prior=" << r.prior_name << " fitted_exponent=" << fmt(r.fitted_exponent) << " intercept="
     << fmt(r.intercept) << " theory=" << fmt(r.theory) << '\n';
  os << "# monotone=" << (r.monotone ? 1 : 0) << " lemma_D=" << fmt(r.lemma_D) << " lemma_holds="
     << (r.lemma_holds ? 1 : 0) << " tolerance=" << fmt(r.tolerance) << " pass=" << (r.pass ? 1 : 0) << '\n';
  write_notes(os, r.notes);
  os << "eps,probability,se,excluded,log_lower_bound,bound_holds\n";
  for (const auto& row : r.rows)
    os << fmt(row.eps) << ',' << fmt(row.probability) << ',' << fmt(row.se) << ',' << (row.excluded ? 1 : 0) << ','
       << (r.lemma_D ? fmt(row.lemma_bound) : std::string("nan")) << ',' << (row.bound_holds ? 1 : 0) << '\n';
}

void write_decay_csv(std::ostream& os, const DecayStudyReport& r) {
  os << "# columns: n,median_mass,mean_mass,se,included,excluded\n";
  os << "# prior=" << r.prior_name << " r=" << fmt(r.r) << " ceiling=" << fmt(r.ceiling) << '\n';
  os << "# monotone=" << (r.monotone ? 1 : 0) << " decay_slope=" << fmt(r.decay_slope)
     << " pass=" << (r.pass ? 1 : 0) << '\n';
  write_notes(os, r.notes);
  os << "n,median_mass,mean_mass,se,included,excluded\n";
  for (const auto& p : r.points)
    os << fmt(p.n) << ',' << fmt(p.median_mass) << ',' << fmt(p.mean_mass) << ',' << fmt(p.se) << ','
       << p.included << ',' << p.excluded << '\n';
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError(path.string() + ": cannot open for writing");
  writer(os);
  os.flush();
  if (!os) throw IoError(path.string() + ": write failed");
}

std::vector<std::filesystem::path> emit_report(const RateStudyReport& r, const std::filesystem::path& dir) {
  PlotSeries plot;
  plot.title = "posterior error, " + r.prior_name;
  plot.x_label = "log n";
  plot.y_label = "log median error";
  for (const auto& p : r.points) {
    if (p.included == 0 || !(p.median > 0.0)) continue;
    plot.x.push_back(std::log(p.n));
    plot.y.push_back(std::log(p.median));
  }
  plot.fit_slope = r.fitted_slope;
  plot.fit_intercept = r.intercept;
  plot.ref_slope = r.theory.value_or(std::numeric_limits<double>::quiet_NaN());
  plot.ref_intercept = centroid_intercept(plot.x, plot.y, plot.ref_slope);
  plot.ref_label = "theory: slope " + fmt(r.theory);

  const std::vector<std::filesystem::path> paths{dir / "rate_study.csv", dir / "rate_cells.csv",
                                                 dir / "rate_study.svg"};
  write_file(paths[0], [&](std::ostream& os) { write_rate_csv(os, r); });
  write_file(paths[1], [&](std::ostream& os) { write_cells_csv(os, r.cells, "error"); });
  write_file(paths[2], [&](std::ostream& os) { write_svg(os, plot); });
  return paths;
}

std::vector<std::filesystem::path> emit_report(const SmallBallReport& r, const std::filesystem::path& dir) {
  PlotSeries plot;
  plot.title = "small-ball probability, " + r.prior_name;
  plot.x_label = "log(1/eps)";
  plot.y_label = "log(-log P)";
  for (const auto& row : r.rows) {
    if (row.excluded || !(row.probability < 1.0)) continue;
    plot.x.push_back(std::log(1.0 / row.eps));
    plot.y.push_back(std::log(-std::log(row.probability)));
  }
  plot.fit_slope = r.fitted_exponent;
  plot.fit_intercept = r.intercept;
  plot.ref_slope = r.theory.value_or(std::numeric_limits<double>::quiet_NaN());
  plot.ref_intercept = centroid_intercept(plot.x, plot.y, plot.ref_slope);
  plot.ref_label = "theory: exponent " + fmt(r.theory);

  const std::vector<std::filesystem::path> paths{dir / "small_ball.csv", dir / "small_ball.svg"};
  write_file(paths[0], [&](std::ostream& os) { write_small_ball_csv(os, r); });
  write_file(paths[1], [&](std::ostream& os) { write_svg(os, plot); });
  return paths;
}

std::vector<std::filesystem::path> emit_report(const DecayStudyReport& r, const std::filesystem::path& dir) {
  PlotSeries plot;
  plot.title = "posterior mass of the lower-deviation set, " + r.prior_name;
  plot.x_label = "n";
  plot.y_label = "log mean mass";
  for (const auto& p : r.points) {
    if (!(p.mean_mass > 0.0)) continue;
    plot.x.push_back(p.n);
    plot.y.push_back(std::log(p.mean_mass));
  }
  if (r.decay_slope) {
    plot.fit_slope = *r.decay_slope;
    plot.fit_intercept = centroid_intercept(plot.x, plot.y, plot.fit_slope);
  } else {
    plot.fit_slope = std::numeric_limits<double>::quiet_NaN();
  }
  plot.ref_slope = 0.0;
  plot.ref_intercept = plot.y.empty() ? 0.0 : plot.y.front();
  plot.ref_label = "no decay";

  const std::vector<std::filesystem::path> paths{dir / "decay_study.csv", dir / "decay_cells.csv",
                                                 dir / "decay_study.svg"};
  write_file(paths[0], [&](std::ostream& os) { write_decay_csv(os, r); });
  write_file(paths[1], [&](std::ostream& os) { write_cells_csv(os, r.cells, "mass"); });
  write_file(paths[2], [&](std::ostream& os) { write_svg(os, plot); });
  return paths;
}

}  // namespace bbayes
