#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "bbayes/harness.hpp"

namespace bbayes {

/// Process exit codes shared by the CLI.
enum ExitCode : int { kExitPass = 0, kExitError = 1, kExitToleranceFail = 2 };

inline int exit_code_for(bool pass) { return pass ? kExitPass : kExitToleranceFail; }

struct PlotSeries {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
  // Each line is y = intercept + slope * x over the data range.
  double fit_slope = 0.0;
  double fit_intercept = 0.0;
  double ref_slope = 0.0;
  double ref_intercept = 0.0;
  std::string ref_label;
};

/// SVG with one point series, the fitted line and the reference line. The
/// coordinates are drawn as given (callers pass logs for log-log plots).
void write_svg(std::ostream& os, const PlotSeries& plot);

void write_rate_csv(std::ostream& os, const RateStudyReport& report);
void write_cells_csv(std::ostream& os, const std::vector<RateCell>& cells, const std::string& value_name);
void write_small_ball_csv(std::ostream& os, const SmallBallReport& report);
void write_decay_csv(std::ostream& os, const DecayStudyReport& report);

/// Writes <dir>/rate_study.csv, rate_cells.csv and rate_study.svg. Returns
/// the paths written. Throws IoError naming the offending path.
std::vector<std::filesystem::path> emit_report(const RateStudyReport& report, const std::filesystem::path& dir);
/// small_ball.csv and small_ball.svg.
std::vector<std::filesystem::path> emit_report(const SmallBallReport& report, const std::filesystem::path& dir);
/// decay_study.csv, decay_cells.csv and decay_study.svg.
std::vector<std::filesystem::path> emit_report(const DecayStudyReport& report, const std::filesystem::path& dir);

/// Opens `path` for writing (creating parent directories) and hands the
/// stream to `writer`; failures become IoError with the path.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

}  // namespace bbayes
