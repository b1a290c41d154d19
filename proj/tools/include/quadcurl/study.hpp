#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadcurl/manufactured.hpp"
#include "quadcurl/solver.hpp"

namespace quadcurl {

enum class StudyMode { Convergence, Condition, SingleSolve };
enum class OutputFormat { Csv, Markdown, Json };

/// Invalid study configuration (exit code 2 in the command-line tool).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct StudyConfig {
  int example = 1;
  std::vector<int> n_list;
  double alpha_minus = 1.0;
  double alpha_plus = 1.0;
  /// Unset: 0.01 for example 2, 0 for example 4, 1 otherwise.
  std::optional<double> gamma;
  double lambda = 100.0;
  StudyMode mode = StudyMode::Convergence;
  OutputFormat format = OutputFormat::Csv;
  std::string output_path;
  bool parallel = false;
  /// Fill the wall-time column; off by default so output is reproducible.
  bool timings = false;

  ProblemParams params() const;
  double effective_gamma() const;
};

/// Throws ConfigError.
void validate(const StudyConfig& config);

struct StudyRow {
  int n = 0;
  double h = 0.0;
  int dofs = 0;
  NormSet errors;
  std::optional<NormSet> rates;
  double seconds = 0.0;
  double relative_residual = 0.0;
  double backward_error = 0.0;
  double factor_nonzeros = 0.0;
};

struct ConditionRow {
  int n = 0;
  double h = 0.0;
  int dofs = 0;
  ConditionReport report;
  double seconds = 0.0;
};

struct Slopes {
  double norm_A = 0.0;
  double norm_Ainv = 0.0;
  double cond = 0.0;
};

struct StudyResult {
  StudyConfig config;
  std::vector<StudyRow> rows;
  std::vector<ConditionRow> condition;
  /// Least-squares log-log slopes against h (condition mode, at least two rows).
  std::optional<Slopes> slopes;
  std::vector<std::string> notes;
};

/// log2(coarse / fine); NaN when either value is not positive.
double rate(double coarse, double fine);
/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Runs the configured ladder. Throws ConfigError, GeometryError, SolverError.
StudyResult run_study(const StudyConfig& config);

void write_csv(const StudyResult& result, std::ostream& os);
void write_markdown(const StudyResult& result, std::ostream& os);
void write_json(const StudyResult& result, std::ostream& os);
void write_result(const StudyResult& result, std::ostream& os);

std::string to_string(StudyMode mode);
std::string to_string(OutputFormat format);
StudyMode parse_mode(const std::string& s);
OutputFormat parse_format(const std::string& s);

}  // namespace quadcurl
