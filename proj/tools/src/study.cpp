#include "quadcurl/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <ostream>

#include "json.hpp"
#include "quadcurl/errors.hpp"
#include "quadcurl/solver.hpp"

namespace quadcurl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Entry {
  int n = 0;
  Discretization disc;
  SolveReport solve;
  double seconds = 0.0;
};

Entry solve_entry(const Experiment& experiment, const ProblemParams& params, int n) {
  const auto start = Clock::now();
  Entry e;
  e.n = n;
  e.disc = build_discretization(n, experiment.iface);
  const LinearSystem sys = assemble(e.disc, params, experiment.data);
  e.solve = solve(sys.A, sys.b);
  e.seconds = seconds_since(start);
  return e;
}

ConditionRow condition_entry(const Experiment& experiment, const ProblemParams& params, int n) {
  const auto start = Clock::now();
  const Discretization disc = build_discretization(n, experiment.iface);
  const LinearSystem sys = assemble(disc, params, experiment.data);
  const SparseCholesky factor(sys.A);
  ConditionRow row;
  row.n = n;
  row.h = disc.h();
  row.dofs = disc.space.total_dofs();
  row.report = estimate_condition(sys.A, factor);
  row.seconds = seconds_since(start);
  return row;
}

template <class T, class F>
std::vector<T> run_ladder(const std::vector<int>& ns, bool parallel, F&& work) {
  std::vector<T> out;
  out.reserve(ns.size());
  if (!parallel) {
    for (int n : ns) out.push_back(work(n));
    return out;
  }
  std::vector<std::future<T>> jobs;
  for (int n : ns) jobs.push_back(std::async(std::launch::async, work, n));
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string sci(double v) { return fmt("%.6e", v); }
std::string fixed(double v) { return std::isfinite(v) ? fmt("%.4f", v) : std::string(); }

NormSet rates_between(const NormSet& coarse, const NormSet& fine) {
  return {rate(coarse.l2, fine.l2), rate(coarse.curl, fine.curl), rate(coarse.curlcurl, fine.curlcurl),
          rate(coarse.div, fine.div)};
}

double slope_between(double h0, double h1, double v0, double v1) { return std::log(v1 / v0) / std::log(h1 / h0); }

nlohmann::json norms_json(const NormSet& s) {
  return {{"l2", s.l2}, {"curl", s.curl}, {"curlcurl", s.curlcurl}, {"div", s.div}};
}

}  // namespace

double StudyConfig::effective_gamma() const {
  if (gamma) return *gamma;
  if (example == 2) return 0.01;
  if (example == 4) return 0.0;
  return 1.0;
}

ProblemParams StudyConfig::params() const {
  ProblemParams p;
  p.alpha_minus = alpha_minus;
  p.alpha_plus = alpha_plus;
  p.gamma = effective_gamma();
  p.lambda = lambda;
  return p;
}

void validate(const StudyConfig& config) {
  if (config.example < 1 || config.example > 4) {
    throw ConfigError("example must be 1, 2, 3 or 4 (got " + std::to_string(config.example) + ")");
  }
  if (config.n_list.empty()) throw ConfigError("at least one --n value is required");
  for (std::size_t i = 0; i < config.n_list.size(); ++i) {
    if (config.n_list[i] < 1) throw ConfigError("mesh sizes must be positive");
    if (i > 0 && config.n_list[i] <= config.n_list[i - 1]) throw ConfigError("mesh sizes must be strictly increasing");
  }
  if (config.example == 3 && config.mode == StudyMode::Convergence) {
    if (config.n_list.size() < 2) throw ConfigError("example 3 convergence needs at least two mesh sizes");
    for (std::size_t i = 1; i < config.n_list.size(); ++i) {
      if (config.n_list[i] != 2 * config.n_list[i - 1]) {
        throw ConfigError("example 3 convergence needs each mesh size to double the previous one");
      }
    }
  }
  if (!(config.alpha_minus > 0.0) || !(config.alpha_plus > 0.0)) throw ConfigError("alpha must be positive");
  if (!(config.effective_gamma() >= 0.0)) throw ConfigError("gamma must be non-negative");
  if (!(config.lambda > 0.0)) throw ConfigError("lambda must be positive");
}

double rate(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(coarse / fine);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

StudyResult run_study(const StudyConfig& config) {
  validate(config);
  StudyResult result;
  result.config = config;
  const ProblemParams params = config.params();
  const Experiment experiment = make_experiment(config.example, params);
  if (experiment.div_consistency) {
    result.notes.push_back(
        "example 4: the exact field is not divergence free; the right-hand side carries the consistency term "
        "h^-2 (div u, div v) of the divergence penalty");
  }

  if (config.mode == StudyMode::Condition) {
    result.condition = run_ladder<ConditionRow>(config.n_list, config.parallel, [&](int n) {
      return condition_entry(experiment, params, n);
    });
    if (result.condition.size() >= 2) {
      std::vector<double> h, a, ai, k;
      for (const auto& r : result.condition) {
        h.push_back(r.h);
        a.push_back(r.report.norm_A);
        ai.push_back(r.report.norm_Ainv);
        k.push_back(r.report.cond);
      }
      result.slopes = Slopes{loglog_slope(h, a), loglog_slope(h, ai), loglog_slope(h, k)};
    }
    return result;
  }

  std::vector<Entry> entries = run_ladder<Entry>(config.n_list, config.parallel, [&](int n) {
    return solve_entry(experiment, params, n);
  });

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Entry& e = entries[i];
    StudyRow row;
    row.n = e.n;
    row.h = e.disc.h();
    row.dofs = e.disc.space.total_dofs();
    row.seconds = e.seconds;
    row.relative_residual = e.solve.relative_residual;
    row.backward_error = e.solve.backward_error;
    row.factor_nonzeros = e.solve.stats.factor_nonzeros;
    if (config.mode == StudyMode::Convergence) {
      if (experiment.self_convergence) {
        if (i + 1 == entries.size()) break;
        row.errors = self_convergence(e.disc, e.solve.coefficients, entries[i + 1].disc,
                                      entries[i + 1].solve.coefficients)
                         .total;
      } else {
        row.errors = compute_errors(e.disc, e.solve.coefficients, *experiment.exact).total;
      }
      if (!result.rows.empty()) row.rates = rates_between(result.rows.back().errors, row.errors);
    }
    result.rows.push_back(row);
  }
  if (experiment.self_convergence && config.mode == StudyMode::Convergence) {
    result.notes.push_back("example 3: errors are u_h - u_{h/2}, each row measured against the next mesh");
  }
  return result;
}

void write_csv(const StudyResult& result, std::ostream& os) {
  const bool t = result.config.timings;
  const auto secs = [&](double s) { return t ? fmt("%.3f", s) : std::string(); };
  switch (result.config.mode) {
    case StudyMode::Convergence:
      os << "n,h,dofs,e_l2,rate_l2,e_curl,rate_curl,e_curlcurl,rate_curlcurl,e_div,rate_div,seconds\n";
      for (const auto& r : result.rows) {
        const NormSet none{NAN, NAN, NAN, NAN};
        const NormSet& q = r.rates ? *r.rates : none;
        os << r.n << ',' << sci(r.h) << ',' << r.dofs << ',' << sci(r.errors.l2) << ',' << fixed(q.l2) << ','
           << sci(r.errors.curl) << ',' << fixed(q.curl) << ',' << sci(r.errors.curlcurl) << ',' << fixed(q.curlcurl)
           << ',' << sci(r.errors.div) << ',' << fixed(q.div) << ',' << secs(r.seconds) << '\n';
      }
      break;
    case StudyMode::SingleSolve:
      os << "n,h,dofs,relative_residual,backward_error,factor_nonzeros,seconds\n";
      for (const auto& r : result.rows) {
        os << r.n << ',' << sci(r.h) << ',' << r.dofs << ',' << sci(r.relative_residual) << ','
           << sci(r.backward_error) << ',' << fmt("%.0f", r.factor_nonzeros) << ',' << secs(r.seconds) << '\n';
      }
      break;
    case StudyMode::Condition:
      os << "n,h,dofs,norm_A,slope_norm_A,norm_Ainv,slope_norm_Ainv,cond,slope_cond,seconds\n";
      for (std::size_t i = 0; i < result.condition.size(); ++i) {
        const auto& r = result.condition[i];
        std::string sa, sai, sk;
        if (i > 0) {
          const auto& p = result.condition[i - 1];
          sa = fixed(slope_between(p.h, r.h, p.report.norm_A, r.report.norm_A));
          sai = fixed(slope_between(p.h, r.h, p.report.norm_Ainv, r.report.norm_Ainv));
          sk = fixed(slope_between(p.h, r.h, p.report.cond, r.report.cond));
        }
        os << r.n << ',' << sci(r.h) << ',' << r.dofs << ',' << sci(r.report.norm_A) << ',' << sa << ','
           << sci(r.report.norm_Ainv) << ',' << sai << ',' << sci(r.report.cond) << ',' << sk << ','
           << secs(r.seconds) << '\n';
      }
      break;
  }
}

void write_markdown(const StudyResult& result, std::ostream& os) {
  const StudyConfig& c = result.config;
  const ProblemParams p = c.params();
  os << "## Example " << c.example << " (" << to_string(c.mode) << ")\n\n";
  os << "alpha- = " << p.alpha_minus << ", alpha+ = " << p.alpha_plus << ", gamma = " << p.gamma
     << ", lambda = " << p.lambda << "\n\n";
  for (const auto& note : result.notes) os << "> " << note << "\n\n";
  const auto cell = [](const std::string& s) { return s.empty() ? std::string("--") : s; };
  switch (c.mode) {
    case StudyMode::Convergence:
      os << "| n | h | dofs | L2 | rate | curl | rate | curlcurl | rate | div | rate |\n";
      os << "|---|---|---|---|---|---|---|---|---|---|---|\n";
      for (const auto& r : result.rows) {
        const NormSet none{NAN, NAN, NAN, NAN};
        const NormSet& q = r.rates ? *r.rates : none;
        os << "| " << r.n << " | " << fmt("%.4e", r.h) << " | " << r.dofs << " | " << fmt("%.4e", r.errors.l2)
           << " | " << cell(fixed(q.l2)) << " | " << fmt("%.4e", r.errors.curl) << " | " << cell(fixed(q.curl))
           << " | " << fmt("%.4e", r.errors.curlcurl) << " | " << cell(fixed(q.curlcurl)) << " | "
           << fmt("%.4e", r.errors.div) << " | " << cell(fixed(q.div)) << " |\n";
      }
      break;
    case StudyMode::SingleSolve:
      os << "| n | h | dofs | relative residual | backward error |\n|---|---|---|---|---|\n";
      for (const auto& r : result.rows) {
        os << "| " << r.n << " | " << fmt("%.4e", r.h) << " | " << r.dofs << " | " << fmt("%.3e", r.relative_residual)
           << " | " << fmt("%.3e", r.backward_error) << " |\n";
      }
      break;
    case StudyMode::Condition:
      os << "| n | h | dofs | cond | norm A | norm A^-1 |\n|---|---|---|---|---|---|\n";
      for (const auto& r : result.condition) {
        os << "| " << r.n << " | " << fmt("%.4e", r.h) << " | " << r.dofs << " | " << fmt("%.4e", r.report.cond)
           << " | " << fmt("%.4e", r.report.norm_A) << " | " << fmt("%.4e", r.report.norm_Ainv) << " |\n";
      }
      if (result.slopes) {
        os << "\nlog-log slopes against h: cond " << fixed(result.slopes->cond) << ", norm A "
           << fixed(result.slopes->norm_A) << ", norm A^-1 " << fixed(result.slopes->norm_Ainv) << "\n";
      }
      break;
  }
}

void write_json(const StudyResult& result, std::ostream& os) {
  using nlohmann::json;
  const StudyConfig& c = result.config;
  json j;
  j["config"] = {{"example", c.example},
                 {"n", c.n_list},
                 {"alpha_minus", c.alpha_minus},
                 {"alpha_plus", c.alpha_plus},
                 {"gamma", c.effective_gamma()},
                 {"lambda", c.lambda},
                 {"mode", to_string(c.mode)},
                 {"format", to_string(c.format)},
                 {"out", c.output_path},
                 {"parallel", c.parallel},
                 {"timings", c.timings}};
  j["notes"] = result.notes;
  json rows = json::array();
  for (const auto& r : result.rows) {
    json row = {{"n", r.n},
                {"h", r.h},
                {"dofs", r.dofs},
                {"relative_residual", r.relative_residual},
                {"backward_error", r.backward_error}};
    if (c.mode == StudyMode::Convergence) {
      row["errors"] = norms_json(r.errors);
      row["rates"] = r.rates ? norms_json(*r.rates) : json(nullptr);
    }
    if (c.timings) row["seconds"] = r.seconds;
    rows.push_back(row);
  }
  j["rows"] = rows;
  if (c.mode == StudyMode::Condition) {
    json cond = json::array();
    for (const auto& r : result.condition) {
      json row = {{"n", r.n},
                  {"h", r.h},
                  {"dofs", r.dofs},
                  {"norm_A", r.report.norm_A},
                  {"norm_Ainv", r.report.norm_Ainv},
                  {"cond", r.report.cond},
                  {"iterations_A", r.report.iterations_A},
                  {"iterations_Ainv", r.report.iterations_Ainv},
                  {"converged", r.report.converged_A && r.report.converged_Ainv}};
      if (c.timings) row["seconds"] = r.seconds;
      cond.push_back(row);
    }
    j["condition"] = cond;
    if (result.slopes) {
      j["slopes"] = {{"norm_A", result.slopes->norm_A},
                     {"norm_Ainv", result.slopes->norm_Ainv},
                     {"cond", result.slopes->cond}};
    }
  }
  os << j.dump(2) << '\n';
}

void write_result(const StudyResult& result, std::ostream& os) {
  switch (result.config.format) {
    case OutputFormat::Csv:
      write_csv(result, os);
      break;
    case OutputFormat::Markdown:
      write_markdown(result, os);
      break;
    case OutputFormat::Json:
      write_json(result, os);
      break;
  }
}

std::string to_string(StudyMode mode) {
  switch (mode) {
    case StudyMode::Convergence:
      return "convergence";
    case StudyMode::Condition:
      return "condition";
    case StudyMode::SingleSolve:
      return "single-solve";
  }
  return {};
}

std::string to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::Csv:
      return "csv";
    case OutputFormat::Markdown:
      return "markdown";
    case OutputFormat::Json:
      return "json";
  }
  return {};
}

StudyMode parse_mode(const std::string& s) {
  if (s == "convergence") return StudyMode::Convergence;
  if (s == "condition") return StudyMode::Condition;
  if (s == "single-solve") return StudyMode::SingleSolve;
  throw ConfigError("unknown mode '" + s + "'");
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "markdown" || s == "md") return OutputFormat::Markdown;
  if (s == "json") return OutputFormat::Json;
  throw ConfigError("unknown format '" + s + "'");
}

}  // namespace quadcurl
