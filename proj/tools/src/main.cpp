#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "quadcurl/errors.hpp"
#include "quadcurl/study.hpp"

namespace {

using quadcurl::ConfigError;
using quadcurl::StudyConfig;

void load_config_file(const std::string& path, StudyConfig& c) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
    if (j.contains("example")) c.example = j.at("example").get<int>();
    if (j.contains("n")) c.n_list = j.at("n").get<std::vector<int>>();
    if (j.contains("alpha_minus")) c.alpha_minus = j.at("alpha_minus").get<double>();
    if (j.contains("alpha_plus")) c.alpha_plus = j.at("alpha_plus").get<double>();
    if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
    if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
    if (j.contains("mode")) c.mode = quadcurl::parse_mode(j.at("mode").get<std::string>());
    if (j.contains("format")) c.format = quadcurl::parse_format(j.at("format").get<std::string>());
    if (j.contains("out")) c.output_path = j.at("out").get<std::string>();
    if (j.contains("parallel")) c.parallel = j.at("parallel").get<bool>();
    if (j.contains("timings")) c.timings = j.at("timings").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unfitted Nitsche solver for the quad-curl interface problem"};

  std::string config_path, mode, format, out;
  int example = 1;
  std::vector<int> n_list;
  double alpha_minus = 1.0, alpha_plus = 1.0, gamma = 1.0, lambda = 100.0;
  bool parallel = false, timings = false;

  app.add_option("--config", config_path, "JSON file with study settings; flags override it");
  auto* o_example = app.add_option("--example", example, "Experiment 1-4");
  auto* o_n = app.add_option("--n", n_list, "Cells per side (repeatable)");
  auto* o_am = app.add_option("--alpha-minus", alpha_minus, "Coefficient alpha in Omega-");
  auto* o_ap = app.add_option("--alpha-plus", alpha_plus, "Coefficient alpha in Omega+");
  auto* o_gamma = app.add_option("--gamma", gamma, "Zeroth-order coefficient (default depends on example)");
  auto* o_lambda = app.add_option("--lambda", lambda, "Interface penalty");
  auto* o_mode = app.add_option("--mode", mode, "convergence | condition | single-solve");
  auto* o_format = app.add_option("--format", format, "csv | markdown | json");
  auto* o_out = app.add_option("--out", out, "Output file (default stdout)");
  auto* o_parallel = app.add_flag("--parallel", parallel, "Run ladder entries concurrently");
  auto* o_timings = app.add_flag("--timings", timings, "Report wall times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    StudyConfig c;
    if (!config_path.empty()) load_config_file(config_path, c);
    if (o_example->count()) c.example = example;
    if (o_n->count()) c.n_list = n_list;
    if (o_am->count()) c.alpha_minus = alpha_minus;
    if (o_ap->count()) c.alpha_plus = alpha_plus;
    if (o_gamma->count()) c.gamma = gamma;
    if (o_lambda->count()) c.lambda = lambda;
    if (o_mode->count()) c.mode = quadcurl::parse_mode(mode);
    if (o_format->count()) c.format = quadcurl::parse_format(format);
    if (o_out->count()) c.output_path = out;
    if (o_parallel->count()) c.parallel = parallel;
    if (o_timings->count()) c.timings = timings;

    const quadcurl::StudyResult result = quadcurl::run_study(c);
    if (c.format == quadcurl::OutputFormat::Csv) {
      for (const auto& note : result.notes) std::cerr << "note: " << note << '\n';
    }
    if (c.output_path.empty()) {
      quadcurl::write_result(result, std::cout);
    } else {
      std::ofstream file(c.output_path);
      if (!file) throw ConfigError("cannot write " + c.output_path);
      quadcurl::write_result(result, file);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const quadcurl::GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << '\n';
    return 3;
  } catch (const quadcurl::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
