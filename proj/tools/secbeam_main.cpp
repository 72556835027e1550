// Command-line front end: solve a single design, validate a stored design,
// sweep a scenario knob, or compare CSI models on matched channel draws.
//
// Exit codes: 0 success, 1 bad request or I/O, 2 infeasible, 3 numerical
// failure, 4 validation failure.

#include <secbeam/experiment.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

using namespace secbeam;

namespace {

ProblemKind parse_problem(const std::string& name) {
  return name == "maxmin-eh" ? ProblemKind::MaxMinEH : ProblemKind::PowerMin;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

int exit_code_for(const std::vector<SweepRow>& rows) {
  bool failed = false;
  for (const SweepRow& r : rows) {
    if (r.validation == 0) return 4;
    failed = failed || r.status == "numerical_failure";
  }
  return failed ? 3 : 0;
}

int run_solve(const std::string& scenario_path, const std::string& problem,
              const std::string& model, const std::string& grid, std::uint64_t seed,
              bool seed_set, const std::string& out_path) {
  Scenario sc = load_scenario(scenario_path);
  if (seed_set) sc.rng_seed = seed;
  const ChannelSet ch = realization_channels(sc, 0);

  RunConfig cfg;
  cfg.problem = parse_problem(problem);
  cfg.grid = parse_grid(grid);
  cfg.validation_samples = 0; // `validate` is its own subcommand
  const InstanceOutcome oc = run_instance(model, sc, ch, cfg);

  if (oc.search.status == SearchStatus::AllInfeasible) {
    std::printf("status=infeasible model=%s problem=%s\n", model.c_str(), problem.c_str());
    return 2;
  }
  if (oc.search.status == SearchStatus::NumericalFailure) {
    std::printf("status=numerical_failure value=%.6g message=%s\n", oc.search.failed_value,
                oc.search.message.c_str());
    return 3;
  }
  const Design& d = oc.search.design;
  std::printf(
      "status=optimal model=%s problem=%s objective_w=%.10g rho=%.6f search_param=%.6g "
      "rank_w=%d ratio_w=%.3g extraction=%s\n",
      d.model.c_str(), d.problem.c_str(), d.objective, d.rho, d.search_param, d.rank_W,
      d.ratio_W, d.extraction.c_str());
  if (!out_path.empty()) {
    nlohmann::json j = to_json(d);
    // enough context for `validate` to re-derive the channels
    j["scenario_seed"] = sc.rng_seed;
    j["realization"] = 0;
    write_text_file(out_path, j.dump(2) + "\n");
  }
  return 0;
}

int run_validate(const std::string& design_path, const std::string& scenario_path,
                 int samples, const std::string& out_path) {
  const nlohmann::json j = read_json(design_path);
  const Design d = design_from_json(j);
  Scenario sc = load_scenario(scenario_path);
  if (j.contains("scenario_seed")) sc.rng_seed = j.at("scenario_seed").get<std::uint64_t>();
  const int realization = j.value("realization", 0);
  const ChannelSet ch = realization_channels(sc, realization);

  ValidationReport rep;
  if (d.model == "outage")
    rep = validate_outage(d, sc, ch, samples);
  else if (d.model == "perfect")
    rep = validate_bounded(d, zero_error_twin(sc), ch, samples);
  else
    rep = validate_bounded(d, as_bounded_twin(sc), ch, samples);

  std::printf("validation=%s samples=%d constraints=%zu\n", rep.pass ? "pass" : "fail",
              rep.samples, rep.constraints.size());
  for (const ConstraintCheck& c : rep.constraints)
    if (!c.pass) {
      std::printf("  violated %s: worst=%.6g threshold=%.6g", c.name.c_str(),
                  std::isfinite(c.exact_worst) ? c.exact_worst : c.sampled_worst, c.threshold);
      if (std::isfinite(c.empirical_rate))
        std::printf(" rate=%.4g budget=%.4g", c.empirical_rate, c.budget);
      std::printf("\n");
    }
  if (!out_path.empty()) write_text_file(out_path, to_json(rep).dump(2) + "\n");
  return rep.pass ? 0 : 4;
}

int run_sweep_cmd(const std::string& scenario_path, const std::string& axis,
                  const std::string& values, const std::string& problem,
                  const std::string& model, int realizations, const std::string& grid,
                  std::uint64_t seed, bool seed_set, int samples, bool timing,
                  const std::string& out_path) {
  Scenario sc = load_scenario(scenario_path);
  if (seed_set) sc.rng_seed = seed;

  RunConfig cfg;
  cfg.problem = parse_problem(problem);
  cfg.realizations = realizations;
  cfg.validation_samples = samples;
  cfg.grid = parse_grid(grid);
  cfg.timing = timing;

  const SweepResult res =
      run_sweep(sc, parse_axis(axis), parse_value_range(values), model, cfg);
  write_text_file(out_path, sweep_csv(res));

  for (const AxisSummary& agg : res.summary)
    std::printf("%s=%-8.6g feasible=%d infeasible=%d failed=%d mean_objective_w=%.6g\n",
                axis.c_str(), agg.axis_value, agg.feasible, agg.infeasible, agg.failed,
                agg.mean_objective);
  std::printf("wrote %zu rows to %s\n", res.rows.size(), out_path.c_str());
  return exit_code_for(res.rows);
}

int run_cdf_cmd(const std::string& scenario_path, int realizations,
                const std::string& problem, const std::string& grid, std::uint64_t seed,
                bool seed_set, int samples, const std::string& out_path) {
  Scenario sc = load_scenario(scenario_path);
  if (seed_set) sc.rng_seed = seed;

  RunConfig cfg;
  cfg.problem = parse_problem(problem);
  cfg.realizations = realizations;
  cfg.validation_samples = samples;
  cfg.grid = parse_grid(grid);

  const CdfResult res = run_cdf(sc, cfg);
  write_text_file(out_path, cdf_csv(res));

  for (const std::string& m : res.models) {
    std::vector<double> ok;
    for (double v : res.matched.at(m))
      if (std::isfinite(v)) ok.push_back(v);
    std::sort(ok.begin(), ok.end());
    const double median = ok.empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : ok[ok.size() / 2];
    std::printf("model=%-8s feasible=%zu/%d median_objective_w=%.6g\n", m.c_str(), ok.size(),
                realizations, median);
  }
  std::printf("wrote %zu rows to %s\n", res.rows.size(), out_path.c_str());

  bool violated = false, failed = false;
  for (const CdfRow& r : res.rows) {
    violated = violated || r.validation == 0;
    failed = failed || r.status == "numerical_failure";
  }
  return violated ? 4 : failed ? 3 : 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust secrecy/SWIPT transmit designer for the MISO cognitive downlink"};
  app.require_subcommand(1);

  std::string scenario_path, design_path, out_path;
  std::string problem = "power-min", model = "bounded", grid, axis, values;
  std::uint64_t seed = 0;
  int samples = 10000, realizations = 20;
  bool timing = false;

  const auto problem_check = CLI::IsMember({"power-min", "maxmin-eh"});
  const auto model_check = CLI::IsMember({"bounded", "outage", "perfect"});

  CLI::App* solve = app.add_subcommand("solve", "design one beamformer for channel draw 0");
  solve->add_option("--scenario", scenario_path, "scenario JSON")->required()
      ->check(CLI::ExistingFile);
  solve->add_option("--problem", problem, "power-min or maxmin-eh")->check(problem_check);
  solve->add_option("--model", model, "bounded, outage or perfect")->check(model_check);
  solve->add_option("--grid", grid, "uniform:<step> or log:<points>");
  CLI::Option* solve_seed = solve->add_option("--seed", seed, "override the scenario seed");
  solve->add_option("--out", out_path, "write the design JSON here");

  CLI::App* validate = app.add_subcommand("validate", "check a stored design independently");
  validate->add_option("--design", design_path, "design JSON from solve")->required()
      ->check(CLI::ExistingFile);
  validate->add_option("--scenario", scenario_path, "scenario JSON")->required()
      ->check(CLI::ExistingFile);
  validate->add_option("--samples", samples, "Monte Carlo draws");
  validate->add_option("--out", out_path, "write the report JSON here");

  CLI::App* sweep = app.add_subcommand("sweep", "solve and validate along a scenario axis");
  sweep->add_option("--scenario", scenario_path, "scenario JSON")->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--axis", axis, "rmin, ehrs or antennas")
      ->required()
      ->check(CLI::IsMember({"rmin", "ehrs", "antennas"}));
  sweep->add_option("--values", values, "a:b:step or a single value")->required();
  sweep->add_option("--problem", problem, "power-min or maxmin-eh")->check(problem_check);
  sweep->add_option("--model", model, "bounded, outage or perfect")->check(model_check);
  sweep->add_option("--realizations", realizations, "channel draws per value");
  sweep->add_option("--grid", grid, "uniform:<step> or log:<points>");
  CLI::Option* sweep_seed = sweep->add_option("--seed", seed, "override the scenario seed");
  CLI::Option* sweep_samples =
      sweep->add_option("--samples", samples, "validation draws per design (default 1000)");
  sweep->add_flag("--timing", timing, "record wall-clock solve_ms (non-reproducible)");
  sweep->add_option("--out", out_path, "write the CSV here")->required();

  CLI::App* cdf = app.add_subcommand("cdf", "matched-channel model comparison");
  cdf->add_option("--scenario", scenario_path, "scenario JSON")->required()
      ->check(CLI::ExistingFile);
  cdf->add_option("--realizations", realizations, "matched channel draws");
  cdf->add_option("--problem", problem, "power-min or maxmin-eh")->check(problem_check);
  cdf->add_option("--grid", grid, "uniform:<step> or log:<points>");
  CLI::Option* cdf_seed = cdf->add_option("--seed", seed, "override the scenario seed");
  CLI::Option* cdf_samples =
      cdf->add_option("--samples", samples, "validation draws per design (default 1000)");
  cdf->add_option("--out", out_path, "write the CSV here")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve)
      return run_solve(scenario_path, problem, model, grid, seed, !solve_seed->empty(),
                       out_path);
    if (*validate) {
      if (samples < 1) throw std::invalid_argument("--samples must be positive");
      return run_validate(design_path, scenario_path, samples, out_path);
    }
    if (*sweep)
      return run_sweep_cmd(scenario_path, axis, values, problem, model, realizations, grid,
                           seed, !sweep_seed->empty(),
                           sweep_samples->empty() ? 1000 : samples, timing, out_path);
    if (*cdf)
      return run_cdf_cmd(scenario_path, realizations, problem, grid, seed,
                         !cdf_seed->empty(), cdf_samples->empty() ? 1000 : samples,
                         out_path);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
