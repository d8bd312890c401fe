// Command-line front end: plan, experiment, synth, validate.
//
// Exit codes: 0 success, 1 input error, 2 internal invariant violation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "jshare/config.hpp"
#include "jshare/harness.hpp"
#include "jshare/json_io.hpp"
#include "jshare/metrics.hpp"

namespace fs = std::filesystem;
using namespace jshare;

namespace {

constexpr int kInputError = 1;
constexpr int kInvariantError = 2;

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

int cmd_plan(const fs::path& stops, const fs::path& timetable, const fs::path& requests_path,
             const std::string& config_path, const std::string& out_dir) {
  ConfigSection settings;
  if (!config_path.empty()) settings = load_config(config_path).global;
  const auto pipeline = pipeline_config_from(settings);

  const auto network = add_walking_links(load_network(stops, timetable), walking_params_from(settings));
  const auto graph = build_relaxed_graph(network);
  std::ifstream req(requests_path);
  if (!req) throw InputError("cannot open " + requests_path.string());
  const auto requests = load_requests(req);

  auto output = run_pipeline(network, graph, requests, pipeline);
  output.result.scenario = "plan";
  if (!output.result.error.empty()) {
    std::cerr << "pipeline error: " << output.result.error << '\n';
    return kInputError;
  }

  nlohmann::json groups = nlohmann::json::array();
  nlohmann::json schedules = nlohmann::json::array();
  for (std::size_t g = 0; g < output.groups.size(); ++g) {
    groups.push_back(to_json(output.groups[g], output.parts[g]));
    schedules.push_back(to_json(output.schedules[g], output.groups[g].id));
  }
  nlohmann::json solo = nlohmann::json::array();
  for (const auto& [agent, outcome] : output.solo) {
    if (outcome.itinerary) solo.push_back(to_json(*outcome.itinerary));
  }

  if (out_dir.empty()) {
    nlohmann::json all{{"joint_plan", to_json(output.joint)},
                       {"groups", groups},
                       {"schedules", schedules},
                       {"solo", solo}};
    std::cout << all.dump(2) << '\n';
  } else {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    auto plans = open_out(dir / "plans.jsonl");
    for (const auto& p : output.initial_plans) plans << to_json(p).dump() << '\n';
    open_out(dir / "joint_plan.json") << to_json(output.joint).dump(2) << '\n';
    open_out(dir / "groups.json") << groups.dump(2) << '\n';
    open_out(dir / "schedules.json") << schedules.dump(2) << '\n';
    open_out(dir / "solo.json") << solo.dump(2) << '\n';
    auto results = open_out(dir / "results.csv");
    write_results_csv(results, std::span(&output.result, 1));
  }

  const auto& r = output.result;
  std::cerr << "agents: " << r.n_agents << ", unreachable: " << r.unreachable.size()
            << ", groups: " << r.groups.size();
  if (r.delta_c) std::cerr << ", delta_c: " << *r.delta_c;
  std::cerr << '\n';
  return 0;
}

int cmd_experiment(const fs::path& matrix_path, const fs::path& out_dir, int parallel) {
  const auto file = load_config(matrix_path);
  const auto scenarios = load_matrix(file, matrix_path.parent_path());
  BatchOptions options;
  options.parallel = parallel;
  options.pipeline = pipeline_config_from(file.global);
  const auto results = run_batch(scenarios, options);
  fs::create_directories(out_dir);
  auto out = open_out(out_dir / "results.csv");
  write_results_csv(out, results);
  std::cerr << "wrote " << results.size() << " experiments to " << (out_dir / "results.csv") << '\n';
  return 0;
}

int cmd_synth(const std::string& grid, const SyntheticNetworkSpec& base, const fs::path& out_dir) {
  SyntheticNetworkSpec spec = base;
  const auto x = grid.find('x');
  if (x == std::string::npos) throw InputError("--grid must look like WxH");
  try {
    spec.width = std::stoi(grid.substr(0, x));
    spec.height = std::stoi(grid.substr(x + 1));
  } catch (const std::exception&) {
    throw InputError("--grid must look like WxH");
  }
  const auto network = generate_synthetic_network(spec);
  write_network_files(network, out_dir);
  std::cerr << network.stops().size() << " stops, " << network.connections().size()
            << " connections\n";
  return 0;
}

int cmd_validate(const fs::path& results_path) {
  std::ifstream in(results_path);
  if (!in) throw InputError("cannot open " + results_path.string());
  const auto rows = read_results_csv(in);
  const auto problems = validate_results(rows);
  for (const auto& p : problems) std::cerr << p << '\n';
  std::cerr << rows.size() << " rows, " << problems.size() << " problems\n";
  return problems.empty() ? 0 : kInvariantError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Journey-sharing planner: best-response joint journeys on transit timetables"};
  app.require_subcommand(1);

  std::string stops, timetable, requests, config, out;
  auto* plan = app.add_subcommand("plan", "plan shared journeys for a request file");
  plan->add_option("--stops", stops, "stops.csv")->required();
  plan->add_option("--timetable", timetable, "timetable.csv")->required();
  plan->add_option("--requests", requests, "requests.csv (agent,origin,destination)")->required();
  plan->add_option("--config", config, "key=value settings");
  plan->add_option("--out", out, "output directory (default: JSON on stdout)");

  std::string matrix, exp_out;
  int parallel = 1;
  auto* experiment = app.add_subcommand("experiment", "run a scenario matrix");
  experiment->add_option("--matrix", matrix, "matrix file")->required();
  experiment->add_option("--out", exp_out, "output directory")->required();
  experiment->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);

  std::string grid, synth_out;
  SyntheticNetworkSpec spec;
  auto* synth = app.add_subcommand("synth", "write a synthetic grid network");
  synth->add_option("--grid", grid, "WxH")->required();
  synth->add_option("--headway", spec.headway, "minutes between runs")->required();
  synth->add_option("--leg", spec.leg_minutes, "minutes per leg")->required();
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--spacing-km", spec.spacing_km, "stop spacing");
  synth->add_option("--first", spec.first_departure, "first run start (minute)");
  synth->add_option("--last", spec.last_departure, "last run start (minute)");
  synth->add_option("--coach-every", spec.coach_every, "every k-th line is a coach line");
  synth->add_option("--coach-headway", spec.coach_headway, "coach headway (minutes)");
  synth->add_option("--coach-leg", spec.coach_leg_minutes, "coach leg (minutes)");
  synth->add_option("--phase-step", spec.phase_step, "per-line timetable offset (minutes)");

  std::string results;
  auto* validate = app.add_subcommand("validate", "re-check invariants of a results.csv");
  validate->add_option("--results", results, "results.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*plan) return cmd_plan(stops, timetable, requests, config, out);
    if (*experiment) return cmd_experiment(matrix, exp_out, parallel);
    if (*synth) return cmd_synth(grid, spec, synth_out);
    if (*validate) return cmd_validate(results);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const ConsistencyError& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kInvariantError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return 0;
}
