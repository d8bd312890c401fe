#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jshare/best_response.hpp"
#include "jshare/config.hpp"
#include "jshare/groups.hpp"
#include "jshare/metrics.hpp"
#include "jshare/planner.hpp"
#include "jshare/scheduler.hpp"
#include "jshare/transit.hpp"

namespace jshare {

/// Regular grid of stops served by straight bidirectional lines along every
/// row and column.
struct SyntheticNetworkSpec {
  int width = 10;
  int height = 10;
  double spacing_km = 8.0;
  Minutes headway = 30;
  Minutes leg_minutes = 10;
  /// Service window for run start times.
  Minutes first_departure = 0;
  Minutes last_departure = kDayMinutes - 1;
  /// When > 0, every coach_every-th line (1-based) is a coach line with its
  /// own headway and leg time.
  int coach_every = 0;
  Minutes coach_headway = 120;
  Minutes coach_leg_minutes = 12;
  /// Start offset added to line L's timetable: (L * phase_step) mod headway.
  Minutes phase_step = 0;
  double origin_lat = 55.0;
  double origin_lon = -4.0;

  /// Throws InputError on non-positive sizes or times.
  void validate() const;

  bool operator==(const SyntheticNetworkSpec&) const = default;
};

TransitNetwork generate_synthetic_network(const SyntheticNetworkSpec& spec);

/// Writes stops.csv and timetable.csv into `dir`.
void write_network_files(const TransitNetwork& network, const std::filesystem::path& dir);

/// Stops split into quadrants by the median latitude and longitude. Stops on
/// an axis belong to no quadrant.
struct Quadrants {
  double axis_lat = 0.0;
  double axis_lon = 0.0;
  std::vector<StopId> north_east;  // I
  std::vector<StopId> north_west;  // II
  std::vector<StopId> south_west;  // III
  std::vector<StopId> south_east;  // IV
};

Quadrants split_quadrants(const TransitNetwork& network);

struct DistanceWindow {
  double min_km = 20.0;
  double max_km = 160.0;

  bool operator==(const DistanceWindow&) const = default;
};

/// Every origin/destination pair allowed for `direction`: N-S pairs run
/// I -> IV or II -> III, the other directions are the rotated analogues.
std::vector<std::pair<StopId, StopId>> admissible_pairs(const TransitNetwork& network,
                                                        Direction direction,
                                                        DistanceWindow window = {});

struct ScenarioConfig {
  std::string scenario = "S";
  int n_agents = 2;
  Direction direction = Direction::NS;
  DistanceWindow window;
  std::uint64_t base_seed = 1;
  int seed_index = 0;

  void validate() const;
};

/// Uniform sampling with replacement from the admissible pairs. Agent ids are
/// 1..n. Throws ScenarioError when no pair is admissible.
std::vector<AgentRequest> generate_requests(const TransitNetwork& network,
                                            const ScenarioConfig& config);
std::vector<AgentRequest> sample_requests(std::span<const std::pair<StopId, StopId>> pairs,
                                          const ScenarioConfig& config);

struct PipelineConfig {
  SharedCostModel cost;
  BrOptions br;
  SchedulerConfig scheduler;
  /// Worker threads for the initial phase and per-group timetabling.
  int threads = 1;
};

/// Everything the three phases produced for one scenario instance.
struct PipelineOutput {
  ExperimentResult result;
  std::vector<Plan> initial_plans;
  JointPlan joint;
  std::vector<Group> groups;
  std::vector<std::vector<Part>> parts;
  std::vector<GroupScheduleOutcome> schedules;
  std::map<AgentId, ItineraryOutcome> solo;
};

/// Initial phase, best-response phase, then timetabling per group and the
/// solo baselines. Stage errors are recorded in result.error.
PipelineOutput run_pipeline(const TransitNetwork& network, const RelaxedGraph& graph,
                            std::span<const AgentRequest> requests,
                            const PipelineConfig& config = {});

struct BatchScenario {
  std::string name = "S";
  std::optional<SyntheticNetworkSpec> synthetic;
  std::filesystem::path stops_csv;
  std::filesystem::path timetable_csv;
  WalkingParams walking;
  std::vector<int> agent_counts{2, 4, 6, 8, 10, 12, 14};
  std::vector<Direction> directions{Direction::NS, Direction::SN, Direction::WE, Direction::EW};
  int seeds = 10;
  std::uint64_t base_seed = 1;
  DistanceWindow window;

  bool operator==(const BatchScenario&) const = default;
};

struct BatchOptions {
  int parallel = 1;
  PipelineConfig pipeline;
};

/// Runs every (scenario, agent count, direction, seed) cell. Results are
/// ordered by that nesting regardless of parallelism.
std::vector<ExperimentResult> run_batch(std::span<const BatchScenario> scenarios,
                                        const BatchOptions& options = {});

/// Reads a matrix file: one `[name]` section per scenario, global keys acting
/// as defaults. A file without sections describes a single scenario when it
/// names a grid or stops file, and no scenario otherwise. Keys: grid (WxH),
/// spacing_km, headway, leg, first_departure, last_departure, coach_every,
/// coach_headway, coach_leg, phase_step, or stops/timetable paths; agents,
/// directions, seeds, base_seed, min_km, max_km, walk.max_km, walk.speed_kmh.
std::vector<BatchScenario> load_matrix(const ConfigFile& file,
                                       const std::filesystem::path& base_dir = {});

/// Pipeline settings from config keys (walk.* are read by load_matrix and the
/// plan command): sched.limit.*_s, br.max_rounds, cost.discount_share,
/// cost.floor_share.
PipelineConfig pipeline_config_from(const ConfigSection& section);
WalkingParams walking_params_from(const ConfigSection& section);

/// The default desk-scale scenario family.
std::vector<BatchScenario> default_scenarios();

/// Reads `agent,origin,destination` CSV.
std::vector<AgentRequest> load_requests(std::istream& in);

}  // namespace jshare
