#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jshare/best_response.hpp"
#include "jshare/common.hpp"
#include "jshare/planner.hpp"
#include "jshare/scheduler.hpp"

namespace jshare {

enum class Direction { NS, SN, WE, EW };

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view text);

struct GroupResult {
  int group_id = 0;
  int size = 0;
  bool matched = false;
  bool timed_out = false;
  /// Sum of member durations under the group timetable (matched groups).
  Minutes group_duration = 0;
  /// Solo timetable durations of members that got one.
  std::map<AgentId, Minutes> solo_durations;
  std::optional<double> delta_t;
};

struct PhaseTimings {
  double initial_ms = 0.0;
  double br_ms = 0.0;
  double timetabling_ms = 0.0;
  double total_ms = 0.0;
};

struct ExperimentResult {
  std::string scenario;
  int n_agents = 0;
  Direction direction = Direction::NS;
  std::uint64_t seed = 0;
  std::optional<double> delta_c;
  std::vector<GroupResult> groups;
  std::vector<AgentId> unreachable;
  std::map<AgentId, double> initial_cost;
  std::map<AgentId, double> shared_cost;
  bool br_converged = true;
  int br_sweeps = 0;
  PhaseTimings timings;
  std::string error;
};

/// Relative saving of the joint plan over the initial solo plans. Only agents
/// present in `joint` are counted. Throws InputError when the initial total
/// is zero.
double cost_improvement(std::span<const Plan> initial, const JointPlan& joint,
                        const SharedCostModel& model);

/// Relative prolongation of group itineraries over solo ones. nullopt when a
/// group member has no solo itinerary or the solo total is zero.
std::optional<double> prolongation(const std::map<AgentId, Itinerary>& group,
                                   const std::map<AgentId, Itinerary>& solo);
std::optional<double> prolongation(Minutes group_total, Minutes solo_total);

/// Group size -> fraction of groups of that size that got a timetable.
std::map<int, double> success_rates(std::span<const ExperimentResult> results);

/// Group size -> fraction of groups of that size whose timetable prolongs the
/// journey by less than `threshold`.
std::map<int, double> prolongation_share_below(std::span<const ExperimentResult> results,
                                               double threshold = 0.30);

/// Duration-weighted prolongation over the experiment's matched groups.
std::optional<double> scenario_prolongation(const ExperimentResult& result);

inline constexpr std::string_view kResultsHeader =
    "scenario,n_agents,direction,seed,delta_c,group_id,group_size,matched,timed_out,delta_t,"
    "t_initial_ms,t_br_ms,t_timetabling_ms,t_total_ms";

/// One summary row per experiment (empty group fields) followed by one row per
/// group.
void write_results_csv(std::ostream& out, std::span<const ExperimentResult> results);

/// Parsed results.csv row.
struct ResultRow {
  std::size_t line = 0;
  std::string scenario;
  int n_agents = 0;
  Direction direction = Direction::NS;
  std::uint64_t seed = 0;
  std::optional<double> delta_c;
  std::optional<int> group_id;
  std::optional<int> group_size;
  std::optional<bool> matched;
  std::optional<bool> timed_out;
  std::optional<double> delta_t;
  PhaseTimings timings;
};

std::vector<ResultRow> read_results_csv(std::istream& in);

/// Invariant violations found in a results table, one message each.
std::vector<std::string> validate_results(std::span<const ResultRow> rows);

/// Drops the timing columns; used to compare runs for determinism.
std::string strip_timing_columns(const std::string& csv_text);

}  // namespace jshare
