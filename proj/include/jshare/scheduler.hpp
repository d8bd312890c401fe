#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jshare/common.hpp"
#include "jshare/groups.hpp"
#include "jshare/planner.hpp"
#include "jshare/transit.hpp"

namespace jshare {

enum class LegMode { service, walk };

/// A concrete ride: one contiguous stretch of one run, or one walk.
struct LegAssignment {
  StopId from_stop;
  StopId to_stop;
  LegMode mode = LegMode::service;
  std::string run_id;
  std::string service_id;
  Minutes board = 0;
  Minutes alight = 0;
  /// seq of the first and last run leg covered (service mode only).
  int first_seq = 0;
  int last_seq = 0;

  bool operator==(const LegAssignment&) const = default;
};

struct PartSchedule {
  int part_id = 0;
  std::vector<LegAssignment> legs;

  Minutes board() const { return legs.front().board; }
  Minutes alight() const { return legs.back().alight; }
};

struct Itinerary {
  AgentId agent;
  std::vector<LegAssignment> legs;
  Minutes depart = 0;
  Minutes arrive = 0;

  Minutes duration() const { return arrive - depart; }
};

struct GroupSchedule {
  int group_id = 0;
  std::map<int, PartSchedule> parts;
  std::map<AgentId, Itinerary> itineraries;

  Minutes total_duration() const;
};

enum class ScheduleStatus { ok, infeasible, timed_out };

struct GroupScheduleOutcome {
  ScheduleStatus status = ScheduleStatus::infeasible;
  std::optional<GroupSchedule> schedule;
  std::string reason;
};

struct ItineraryOutcome {
  ScheduleStatus status = ScheduleStatus::infeasible;
  std::optional<Itinerary> itinerary;
};

/// Wall-clock budget, polled between search expansions.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  static Deadline never() { return Deadline(); }
  static Deadline after(std::chrono::duration<double> limit);

  bool expired() const { return limit_ && Clock::now() >= *limit_; }

 private:
  std::optional<Clock::time_point> limit_;
};

/// Thrown by the part searches when their deadline expires.
class ScheduleTimeout : public Error {
 public:
  ScheduleTimeout() : Error("scheduling time limit exceeded") {}
};

/// Earliest-arrival schedule through the part leaving no earlier than
/// `ready`, using only relevant connections that move forward along the part
/// and walking links between consecutive part stops. nullopt when nothing
/// arrives by the end of the day.
std::optional<PartSchedule> earliest_arrival_in_part(const Part& part, Minutes ready,
                                                     const RelevantTimetable& tt,
                                                     const Deadline& deadline = Deadline::never());

/// Latest-departure schedule through the part arriving no later than
/// `deadline_arrival`.
std::optional<PartSchedule> latest_departure_in_part(const Part& part, Minutes deadline_arrival,
                                                     const RelevantTimetable& tt,
                                                     const Deadline& deadline = Deadline::never());

/// Two-pass group timetabling. Forward: parts in topological order, each
/// reaching its end as early as possible once its last member is ready
/// (minute 0 for journey starts), boarding as late as that arrival allows.
/// Backward: parts that start every member's journey are
/// moved as late as possible without disturbing anything downstream.
GroupScheduleOutcome schedule_group(int group_id, std::span<const Part> parts,
                                    const RelevantTimetable& tt,
                                    std::chrono::duration<double> time_limit);

/// Minimum-duration solo itinerary along the plan's stops. Runs the two-pass
/// policy from every departure time that can start a journey and keeps the
/// shortest result.
ItineraryOutcome schedule_single_agent(const Plan& plan, const TransitNetwork& network,
                                       std::chrono::duration<double> time_limit);

struct SchedulerConfig {
  double small_limit_s = 300.0;
  double medium_limit_s = 600.0;
  double large_limit_s = 900.0;
};

/// Per-group wall-clock limit: small up to 5 agents, medium up to 10,
/// large otherwise.
double time_limit_for(int group_size, const SchedulerConfig& config = {});

/// Throws ConsistencyError when a schedule breaks temporal feasibility:
/// unchained legs, transfers before arrival, journeys beyond one day, or
/// members of a part travelling differently.
void check_schedule(const GroupSchedule& schedule, std::span<const Part> parts);

}  // namespace jshare
