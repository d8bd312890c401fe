#include "jshare/scheduler.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <tuple>

namespace jshare {

namespace {

constexpr Minutes kUnset = std::numeric_limits<Minutes>::min();
constexpr Minutes kNever = std::numeric_limits<Minutes>::max();

/// A forward hop along a part, between part positions from < to.
struct Move {
  std::size_t from = 0;
  std::size_t to = 0;
  const TimetabledConnection* service = nullptr;  // null for a walk
  Minutes walk = 0;
};

bool continues(const Move* before, const Move& after) {
  return before != nullptr && before->service != nullptr && after.service != nullptr &&
         before->service->run_id == after.service->run_id &&
         before->service->seq + 1 == after.service->seq;
}

/// Moves leaving each part position, services sorted by departure.
std::vector<std::vector<Move>> part_moves(const Part& part, const RelevantTimetable& tt) {
  std::map<StopId, std::size_t> position;
  for (std::size_t i = 0; i < part.stops.size(); ++i) position.emplace(part.stops[i], i);

  std::vector<std::vector<Move>> moves(part.stops.size());
  for (const auto& c : tt.connections) {
    auto f = position.find(c.from_stop);
    auto t = position.find(c.to_stop);
    if (f == position.end() || t == position.end() || f->second >= t->second) continue;
    moves[f->second].push_back(Move{f->second, t->second, &c, 0});
  }
  for (auto& list : moves) {
    std::ranges::sort(list, [](const Move& a, const Move& b) {
      return std::tie(a.service->departure, a.service->service_id, a.service->run_id,
                      a.service->seq) < std::tie(b.service->departure, b.service->service_id,
                                                 b.service->run_id, b.service->seq);
    });
  }
  for (const auto& w : tt.walking_links) {
    auto f = position.find(w.from);
    auto t = position.find(w.to);
    if (f == position.end() || t == position.end() || t->second != f->second + 1) continue;
    moves[f->second].insert(moves[f->second].begin(), Move{f->second, t->second, nullptr, w.duration});
  }
  return moves;
}

/// Turns a chain of timed moves into legs, merging consecutive legs of one run.
PartSchedule to_schedule(const Part& part, const std::vector<std::pair<const Move*, Minutes>>& hops) {
  PartSchedule out;
  out.part_id = part.id;
  const Move* previous = nullptr;
  for (const auto& [move, board] : hops) {
    if (move->service) {
      const auto& c = *move->service;
      if (continues(previous, *move) && !out.legs.empty() && out.legs.back().alight <= c.departure) {
        auto& leg = out.legs.back();
        leg.to_stop = c.to_stop;
        leg.alight = c.arrival();
        leg.last_seq = c.seq;
      } else {
        out.legs.push_back(LegAssignment{c.from_stop, c.to_stop, LegMode::service, c.run_id,
                                         c.service_id, c.departure, c.arrival(), c.seq, c.seq});
      }
    } else {
      out.legs.push_back(LegAssignment{part.stops[move->from], part.stops[move->to], LegMode::walk,
                                       {}, {}, board, board + move->walk, 0, 0});
    }
    previous = move;
  }
  return out;
}

}  // namespace

Deadline Deadline::after(std::chrono::duration<double> limit) {
  Deadline d;
  d.limit_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(limit);
  return d;
}

Minutes GroupSchedule::total_duration() const {
  Minutes total = 0;
  for (const auto& [agent, it] : itineraries) total += it.duration();
  return total;
}

std::optional<PartSchedule> earliest_arrival_in_part(const Part& part, Minutes ready,
                                                     const RelevantTimetable& tt,
                                                     const Deadline& deadline) {
  const std::size_t k = part.stops.size();
  if (k < 2 || ready < 0 || ready >= kDayMinutes) return std::nullopt;
  const auto moves = part_moves(part, tt);

  struct Label {
    Minutes arrival = kNever;
    int boardings = 0;
    const Move* via = nullptr;
    Minutes board = 0;
  };
  std::vector<Label> labels(k);
  labels[0].arrival = ready;

  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (deadline.expired()) throw ScheduleTimeout();
    const Label here = labels[i];
    if (here.arrival == kNever) continue;
    for (const Move& m : moves[i]) {
      Minutes board;
      Minutes arrival;
      if (m.service) {
        if (m.service->departure < here.arrival) continue;
        board = m.service->departure;
        arrival = m.service->arrival();
      } else {
        board = here.arrival;
        arrival = here.arrival + m.walk;
      }
      if (arrival > kDayMinutes) continue;
      const int boardings = here.boardings + (continues(here.via, m) ? 0 : 1);
      Label& there = labels[m.to];
      if (arrival < there.arrival || (arrival == there.arrival && boardings < there.boardings)) {
        there = Label{arrival, boardings, &m, board};
      }
    }
  }
  if (labels[k - 1].arrival == kNever) return std::nullopt;

  std::vector<std::pair<const Move*, Minutes>> hops;
  for (std::size_t at = k - 1; at != 0;) {
    const Label& l = labels[at];
    hops.emplace_back(l.via, l.board);
    at = l.via->from;
  }
  std::ranges::reverse(hops);
  return to_schedule(part, hops);
}

std::optional<PartSchedule> latest_departure_in_part(const Part& part, Minutes deadline_arrival,
                                                     const RelevantTimetable& tt,
                                                     const Deadline& deadline) {
  const std::size_t k = part.stops.size();
  if (k < 2) return std::nullopt;
  deadline_arrival = std::min(deadline_arrival, kDayMinutes);
  const auto moves = part_moves(part, tt);

  struct Label {
    Minutes departure = kUnset;
    int boardings = 0;
    const Move* via = nullptr;
  };
  std::vector<Label> labels(k);
  labels[k - 1].departure = deadline_arrival;

  for (std::size_t i = k - 1; i-- > 0;) {
    if (deadline.expired()) throw ScheduleTimeout();
    Label& here = labels[i];
    for (const Move& m : moves[i]) {
      const Label& next = labels[m.to];
      if (next.departure == kUnset) continue;
      Minutes depart;
      if (m.service) {
        if (m.service->arrival() > next.departure) continue;
        depart = m.service->departure;
      } else {
        depart = next.departure - m.walk;
        if (depart < 0) continue;
      }
      const bool chained = next.via != nullptr && continues(&m, *next.via);
      const int boardings = next.boardings + (chained ? 0 : 1);
      if (depart > here.departure || (depart == here.departure && boardings < here.boardings)) {
        here = Label{depart, boardings, &m};
      }
    }
  }
  if (labels[0].departure == kUnset) return std::nullopt;

  std::vector<std::pair<const Move*, Minutes>> hops;
  for (std::size_t at = 0; at + 1 < k;) {
    const Label& l = labels[at];
    hops.emplace_back(l.via, l.departure);
    at = l.via->to;
  }
  return to_schedule(part, hops);
}

GroupScheduleOutcome schedule_group(int group_id, std::span<const Part> parts,
                                    const RelevantTimetable& tt,
                                    std::chrono::duration<double> time_limit) {
  GroupScheduleOutcome outcome;
  const Deadline deadline = Deadline::after(time_limit);
  auto fail = [&](std::string reason) {
    outcome.status = ScheduleStatus::infeasible;
    outcome.reason = std::move(reason);
    return outcome;
  };

  try {
    const auto order = part_order(parts);
    if (!order) return fail("part precedence has a cycle");

    GroupSchedule schedule;
    schedule.group_id = group_id;
    for (int p : *order) {
      const Part& part = parts[p];
      Minutes ready = 0;
      for (const auto& [agent, pred] : part.predecessor) {
        if (pred) ready = std::max(ready, schedule.parts.at(*pred).alight());
      }
      auto fastest = earliest_arrival_in_part(part, ready, tt, deadline);
      if (!fastest) return fail("no connection for part " + std::to_string(p) + " after minute " +
                                std::to_string(ready));
      // Among schedules reaching that arrival, board as late as possible.
      auto s = latest_departure_in_part(part, fastest->alight(), tt, deadline);
      if (!s || s->board() < ready) throw ConsistencyError("part lost its earliest arrival");
      schedule.parts.insert_or_assign(p, std::move(*s));
    }

    // Wait compression for parts that begin every member's journey.
    for (const Part& part : parts) {
      if (!part.journey_initial()) continue;
      Minutes required = kNever;
      for (const auto& [agent, succ] : part.successor) {
        required = std::min(required, succ ? schedule.parts.at(*succ).board()
                                           : schedule.parts.at(part.id).alight());
      }
      auto s = latest_departure_in_part(part, required, tt, deadline);
      if (!s || s->board() < schedule.parts.at(part.id).board()) {
        throw ConsistencyError("wait compression lost a feasible schedule");
      }
      schedule.parts.insert_or_assign(part.id, std::move(*s));
    }

    std::set<AgentId> agents;
    for (const auto& part : parts) agents.insert(part.agents.begin(), part.agents.end());
    for (AgentId agent : agents) {
      Itinerary it;
      it.agent = agent;
      for (int p : parts_of_agent(parts, agent)) {
        const auto& legs = schedule.parts.at(p).legs;
        it.legs.insert(it.legs.end(), legs.begin(), legs.end());
      }
      it.depart = it.legs.front().board;
      it.arrive = it.legs.back().alight;
      if (it.duration() > kDayMinutes) {
        return fail("agent " + std::to_string(agent.value) + " exceeds one day");
      }
      schedule.itineraries.emplace(agent, std::move(it));
    }
    outcome.status = ScheduleStatus::ok;
    outcome.schedule = std::move(schedule);
  } catch (const ScheduleTimeout&) {
    outcome.status = ScheduleStatus::timed_out;
    outcome.schedule.reset();
    outcome.reason = "time limit exceeded";
  }
  return outcome;
}

ItineraryOutcome schedule_single_agent(const Plan& plan, const TransitNetwork& network,
                                       std::chrono::duration<double> time_limit) {
  ItineraryOutcome outcome;
  if (plan.legs.empty()) return outcome;
  const Deadline deadline = Deadline::after(time_limit);

  Part part;
  part.agents = {plan.agent};
  part.stops = plan.stops();
  part.predecessor[plan.agent] = std::nullopt;
  part.successor[plan.agent] = std::nullopt;
  const Part parts[] = {part};
  const RelevantTimetable tt = relevant_timetable(0, parts, network);

  // Any duration-optimal journey leaves the origin either at minute 0 (walk
  // only) or just in time to catch some service after the walks before it.
  std::map<StopId, Minutes> walk_from_origin{{part.stops.front(), 0}};
  for (std::size_t i = 0; i + 1 < part.stops.size(); ++i) {
    auto w = network.walking_duration(part.stops[i], part.stops[i + 1]);
    if (!w) break;
    walk_from_origin.emplace(part.stops[i + 1], walk_from_origin.at(part.stops[i]) + *w);
  }
  std::set<Minutes> candidates{0};
  for (const auto& c : tt.connections) {
    auto it = walk_from_origin.find(c.from_stop);
    if (it != walk_from_origin.end() && c.departure >= it->second) {
      candidates.insert(c.departure - it->second);
    }
  }

  try {
    std::optional<PartSchedule> best;
    for (Minutes ready : candidates) {
      auto forward = earliest_arrival_in_part(part, ready, tt, deadline);
      if (!forward) continue;
      auto compressed = latest_departure_in_part(part, forward->alight(), tt, deadline);
      if (!compressed) throw ConsistencyError("wait compression lost a feasible schedule");
      const auto duration = compressed->alight() - compressed->board();
      if (!best || duration < best->alight() - best->board() ||
          (duration == best->alight() - best->board() && compressed->alight() < best->alight())) {
        best = std::move(compressed);
      }
    }
    if (!best) return outcome;
    Itinerary it;
    it.agent = plan.agent;
    it.legs = best->legs;
    it.depart = best->board();
    it.arrive = best->alight();
    outcome.status = ScheduleStatus::ok;
    outcome.itinerary = std::move(it);
  } catch (const ScheduleTimeout&) {
    outcome.status = ScheduleStatus::timed_out;
  }
  return outcome;
}

double time_limit_for(int group_size, const SchedulerConfig& config) {
  if (group_size < 1) throw InputError("group size must be at least 1");
  if (group_size <= 5) return config.small_limit_s;
  if (group_size <= 10) return config.medium_limit_s;
  return config.large_limit_s;
}

void check_schedule(const GroupSchedule& schedule, std::span<const Part> parts) {
  for (const auto& [agent, it] : schedule.itineraries) {
    const std::string who = "agent " + std::to_string(agent.value) + ": ";
    if (it.legs.empty()) throw ConsistencyError(who + "empty itinerary");
    for (std::size_t i = 0; i < it.legs.size(); ++i) {
      const auto& leg = it.legs[i];
      if (leg.alight <= leg.board) throw ConsistencyError(who + "leg with non-positive time");
      if (leg.board < 0 || leg.alight > kDayMinutes) {
        throw ConsistencyError(who + "leg outside the service day");
      }
      if (i > 0) {
        const auto& prev = it.legs[i - 1];
        if (prev.to_stop != leg.from_stop) throw ConsistencyError(who + "legs not chained");
        if (leg.board < prev.alight) throw ConsistencyError(who + "boards before arriving");
      }
    }
    if (it.depart != it.legs.front().board || it.arrive != it.legs.back().alight) {
      throw ConsistencyError(who + "depart/arrive disagree with legs");
    }
    if (it.duration() > kDayMinutes) throw ConsistencyError(who + "longer than one day");

    std::vector<LegAssignment> expected;
    for (int p : parts_of_agent(parts, agent)) {
      const auto& legs = schedule.parts.at(p).legs;
      expected.insert(expected.end(), legs.begin(), legs.end());
    }
    if (expected != it.legs) throw ConsistencyError(who + "itinerary differs from its parts");
  }
  for (const auto& part : parts) {
    auto s = schedule.parts.find(part.id);
    if (s == schedule.parts.end()) throw ConsistencyError("part without schedule");
    if (s->second.legs.front().from_stop != part.stops.front() ||
        s->second.legs.back().to_stop != part.stops.back()) {
      throw ConsistencyError("part schedule does not span its part");
    }
  }
}

}  // namespace jshare
