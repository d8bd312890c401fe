#include "jshare/json_io.hpp"

namespace jshare {

using nlohmann::json;

json to_json(const Plan& plan) {
  json legs = json::array();
  for (const auto& leg : plan.legs) {
    legs.push_back({{"from", leg.from.value}, {"to", leg.to.value}, {"minutes", leg.minutes}});
  }
  return {{"agent", plan.agent.value},
          {"origin", plan.origin.value},
          {"destination", plan.destination.value},
          {"legs", std::move(legs)},
          {"cost", plan.total_cost}};
}

Plan plan_from_json(const json& j) {
  try {
    Plan plan;
    plan.agent = AgentId(j.at("agent").get<int>());
    plan.origin = StopId(j.at("origin").get<std::string>());
    plan.destination = StopId(j.at("destination").get<std::string>());
    for (const auto& leg : j.at("legs")) {
      plan.legs.push_back(Leg{StopId(leg.at("from").get<std::string>()),
                              StopId(leg.at("to").get<std::string>()),
                              leg.at("minutes").get<Minutes>()});
    }
    plan.total_cost = j.at("cost").get<double>();
    return plan;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed plan JSON: ") + e.what());
  }
}

json to_json(const JointPlan& joint) {
  json edges = json::array();
  for (const auto& [key, use] : joint.edges) {
    json agents = json::array();
    for (AgentId a : use.agents) agents.push_back(a.value);
    edges.push_back({{"from", key.first.value},
                     {"to", key.second.value},
                     {"minutes", use.minutes},
                     {"agents", std::move(agents)}});
  }
  json plans = json::array();
  for (const auto& [agent, plan] : joint.per_agent) plans.push_back(to_json(plan));
  return {{"edges", std::move(edges)}, {"plans", std::move(plans)}};
}

JointPlan joint_plan_from_json(const json& j) {
  std::vector<Plan> plans;
  try {
    for (const auto& p : j.at("plans")) plans.push_back(plan_from_json(p));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed joint plan JSON: ") + e.what());
  }
  JointPlan joint = merge_plans(plans);
  // The edge list is redundant with the plans; make sure it agrees.
  try {
    std::size_t count = 0;
    for (const auto& e : j.at("edges")) {
      ++count;
      const EdgeKey key{StopId(e.at("from").get<std::string>()),
                        StopId(e.at("to").get<std::string>())};
      auto it = joint.edges.find(key);
      std::set<AgentId> agents;
      for (const auto& a : e.at("agents")) agents.insert(AgentId(a.get<int>()));
      if (it == joint.edges.end() || it->second.agents != agents) {
        throw InputError("joint plan edge labels disagree with plans");
      }
    }
    if (count != joint.edges.size()) throw InputError("joint plan edge list incomplete");
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed joint plan JSON: ") + e.what());
  }
  return joint;
}

json to_json(const Group& group, std::span<const Part> parts) {
  json agents = json::array();
  for (AgentId a : group.agents) agents.push_back(a.value);
  json out_parts = json::array();
  for (const auto& part : parts) {
    json stops = json::array();
    for (const auto& s : part.stops) stops.push_back(s.value);
    json members = json::array();
    for (AgentId a : part.agents) members.push_back(a.value);
    out_parts.push_back({{"id", part.id}, {"stops", std::move(stops)}, {"agents", std::move(members)}});
  }
  return {{"group_id", group.id}, {"agents", std::move(agents)}, {"parts", std::move(out_parts)}};
}

json to_json(const LegAssignment& leg) {
  return {{"from", leg.from_stop.value},
          {"to", leg.to_stop.value},
          {"mode", leg.mode == LegMode::service ? "service" : "walk"},
          {"run_id", leg.mode == LegMode::service ? json(leg.run_id) : json(nullptr)},
          {"board", leg.board},
          {"alight", leg.alight}};
}

json to_json(const Itinerary& itinerary) {
  json legs = json::array();
  for (const auto& leg : itinerary.legs) legs.push_back(to_json(leg));
  return {{"agent", itinerary.agent.value},
          {"legs", std::move(legs)},
          {"depart", itinerary.depart},
          {"arrive", itinerary.arrive}};
}

json to_json(const GroupScheduleOutcome& outcome, int group_id) {
  const char* status = outcome.status == ScheduleStatus::ok          ? "ok"
                       : outcome.status == ScheduleStatus::timed_out ? "timed_out"
                                                                     : "infeasible";
  json itineraries = json::array();
  if (outcome.schedule) {
    for (const auto& [agent, it] : outcome.schedule->itineraries) itineraries.push_back(to_json(it));
  }
  return {{"group_id", group_id},
          {"status", status},
          {"reason", outcome.reason},
          {"itineraries", std::move(itineraries)}};
}

}  // namespace jshare
