#include "jshare/best_response.hpp"

#include <cmath>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace jshare {

void SharedCostModel::validate() const {
  const bool in_range = discount_share > 0.0 && discount_share < 1.0 && floor_share > 0.0 &&
                        floor_share < 1.0;
  if (!in_range || std::abs(discount_share + floor_share - 1.0) > 1e-12) {
    throw InputError("cost model shares must lie in (0,1) and sum to 1");
  }
}

double shared_cost(const SharedCostModel& model, double c_single, int n) {
  if (n < 1) throw std::domain_error("shared_cost: group size must be >= 1");
  if (c_single < 0.0) throw std::domain_error("shared_cost: negative cost");
  return (model.discount_share / n + model.floor_share) * c_single;
}

int JointPlan::occupancy(const EdgeKey& key) const {
  auto it = edges.find(key);
  return it == edges.end() ? 0 : static_cast<int>(it->second.agents.size());
}

void JointPlan::replace(const Plan& plan) {
  if (auto old = per_agent.find(plan.agent); old != per_agent.end()) {
    for (const auto& leg : old->second.legs) {
      auto it = edges.find(leg.key());
      if (it == edges.end()) continue;
      it->second.agents.erase(plan.agent);
      if (it->second.agents.empty()) edges.erase(it);
    }
  }
  for (const auto& leg : plan.legs) {
    auto& use = edges[leg.key()];
    use.minutes = leg.minutes;
    use.agents.insert(plan.agent);
  }
  per_agent.insert_or_assign(plan.agent, plan);
}

void JointPlan::check_invariants() const {
  std::map<EdgeKey, std::set<AgentId>> expected;
  for (const auto& [agent, plan] : per_agent) {
    if (plan.agent != agent) throw ConsistencyError("per_agent key mismatch");
    check_plan_shape(plan);
    for (const auto& leg : plan.legs) expected[leg.key()].insert(agent);
  }
  if (expected.size() != edges.size()) {
    throw ConsistencyError("joint plan edge set differs from union of plans");
  }
  for (const auto& [key, use] : edges) {
    auto it = expected.find(key);
    if (it == expected.end() || it->second != use.agents || use.agents.empty()) {
      throw ConsistencyError("label of " + key.first.value + "->" + key.second.value +
                             " disagrees with agent plans");
    }
  }
}

JointPlan merge_plans(std::span<const Plan> plans) {
  JointPlan joint;
  for (const auto& plan : plans) {
    if (joint.per_agent.contains(plan.agent)) {
      throw InputError("duplicate plan for agent " + std::to_string(plan.agent.value));
    }
    joint.replace(plan);
  }
  return joint;
}

double agent_cost(const JointPlan& joint, AgentId agent, const SharedCostModel& model) {
  auto it = joint.per_agent.find(agent);
  if (it == joint.per_agent.end()) {
    throw InputError("agent " + std::to_string(agent.value) + " has no plan");
  }
  double total = 0.0;
  for (const auto& leg : it->second.legs) {
    total += shared_cost(model, leg.minutes, joint.occupancy(leg.key()));
  }
  return total;
}

double joint_cost(const JointPlan& joint, const SharedCostModel& model) {
  double total = 0.0;
  for (const auto& [agent, plan] : joint.per_agent) total += agent_cost(joint, agent, model);
  return total;
}

EdgeCostFn best_response_cost(const JointPlan& joint, AgentId agent,
                              const RelaxedGraph& graph, const SharedCostModel& model) {
  // Occupancy by others, indexed by edge id for the search's inner loop.
  std::vector<int> others(graph.edge_count(), 0);
  for (const auto& [key, use] : joint.edges) {
    auto e = graph.find_edge(key.first, key.second);
    if (!e) continue;
    others[*e] = static_cast<int>(use.agents.size()) - (use.agents.contains(agent) ? 1 : 0);
  }
  return [others = std::move(others), model](EdgeId e, const RelaxedEdge& edge) {
    return shared_cost(model, edge.min_duration, 1 + others[e]);
  };
}

Plan best_response_step(const JointPlan& joint, AgentId agent, const RelaxedGraph& graph,
                        const SharedCostModel& model) {
  auto it = joint.per_agent.find(agent);
  if (it == joint.per_agent.end()) {
    throw InputError("agent " + std::to_string(agent.value) + " has no plan");
  }
  const Plan& current = it->second;
  const double current_cost = agent_cost(joint, agent, model);
  auto response = plan_individual(
      graph, AgentRequest{agent, current.origin, current.destination},
      best_response_cost(joint, agent, graph, model));
  if (!response) {
    spdlog::warn("agent {} cannot reach {}; keeping current plan", agent.value,
                 current.destination.value);
    Plan kept = current;
    kept.total_cost = current_cost;
    return kept;
  }
  if (response->total_cost < current_cost - 1e-9) return *response;
  Plan kept = current;
  kept.total_cost = current_cost;
  return kept;
}

double rosenthal_potential(const JointPlan& joint, const SharedCostModel& model) {
  double total = 0.0;
  for (const auto& [key, use] : joint.edges) {
    const int n = static_cast<int>(use.agents.size());
    for (int k = 1; k <= n; ++k) total += shared_cost(model, use.minutes, k);
  }
  return total;
}

BrPhaseResult run_br_phase(std::span<const Plan> initial, const RelaxedGraph& graph,
                           const SharedCostModel& model, const BrOptions& options) {
  model.validate();
  BrPhaseResult result;
  result.joint = merge_plans(initial);
  result.potential_trace.push_back(rosenthal_potential(result.joint, model));

  double previous = joint_cost(result.joint, model);
  std::vector<AgentId> order;
  for (const auto& [agent, plan] : result.joint.per_agent) order.push_back(agent);

  while (result.sweeps < options.max_rounds) {
    ++result.sweeps;
    int sweep_changes = 0;
    for (AgentId agent : order) {
      Plan next = best_response_step(result.joint, agent, graph, model);
      if (next.legs != result.joint.per_agent.at(agent).legs) {
        ++result.improving_steps;
        ++sweep_changes;
        result.joint.replace(next);
      }
      result.potential_trace.push_back(rosenthal_potential(result.joint, model));
    }
    const double now = joint_cost(result.joint, model);
    // A sweep with moves but an unchanged total is not an equilibrium yet.
    if (std::abs(now - previous) < options.epsilon && sweep_changes == 0) {
      result.converged = true;
      break;
    }
    previous = now;
  }
  if (!result.converged) {
    spdlog::warn("best-response phase stopped after {} sweeps without converging",
                 result.sweeps);
  }
  return result;
}

}  // namespace jshare
