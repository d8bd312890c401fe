#pragma once

#include <map>
#include <set>
#include <span>
#include <vector>

#include "jshare/common.hpp"
#include "jshare/planner.hpp"
#include "jshare/transit.hpp"

namespace jshare {

/// Group-ticket discount: a leg of solo cost c shared by n travellers costs
/// each of them (discount_share / n + floor_share) * c.
struct SharedCostModel {
  double discount_share = 0.8;
  double floor_share = 0.2;

  /// Throws InputError unless both shares lie in (0, 1) and sum to 1.
  void validate() const;
};

/// Throws std::domain_error when n < 1 or c_single < 0.
double shared_cost(const SharedCostModel& model, double c_single, int n);

struct EdgeUse {
  Minutes minutes = 0;
  std::set<AgentId> agents;

  bool operator==(const EdgeUse&) const = default;
};

/// Labeled union of every agent's plan. An agent is in an edge's label
/// exactly when its plan uses that edge.
struct JointPlan {
  std::map<EdgeKey, EdgeUse> edges;
  std::map<AgentId, Plan> per_agent;

  /// Number of agents on the edge (0 if absent).
  int occupancy(const EdgeKey& key) const;
  /// Swaps in a new plan for plan.agent, keeping labels consistent.
  void replace(const Plan& plan);
  /// Throws ConsistencyError when labels and plans disagree.
  void check_invariants() const;
};

JointPlan merge_plans(std::span<const Plan> plans);

/// C'_i: the agent's legs priced at their current label size.
/// Throws InputError for an agent without a plan.
double agent_cost(const JointPlan& joint, AgentId agent, const SharedCostModel& model);

/// Sum of agent_cost over all agents.
double joint_cost(const JointPlan& joint, const SharedCostModel& model);

/// Best response of `agent` holding all other plans fixed: every edge costs
/// shared_cost(c_e, 1 + m_e) where m_e counts the other agents on it. The
/// current plan is kept unless the optimum is cheaper by more than 1e-9, and
/// also when the agent cannot reach its destination at all.
Plan best_response_step(const JointPlan& joint, AgentId agent, const RelaxedGraph& graph,
                        const SharedCostModel& model);

/// Occupancy-adjusted edge cost seen by `agent` in `joint`.
EdgeCostFn best_response_cost(const JointPlan& joint, AgentId agent,
                              const RelaxedGraph& graph, const SharedCostModel& model);

struct BrOptions {
  int max_rounds = 100;
  double epsilon = 1e-9;
};

struct BrPhaseResult {
  JointPlan joint;
  int sweeps = 0;
  bool converged = false;
  int improving_steps = 0;
  /// Potential before the first step and after every step.
  std::vector<double> potential_trace;
};

/// Round-robin best-response sweeps in ascending agent order until a sweep
/// changes the joint cost by less than epsilon, or max_rounds sweeps ran.
BrPhaseResult run_br_phase(std::span<const Plan> initial, const RelaxedGraph& graph,
                           const SharedCostModel& model, const BrOptions& options = {});

/// Rosenthal potential: sum over edges of sum_{k=1..|label|} shared_cost(c_e, k).
/// Decreases by exactly an agent's cost saving on every unilateral deviation.
double rosenthal_potential(const JointPlan& joint, const SharedCostModel& model);

}  // namespace jshare
