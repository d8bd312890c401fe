#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "jshare/common.hpp"
#include "jshare/transit.hpp"

namespace jshare {

/// One relaxed-domain step of a plan. `minutes` is the edge's solo cost c_i.
struct Leg {
  StopId from;
  StopId to;
  Minutes minutes = 0;

  EdgeKey key() const { return {from, to}; }
  bool operator==(const Leg&) const = default;
};

struct AgentRequest {
  AgentId agent;
  StopId origin;
  StopId destination;
};

/// A single agent's relaxed-domain journey: a simple chained path.
struct Plan {
  AgentId agent;
  StopId origin;
  StopId destination;
  std::vector<Leg> legs;
  /// Cost under the edge-cost function the plan was found with.
  double total_cost = 0.0;

  /// Sum of leg durations, i.e. the cost when travelling alone.
  Minutes solo_minutes() const;
  /// origin, then the `to` stop of every leg.
  std::vector<StopId> stops() const;
};

using EdgeCostFn = std::function<double(EdgeId, const RelaxedEdge&)>;

/// Cost of an edge when travelling alone: its minimal duration.
double duration_cost(EdgeId, const RelaxedEdge& edge);

/// Minimum-cost path from request.origin to request.destination under
/// `edge_cost` (which must be positive on every edge). Ties prefer fewer legs,
/// then the lexicographically smallest stop-id sequence. Returns nullopt when
/// the destination is unreachable.
///
/// Throws InputError for unknown stops or origin == destination.
std::optional<Plan> plan_individual(const RelaxedGraph& graph, const AgentRequest& request,
                                    const EdgeCostFn& edge_cost = duration_cost);

/// Sum of `edge_cost` over the plan's legs. Throws ConsistencyError when a leg
/// has no edge in `graph`.
double plan_cost(const RelaxedGraph& graph, const Plan& plan,
                 const EdgeCostFn& edge_cost = duration_cost);

/// Throws ConsistencyError unless legs chain from origin to destination
/// without revisiting a stop.
void check_plan_shape(const Plan& plan);

}  // namespace jshare
