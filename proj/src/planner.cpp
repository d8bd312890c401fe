#include "jshare/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

namespace jshare {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

struct Label {
  double cost = kInf;
  std::size_t legs = 0;
  EdgeId pred = kNone;
  std::size_t version = 0;
};

struct QueueEntry {
  double cost;
  std::size_t legs;
  NodeIndex node;
  std::size_t version;

  bool operator>(const QueueEntry& o) const {
    if (cost != o.cost) return cost > o.cost;
    if (legs != o.legs) return legs > o.legs;
    return node > o.node;
  }
};

std::vector<NodeIndex> path_to(const RelaxedGraph& graph, const std::vector<Label>& labels,
                               NodeIndex node) {
  std::vector<NodeIndex> path{node};
  while (labels[node].pred != kNone) {
    node = graph.edge(labels[node].pred).from;
    path.push_back(node);
  }
  std::ranges::reverse(path);
  return path;
}

}  // namespace

Minutes Plan::solo_minutes() const {
  Minutes total = 0;
  for (const auto& leg : legs) total += leg.minutes;
  return total;
}

std::vector<StopId> Plan::stops() const {
  std::vector<StopId> out{origin};
  for (const auto& leg : legs) out.push_back(leg.to);
  return out;
}

double duration_cost(EdgeId, const RelaxedEdge& edge) {
  return static_cast<double>(edge.min_duration);
}

std::optional<Plan> plan_individual(const RelaxedGraph& graph, const AgentRequest& request,
                                    const EdgeCostFn& edge_cost) {
  const auto origin = graph.index_of(request.origin);
  const auto destination = graph.index_of(request.destination);
  if (!origin) throw InputError("unknown origin stop '" + request.origin.value + "'");
  if (!destination) {
    throw InputError("unknown destination stop '" + request.destination.value + "'");
  }
  if (*origin == *destination) {
    throw InputError("origin equals destination for agent " +
                     std::to_string(request.agent.value));
  }

  std::vector<Label> labels(graph.node_count());
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;
  labels[*origin].cost = 0.0;
  queue.push({0.0, 0, *origin, 0});

  while (!queue.empty()) {
    const QueueEntry top = queue.top();
    queue.pop();
    if (labels[top.node].version != top.version) continue;
    for (EdgeId e : graph.out_edges(top.node)) {
      const RelaxedEdge& edge = graph.edge(e);
      const double w = edge_cost(e, edge);
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw InputError("edge cost must be positive and finite");
      }
      const double cost = top.cost + w;
      const std::size_t legs = top.legs + 1;
      Label& target = labels[edge.to];
      bool better = false;
      if (target.cost == kInf || (!nearly_equal(cost, target.cost) && cost < target.cost)) {
        better = true;
      } else if (nearly_equal(cost, target.cost)) {
        if (legs != target.legs) {
          better = legs < target.legs;
        } else if (target.pred != e) {
          auto candidate = path_to(graph, labels, top.node);
          candidate.push_back(edge.to);
          better = candidate < path_to(graph, labels, edge.to);
        }
      }
      if (!better) continue;
      target.cost = cost;
      target.legs = legs;
      target.pred = e;
      ++target.version;
      queue.push({cost, legs, edge.to, target.version});
    }
  }

  if (labels[*destination].cost == kInf) return std::nullopt;

  Plan plan;
  plan.agent = request.agent;
  plan.origin = request.origin;
  plan.destination = request.destination;
  plan.total_cost = labels[*destination].cost;
  for (NodeIndex n = *destination; labels[n].pred != kNone;) {
    const RelaxedEdge& edge = graph.edge(labels[n].pred);
    plan.legs.push_back(Leg{graph.node_id(edge.from), graph.node_id(edge.to), edge.min_duration});
    n = edge.from;
  }
  std::ranges::reverse(plan.legs);
  return plan;
}

double plan_cost(const RelaxedGraph& graph, const Plan& plan, const EdgeCostFn& edge_cost) {
  double total = 0.0;
  for (const auto& leg : plan.legs) {
    auto e = graph.find_edge(leg.from, leg.to);
    if (!e) {
      throw ConsistencyError("plan leg " + leg.from.value + "->" + leg.to.value +
                             " is not an edge of the relaxed graph");
    }
    total += edge_cost(*e, graph.edge(*e));
  }
  return total;
}

void check_plan_shape(const Plan& plan) {
  std::set<StopId> seen{plan.origin};
  StopId at = plan.origin;
  for (const auto& leg : plan.legs) {
    if (leg.from != at) {
      throw ConsistencyError("plan of agent " + std::to_string(plan.agent.value) +
                             " is not chained at " + leg.from.value);
    }
    if (!seen.insert(leg.to).second) {
      throw ConsistencyError("plan of agent " + std::to_string(plan.agent.value) +
                             " revisits " + leg.to.value);
    }
    at = leg.to;
  }
  if (!plan.legs.empty() && at != plan.destination) {
    throw ConsistencyError("plan of agent " + std::to_string(plan.agent.value) +
                           " does not end at its destination");
  }
}

}  // namespace jshare
