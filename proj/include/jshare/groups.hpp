#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "jshare/best_response.hpp"
#include "jshare/common.hpp"
#include "jshare/transit.hpp"

namespace jshare {

/// Weakly connected component of the joint plan, schedulable on its own.
struct Group {
  int id = 0;
  std::set<AgentId> agents;
  std::map<EdgeKey, EdgeUse> edges;
  std::map<AgentId, Plan> plans;
};

/// Maximal stretch of a group journey travelled by one fixed set of agents.
struct Part {
  int id = 0;
  std::set<AgentId> agents;
  std::vector<StopId> stops;
  /// Part travelled by each member right before / after this one.
  std::map<AgentId, std::optional<int>> predecessor;
  std::map<AgentId, std::optional<int>> successor;

  std::size_t edge_count() const { return stops.empty() ? 0 : stops.size() - 1; }
  /// True when no member reaches this part from an earlier one.
  bool journey_initial() const;
};

/// Groups ordered by their smallest agent id; ids are 0-based in that order.
std::vector<Group> identify_groups(const JointPlan& joint);

/// Parts numbered in discovery order (agents ascending, legs in travel order).
std::vector<Part> split_into_parts(const Group& group);

/// Agent's parts in travel order.
std::vector<int> parts_of_agent(std::span<const Part> parts, AgentId agent);

/// Topological order of the part precedence relation, or nullopt when it has
/// a cycle.
std::optional<std::vector<int>> part_order(std::span<const Part> parts);

/// Connections that a group may ride: for every part s_1..s_k, all timetabled
/// connections s_i -> s_j with i < j, plus walking links between consecutive
/// part stops.
struct RelevantTimetable {
  int group_id = 0;
  std::vector<TimetabledConnection> connections;
  std::vector<WalkingLink> walking_links;
};

RelevantTimetable relevant_timetable(int group_id, std::span<const Part> parts,
                                     const TransitNetwork& network);

}  // namespace jshare
