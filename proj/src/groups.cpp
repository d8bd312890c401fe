#include "jshare/groups.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace jshare {

namespace {

class DisjointSets {
 public:
  std::size_t add() {
    parent_.push_back(parent_.size());
    return parent_.size() - 1;
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

bool Part::journey_initial() const {
  return std::ranges::all_of(predecessor, [](const auto& kv) { return !kv.second; });
}

std::vector<Group> identify_groups(const JointPlan& joint) {
  DisjointSets sets;
  std::map<StopId, std::size_t> node;
  auto id_of = [&](const StopId& s) {
    auto [it, inserted] = node.emplace(s, 0);
    if (inserted) it->second = sets.add();
    return it->second;
  };
  for (const auto& [key, use] : joint.edges) sets.unite(id_of(key.first), id_of(key.second));

  // Component root -> group, created in ascending agent order.
  std::map<std::size_t, std::size_t> group_of_root;
  std::vector<Group> groups;
  for (const auto& [agent, plan] : joint.per_agent) {
    std::optional<std::size_t> root;
    for (const auto& leg : plan.legs) {
      const std::size_t r = sets.find(id_of(leg.from));
      if (root && *root != r) {
        throw ConsistencyError("agent " + std::to_string(agent.value) +
                               " has legs in two components");
      }
      root = r;
    }
    std::size_t g;
    if (!root) {
      g = groups.size();
      groups.emplace_back();
    } else if (auto it = group_of_root.find(*root); it != group_of_root.end()) {
      g = it->second;
    } else {
      g = groups.size();
      groups.emplace_back();
      group_of_root.emplace(*root, g);
    }
    Group& group = groups[g];
    group.id = static_cast<int>(g);
    group.agents.insert(agent);
    group.plans.emplace(agent, plan);
    for (const auto& leg : plan.legs) group.edges.insert_or_assign(leg.key(), joint.edges.at(leg.key()));
  }
  return groups;
}

std::vector<Part> split_into_parts(const Group& group) {
  std::vector<Part> parts;
  std::map<EdgeKey, int> part_of_edge;

  for (const auto& [agent, plan] : group.plans) {
    const auto& legs = plan.legs;
    std::vector<int> sequence;
    std::size_t k = 0;
    while (k < legs.size()) {
      const auto& label = group.edges.at(legs[k].key()).agents;
      std::size_t end = k + 1;
      while (end < legs.size() && group.edges.at(legs[end].key()).agents == label) ++end;

      if (auto it = part_of_edge.find(legs[k].key()); it != part_of_edge.end()) {
        const Part& existing = parts[it->second];
        if (existing.edge_count() != end - k || existing.stops.front() != legs[k].from) {
          throw ConsistencyError("part boundaries differ between members");
        }
        sequence.push_back(existing.id);
      } else {
        Part part;
        part.id = static_cast<int>(parts.size());
        part.agents = label;
        part.stops.push_back(legs[k].from);
        for (std::size_t i = k; i < end; ++i) {
          part.stops.push_back(legs[i].to);
          part_of_edge.emplace(legs[i].key(), part.id);
        }
        sequence.push_back(part.id);
        parts.push_back(std::move(part));
      }
      k = end;
    }
    for (std::size_t i = 0; i < sequence.size(); ++i) {
      Part& part = parts[sequence[i]];
      part.predecessor[agent] = i == 0 ? std::nullopt : std::optional<int>(sequence[i - 1]);
      part.successor[agent] =
          i + 1 == sequence.size() ? std::nullopt : std::optional<int>(sequence[i + 1]);
    }
  }
  return parts;
}

std::vector<int> parts_of_agent(std::span<const Part> parts, AgentId agent) {
  std::vector<int> out;
  for (const auto& part : parts) {
    auto it = part.predecessor.find(agent);
    if (it != part.predecessor.end() && !it->second) {
      out.push_back(part.id);
      break;
    }
  }
  while (!out.empty()) {
    const auto& next = parts[out.back()].successor.at(agent);
    if (!next) break;
    if (out.size() > parts.size()) throw ConsistencyError("part chain loops");
    out.push_back(*next);
  }
  return out;
}

std::optional<std::vector<int>> part_order(std::span<const Part> parts) {
  std::vector<std::set<int>> next(parts.size());
  std::vector<int> indegree(parts.size(), 0);
  for (const auto& part : parts) {
    for (const auto& [agent, succ] : part.successor) {
      if (succ && next[part.id].insert(*succ).second) ++indegree[*succ];
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (indegree[i] == 0) ready.push(static_cast<int>(i));
  }
  std::vector<int> order;
  while (!ready.empty()) {
    const int p = ready.top();
    ready.pop();
    order.push_back(p);
    for (int q : next[p]) {
      if (--indegree[q] == 0) ready.push(q);
    }
  }
  if (order.size() != parts.size()) return std::nullopt;
  return order;
}

RelevantTimetable relevant_timetable(int group_id, std::span<const Part> parts,
                                     const TransitNetwork& network) {
  RelevantTimetable tt;
  tt.group_id = group_id;
  std::set<std::size_t> chosen;
  std::set<EdgeKey> walks;
  for (const auto& part : parts) {
    const auto& s = part.stops;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        for (std::size_t c : network.connections_between(s[i], s[j])) chosen.insert(c);
      }
      if (i + 1 < s.size() && network.walking_duration(s[i], s[i + 1])) {
        walks.emplace(s[i], s[i + 1]);
      }
    }
  }
  for (std::size_t c : chosen) tt.connections.push_back(network.connections()[c]);
  for (const auto& [from, to] : walks) {
    tt.walking_links.push_back(WalkingLink{from, to, *network.walking_duration(from, to)});
  }
  return tt;
}

}  // namespace jshare
