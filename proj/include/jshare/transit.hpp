#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jshare/common.hpp"

namespace jshare {

enum class Mode { rail, coach, walk_node };

std::string_view to_string(Mode mode);
/// Accepts "rail", "coach", "walk-node".
std::optional<Mode> parse_mode(std::string_view text);

struct Stop {
  StopId id;
  std::string name;
  double lat = 0.0;
  double lon = 0.0;
  Mode mode = Mode::rail;

  bool operator==(const Stop&) const = default;
};

/// One leg of one vehicle journey (run) between two consecutive stops.
struct TimetabledConnection {
  std::string service_id;
  std::string run_id;
  int seq = 1;
  StopId from_stop;
  StopId to_stop;
  Minutes departure = 0;
  Minutes duration = 1;

  Minutes arrival() const { return departure + duration; }
  bool operator==(const TimetabledConnection&) const = default;
};

/// Untimetabled walking transfer, usable at any minute.
struct WalkingLink {
  StopId from;
  StopId to;
  Minutes duration = 1;

  bool operator==(const WalkingLink&) const = default;
};

/// Validated, immutable transit network: the raw material of the full domain.
///
/// Construction sorts stops by id, connections by (run_id, seq) and walking
/// links by (from, to). Connections sharing a (run_id, seq) key are collapsed,
/// the later row winning.
class TransitNetwork {
 public:
  TransitNetwork() = default;
  /// Throws InputError on invalid values, ReferenceError on dangling stop ids.
  TransitNetwork(std::vector<Stop> stops,
                 std::vector<TimetabledConnection> connections,
                 std::vector<WalkingLink> walking_links = {});

  const std::vector<Stop>& stops() const { return stops_; }
  const std::vector<TimetabledConnection>& connections() const {
    return connections_;
  }
  const std::vector<WalkingLink>& walking_links() const { return walking_; }

  const Stop* find_stop(const StopId& id) const;
  bool has_stop(const StopId& id) const { return find_stop(id) != nullptr; }

  /// Indices into connections() of every connection from -> to.
  std::span<const std::size_t> connections_between(const StopId& from,
                                                   const StopId& to) const;
  std::optional<Minutes> walking_duration(const StopId& from,
                                          const StopId& to) const;

  /// Stop sequence of every run, keyed by run_id. Element k is the departure
  /// stop of seq k+1; the last element is the final arrival stop.
  std::map<std::string, std::vector<StopId>> run_stop_sequences() const;

  bool operator==(const TransitNetwork& other) const {
    return stops_ == other.stops_ && connections_ == other.connections_ &&
           walking_ == other.walking_;
  }

 private:
  std::vector<Stop> stops_;
  std::vector<TimetabledConnection> connections_;
  std::vector<WalkingLink> walking_;
  std::map<StopId, std::size_t> stop_index_;
  std::map<EdgeKey, std::vector<std::size_t>> by_pair_;
  std::map<EdgeKey, Minutes> walk_index_;
};

/// Parses stops.csv / timetable.csv text (see README for the column layout).
TransitNetwork load_network(std::istream& stops_csv, std::istream& timetable_csv);
TransitNetwork load_network(const std::filesystem::path& stops_csv,
                            const std::filesystem::path& timetable_csv);

void write_stops_csv(std::ostream& out, const TransitNetwork& network);
void write_timetable_csv(std::ostream& out, const TransitNetwork& network);

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

inline constexpr double kEarthRadiusKm = 6371.0;

/// Great-circle distance in kilometres.
double haversine_km(LatLon a, LatLon b);

struct WalkingParams {
  double max_distance_km = 0.5;
  double speed_kmh = 5.0;

  bool operator==(const WalkingParams&) const = default;
};

/// Adds symmetric walking links between every pair of stops no further apart
/// than max_distance_km. Duration is ceil(60 * distance / speed), at least one
/// minute. Existing links are kept, so the operation is idempotent.
TransitNetwork add_walking_links(const TransitNetwork& network,
                                 const WalkingParams& params = {});

using NodeIndex = std::size_t;
using EdgeId = std::size_t;

/// The timetabled connection (or walking link) that realises an edge's
/// minimal duration.
struct EdgeBacking {
  bool walking = false;
  std::string service_id;
  std::string run_id;
  int seq = 0;
};

struct RelaxedEdge {
  NodeIndex from = 0;
  NodeIndex to = 0;
  Minutes min_duration = 1;
  EdgeBacking backing;
};

/// The relaxed domain: stops as nodes, at most one edge per ordered pair
/// weighted with the minimal travel time. Node indices follow lexicographic
/// stop-id order.
class RelaxedGraph {
 public:
  RelaxedGraph() = default;

  struct EdgeSpec {
    StopId from;
    StopId to;
    Minutes duration;
  };
  /// Builds a graph straight from edges. Extra isolated nodes may be given.
  /// Duplicate pairs keep the smaller duration.
  static RelaxedGraph from_edges(std::span<const EdgeSpec> edges,
                                 std::span<const StopId> extra_nodes = {});

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<StopId>& nodes() const { return nodes_; }
  const StopId& node_id(NodeIndex n) const { return nodes_.at(n); }
  std::optional<NodeIndex> index_of(const StopId& id) const;

  const std::vector<RelaxedEdge>& edges() const { return edges_; }
  const RelaxedEdge& edge(EdgeId e) const { return edges_.at(e); }
  std::span<const EdgeId> out_edges(NodeIndex n) const { return out_.at(n); }
  std::optional<EdgeId> find_edge(NodeIndex from, NodeIndex to) const;
  std::optional<EdgeId> find_edge(const StopId& from, const StopId& to) const;

 private:
  friend RelaxedGraph build_relaxed_graph(const TransitNetwork&);
  void finalize(std::vector<StopId> nodes, std::vector<RelaxedEdge> edges);

  std::vector<StopId> nodes_;
  std::map<StopId, NodeIndex> node_index_;
  std::vector<RelaxedEdge> edges_;
  std::vector<std::vector<EdgeId>> out_;
  std::map<std::pair<NodeIndex, NodeIndex>, EdgeId> pair_index_;
};

/// Ordered pairs (A, B) that some run travels between with at least one
/// intermediate stop. Such express pairs are left out of the relaxed graph.
std::vector<EdgeKey> express_pairs(const TransitNetwork& network);

RelaxedGraph build_relaxed_graph(const TransitNetwork& network);

}  // namespace jshare
