#include "jshare/transit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <tuple>

#include "csv.hpp"

namespace jshare {

namespace {

constexpr std::string_view kStopsHeader = "stop_id,name,lat,lon,mode";
constexpr std::string_view kTimetableHeader =
    "service_id,run_id,seq,from_stop,to_stop,departure_min,duration_min";

std::string describe(const TimetabledConnection& c) {
  return "run '" + c.run_id + "' seq " + std::to_string(c.seq);
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::rail:
      return "rail";
    case Mode::coach:
      return "coach";
    case Mode::walk_node:
      return "walk-node";
  }
  return "rail";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "rail") return Mode::rail;
  if (text == "coach") return Mode::coach;
  if (text == "walk-node") return Mode::walk_node;
  return std::nullopt;
}

TransitNetwork::TransitNetwork(std::vector<Stop> stops,
                               std::vector<TimetabledConnection> connections,
                               std::vector<WalkingLink> walking_links) {
  std::ranges::sort(stops, {}, &Stop::id);
  for (std::size_t i = 0; i < stops.size(); ++i) {
    const Stop& s = stops[i];
    if (s.id.value.empty()) throw InputError("stop with empty id");
    if (i > 0 && stops[i - 1].id == s.id) {
      throw InputError("duplicate stop id '" + s.id.value + "'");
    }
    if (!(s.lat >= -90.0 && s.lat <= 90.0) || !(s.lon >= -180.0 && s.lon <= 180.0)) {
      throw InputError("stop '" + s.id.value + "' has coordinates out of range");
    }
    stop_index_.emplace(s.id, i);
  }
  stops_ = std::move(stops);

  // Dedup on (run_id, seq); later rows win.
  std::map<std::pair<std::string, int>, TimetabledConnection> unique;
  for (auto& c : connections) {
    auto key = std::make_pair(c.run_id, c.seq);
    unique.insert_or_assign(std::move(key), std::move(c));
  }
  connections_.reserve(unique.size());
  for (auto& [key, c] : unique) connections_.push_back(std::move(c));

  for (const auto& c : connections_) {
    if (!has_stop(c.from_stop)) {
      throw ReferenceError(describe(c) + " references unknown stop '" +
                           c.from_stop.value + "'");
    }
    if (!has_stop(c.to_stop)) {
      throw ReferenceError(describe(c) + " references unknown stop '" +
                           c.to_stop.value + "'");
    }
    if (c.from_stop == c.to_stop) throw InputError(describe(c) + " is a self-loop");
    if (c.duration <= 0) throw InputError(describe(c) + " has non-positive duration");
    if (c.departure < 0 || c.departure >= kDayMinutes) {
      throw InputError(describe(c) + " departs outside [0, 1440)");
    }
  }

  // connections_ is ordered by (run_id, seq): check each run in one pass.
  for (std::size_t i = 0; i < connections_.size(); ++i) {
    const auto& c = connections_[i];
    const bool run_start = i == 0 || connections_[i - 1].run_id != c.run_id;
    if (run_start) {
      if (c.seq != 1) throw InputError(describe(c) + ": runs must start at seq 1");
      continue;
    }
    const auto& prev = connections_[i - 1];
    if (c.seq != prev.seq + 1) throw InputError(describe(c) + ": seq gap in run");
    if (c.from_stop != prev.to_stop) {
      throw InputError(describe(c) + ": leg does not continue from previous stop");
    }
    if (c.departure < prev.arrival()) {
      throw InputError(describe(c) + ": departs before previous leg arrives");
    }
  }

  for (std::size_t i = 0; i < connections_.size(); ++i) {
    const auto& c = connections_[i];
    by_pair_[{c.from_stop, c.to_stop}].push_back(i);
  }

  for (const auto& w : walking_links) {
    if (!has_stop(w.from) || !has_stop(w.to)) {
      throw ReferenceError("walking link " + w.from.value + "->" + w.to.value +
                           " references unknown stop");
    }
    if (w.from == w.to) throw InputError("walking link is a self-loop");
    if (w.duration <= 0) throw InputError("walking link has non-positive duration");
    auto [it, inserted] = walk_index_.emplace(EdgeKey{w.from, w.to}, w.duration);
    if (!inserted && it->second != w.duration) {
      throw InputError("conflicting walking links " + w.from.value + "->" + w.to.value);
    }
  }
  for (const auto& [key, duration] : walk_index_) {
    auto back = walk_index_.find({key.second, key.first});
    if (back == walk_index_.end() || back->second != duration) {
      throw InputError("walking link " + key.first.value + "->" + key.second.value +
                       " has no symmetric counterpart");
    }
    walking_.push_back(WalkingLink{key.first, key.second, duration});
  }
}

const Stop* TransitNetwork::find_stop(const StopId& id) const {
  auto it = stop_index_.find(id);
  return it == stop_index_.end() ? nullptr : &stops_[it->second];
}

std::span<const std::size_t> TransitNetwork::connections_between(
    const StopId& from, const StopId& to) const {
  auto it = by_pair_.find({from, to});
  if (it == by_pair_.end()) return {};
  return it->second;
}

std::optional<Minutes> TransitNetwork::walking_duration(const StopId& from,
                                                        const StopId& to) const {
  auto it = walk_index_.find({from, to});
  if (it == walk_index_.end()) return std::nullopt;
  return it->second;
}

std::map<std::string, std::vector<StopId>> TransitNetwork::run_stop_sequences() const {
  std::map<std::string, std::vector<StopId>> runs;
  for (const auto& c : connections_) {
    auto& seq = runs[c.run_id];
    if (seq.empty()) seq.push_back(c.from_stop);
    seq.push_back(c.to_stop);
  }
  return runs;
}

TransitNetwork load_network(std::istream& stops_csv, std::istream& timetable_csv) {
  std::vector<Stop> stops;
  std::set<StopId> known;
  for (const auto& row : csv::read(stops_csv, kStopsHeader)) {
    if (row.fields.size() != 5) {
      throw ParseError(row.line, "expected 5 fields, got " +
                                     std::to_string(row.fields.size()));
    }
    Stop s;
    s.id = StopId(row.fields[0]);
    s.name = row.fields[1];
    s.lat = csv::parse_number<double>(row, 2, "lat");
    s.lon = csv::parse_number<double>(row, 3, "lon");
    auto mode = parse_mode(row.fields[4]);
    if (!mode) throw ParseError(row.line, "unknown mode '" + row.fields[4] + "'");
    s.mode = *mode;
    if (s.id.value.empty()) throw ParseError(row.line, "empty stop_id");
    if (!known.insert(s.id).second) {
      throw ParseError(row.line, "duplicate stop_id '" + s.id.value + "'");
    }
    stops.push_back(std::move(s));
  }

  std::vector<TimetabledConnection> connections;
  for (const auto& row : csv::read(timetable_csv, kTimetableHeader)) {
    if (row.fields.size() != 7) {
      throw ParseError(row.line, "expected 7 fields, got " +
                                     std::to_string(row.fields.size()));
    }
    TimetabledConnection c;
    c.service_id = row.fields[0];
    c.run_id = row.fields[1];
    c.seq = csv::parse_number<int>(row, 2, "seq");
    c.from_stop = StopId(row.fields[3]);
    c.to_stop = StopId(row.fields[4]);
    c.departure = csv::parse_number<int>(row, 5, "departure_min");
    c.duration = csv::parse_number<int>(row, 6, "duration_min");
    for (const StopId* id : {&c.from_stop, &c.to_stop}) {
      if (!known.contains(*id)) {
        throw ReferenceError("line " + std::to_string(row.line) +
                             ": unknown stop '" + id->value + "'");
      }
    }
    connections.push_back(std::move(c));
  }
  return TransitNetwork(std::move(stops), std::move(connections));
}

TransitNetwork load_network(const std::filesystem::path& stops_csv,
                            const std::filesystem::path& timetable_csv) {
  std::ifstream stops(stops_csv);
  if (!stops) throw InputError("cannot open " + stops_csv.string());
  std::ifstream timetable(timetable_csv);
  if (!timetable) throw InputError("cannot open " + timetable_csv.string());
  return load_network(stops, timetable);
}

void write_stops_csv(std::ostream& out, const TransitNetwork& network) {
  out << kStopsHeader << '\n';
  char buf[64];
  for (const auto& s : network.stops()) {
    out << csv::quote(s.id.value) << ',' << csv::quote(s.name) << ',';
    auto r = std::to_chars(buf, buf + sizeof buf, s.lat);
    out.write(buf, r.ptr - buf);
    out << ',';
    r = std::to_chars(buf, buf + sizeof buf, s.lon);
    out.write(buf, r.ptr - buf);
    out << ',' << to_string(s.mode) << '\n';
  }
}

void write_timetable_csv(std::ostream& out, const TransitNetwork& network) {
  out << kTimetableHeader << '\n';
  for (const auto& c : network.connections()) {
    out << csv::quote(c.service_id) << ',' << csv::quote(c.run_id) << ',' << c.seq
        << ',' << csv::quote(c.from_stop.value) << ',' << csv::quote(c.to_stop.value)
        << ',' << c.departure << ',' << c.duration << '\n';
  }
}

double haversine_km(LatLon a, LatLon b) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * deg;
  const double dlon = (b.lon - a.lon) * deg;
  const double s = std::sin(dlat / 2.0);
  const double t = std::sin(dlon / 2.0);
  const double h = s * s + std::cos(a.lat * deg) * std::cos(b.lat * deg) * t * t;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

TransitNetwork add_walking_links(const TransitNetwork& network,
                                 const WalkingParams& params) {
  if (!(params.max_distance_km > 0.0) || !(params.speed_kmh > 0.0)) {
    throw InputError("walking parameters must be positive");
  }
  const auto& stops = network.stops();
  std::vector<WalkingLink> links = network.walking_links();

  // Sweep in latitude order; one degree of latitude is ~111.19 km everywhere.
  std::vector<std::size_t> order(stops.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) {
    return stops[a].lat < stops[b].lat;
  });
  const double lat_window =
      params.max_distance_km / (kEarthRadiusKm * std::numbers::pi / 180.0) + 1e-9;

  for (std::size_t i = 0; i < order.size(); ++i) {
    const Stop& a = stops[order[i]];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const Stop& b = stops[order[j]];
      if (b.lat - a.lat > lat_window) break;
      const double d = haversine_km({a.lat, a.lon}, {b.lat, b.lon});
      if (d > params.max_distance_km) continue;
      if (network.walking_duration(a.id, b.id)) continue;
      const double exact = 60.0 * d / params.speed_kmh;
      const auto minutes =
          std::max<Minutes>(1, static_cast<Minutes>(std::ceil(exact - 1e-9)));
      links.push_back(WalkingLink{a.id, b.id, minutes});
      links.push_back(WalkingLink{b.id, a.id, minutes});
    }
  }
  return TransitNetwork(network.stops(), network.connections(), std::move(links));
}

std::optional<NodeIndex> RelaxedGraph::index_of(const StopId& id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeId> RelaxedGraph::find_edge(NodeIndex from, NodeIndex to) const {
  auto it = pair_index_.find({from, to});
  if (it == pair_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeId> RelaxedGraph::find_edge(const StopId& from,
                                              const StopId& to) const {
  auto f = index_of(from);
  auto t = index_of(to);
  if (!f || !t) return std::nullopt;
  return find_edge(*f, *t);
}

void RelaxedGraph::finalize(std::vector<StopId> nodes, std::vector<RelaxedEdge> edges) {
  nodes_ = std::move(nodes);
  node_index_.clear();
  for (NodeIndex i = 0; i < nodes_.size(); ++i) node_index_.emplace(nodes_[i], i);
  std::ranges::sort(edges, [](const RelaxedEdge& a, const RelaxedEdge& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  edges_ = std::move(edges);
  out_.assign(nodes_.size(), {});
  pair_index_.clear();
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    out_[edges_[e].from].push_back(e);
    pair_index_.emplace(std::make_pair(edges_[e].from, edges_[e].to), e);
  }
}

RelaxedGraph RelaxedGraph::from_edges(std::span<const EdgeSpec> edges,
                                      std::span<const StopId> extra_nodes) {
  std::set<StopId> ids(extra_nodes.begin(), extra_nodes.end());
  for (const auto& e : edges) {
    if (e.from == e.to) throw InputError("self-loop edge " + e.from.value);
    if (e.duration <= 0) throw InputError("edge duration must be positive");
    ids.insert(e.from);
    ids.insert(e.to);
  }
  std::vector<StopId> nodes(ids.begin(), ids.end());
  auto index = [&](const StopId& id) {
    return static_cast<NodeIndex>(std::ranges::lower_bound(nodes, id) - nodes.begin());
  };
  std::map<std::pair<NodeIndex, NodeIndex>, Minutes> best;
  for (const auto& e : edges) {
    auto key = std::make_pair(index(e.from), index(e.to));
    auto [it, inserted] = best.emplace(key, e.duration);
    if (!inserted) it->second = std::min(it->second, e.duration);
  }
  std::vector<RelaxedEdge> out;
  for (const auto& [key, d] : best) {
    out.push_back(RelaxedEdge{key.first, key.second, d, EdgeBacking{}});
  }
  RelaxedGraph g;
  g.finalize(std::move(nodes), std::move(out));
  return g;
}

std::vector<EdgeKey> express_pairs(const TransitNetwork& network) {
  std::set<EdgeKey> pairs;
  for (const auto& [run, seq] : network.run_stop_sequences()) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      for (std::size_t j = i + 2; j < seq.size(); ++j) {
        if (seq[i] != seq[j]) pairs.emplace(seq[i], seq[j]);
      }
    }
  }
  return {pairs.begin(), pairs.end()};
}

RelaxedGraph build_relaxed_graph(const TransitNetwork& network) {
  const auto excluded_list = express_pairs(network);
  const std::set<EdgeKey> excluded(excluded_list.begin(), excluded_list.end());

  std::vector<StopId> nodes;
  nodes.reserve(network.stops().size());
  for (const auto& s : network.stops()) nodes.push_back(s.id);
  auto index = [&](const StopId& id) {
    return static_cast<NodeIndex>(std::ranges::lower_bound(nodes, id) - nodes.begin());
  };

  // Best backing per ordered pair; ties go to the lowest (service, run, seq).
  // A walking link only wins when strictly faster than every service.
  std::map<std::pair<NodeIndex, NodeIndex>, RelaxedEdge> best;
  for (const auto& c : network.connections()) {
    if (excluded.contains({c.from_stop, c.to_stop})) continue;
    RelaxedEdge candidate{index(c.from_stop), index(c.to_stop), c.duration,
                          EdgeBacking{false, c.service_id, c.run_id, c.seq}};
    auto key = std::make_pair(candidate.from, candidate.to);
    auto [it, inserted] = best.emplace(key, candidate);
    if (inserted) continue;
    const RelaxedEdge& cur = it->second;
    const auto cand_key = std::tie(candidate.min_duration, candidate.backing.service_id,
                                   candidate.backing.run_id, candidate.backing.seq);
    const auto cur_key = std::tie(cur.min_duration, cur.backing.service_id,
                                  cur.backing.run_id, cur.backing.seq);
    if (cand_key < cur_key) it->second = candidate;
  }
  for (const auto& w : network.walking_links()) {
    RelaxedEdge candidate{index(w.from), index(w.to), w.duration, EdgeBacking{true, {}, {}, 0}};
    auto key = std::make_pair(candidate.from, candidate.to);
    auto [it, inserted] = best.emplace(key, candidate);
    if (!inserted && candidate.min_duration < it->second.min_duration) {
      it->second = candidate;
    }
  }

  std::vector<RelaxedEdge> edges;
  edges.reserve(best.size());
  for (auto& [key, e] : best) edges.push_back(std::move(e));
  RelaxedGraph g;
  g.finalize(std::move(nodes), std::move(edges));
  return g;
}

}  // namespace jshare
