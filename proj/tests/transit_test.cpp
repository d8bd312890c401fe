#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jshare/transit.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace jshare;
using namespace jshare::testing;

namespace {

TransitNetwork load(const std::string& stops, const std::string& timetable) {
  std::istringstream s(stops), t(timetable);
  return load_network(s, t);
}

const std::string kHeader = "service_id,run_id,seq,from_stop,to_stop,departure_min,duration_min\n";

}  // namespace

TEST(LoadNetwork, FourStopFixtureCollapsesDuplicateRow) {
  const auto net = load(kFourStopStops, kFourStopTimetable);
  EXPECT_EQ(net.stops().size(), 4u);
  ASSERT_EQ(net.connections().size(), 6u);
  // The later duplicate of (R1, 2) wins.
  const auto idx = net.connections_between(StopId("S2"), StopId("S3"));
  ASSERT_EQ(idx.size(), 1u);
  EXPECT_EQ(net.connections()[idx[0]].duration, 14);
  EXPECT_EQ(net.find_stop(StopId("S3"))->name, "South, upper");
  EXPECT_EQ(net.find_stop(StopId("S4"))->mode, Mode::walk_node);
}

TEST(LoadNetwork, EmptyTimetable) {
  const auto net = load(kFourStopStops, kHeader);
  EXPECT_EQ(net.stops().size(), 4u);
  EXPECT_TRUE(net.connections().empty());
}

TEST(LoadNetwork, UnknownStopIsReferenceError) {
  EXPECT_THROW(load(kFourStopStops, kHeader + "R,R9,1,S1,X999,10,5\n"), ReferenceError);
}

TEST(LoadNetwork, MalformedRowNamesLine) {
  try {
    load(kFourStopStops, kHeader + "R,R1,1,S1,S2,480,12\nR,R1,2,S2,S3,oops,5\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadNetwork, RejectsBrokenRuns) {
  EXPECT_THROW(load(kFourStopStops, kHeader + "R,R1,2,S1,S2,480,12\n"), InputError);
  EXPECT_THROW(load(kFourStopStops, kHeader + "R,R1,1,S1,S2,480,12\nR,R1,2,S3,S4,500,5\n"),
               InputError);
  EXPECT_THROW(load(kFourStopStops, kHeader + "R,R1,1,S1,S2,480,12\nR,R1,2,S2,S3,485,5\n"),
               InputError);
  EXPECT_THROW(load(kFourStopStops, kHeader + "R,R1,1,S1,S1,480,12\n"), InputError);
  EXPECT_THROW(load(kFourStopStops, kHeader + "R,R1,1,S1,S2,1440,12\n"), InputError);
  EXPECT_THROW(load(kFourStopStops, kHeader + "R,R1,1,S1,S2,10,0\n"), InputError);
}

TEST(LoadNetwork, RejectsBadStops) {
  EXPECT_THROW(load("stop_id,name,lat,lon,mode\nA,a,91,0,rail\n", kHeader), InputError);
  EXPECT_THROW(load("stop_id,name,lat,lon,mode\nA,a,0,0,boat\n", kHeader), InputError);
  EXPECT_THROW(load("stop_id,name,lat,lon,mode\nA,a,0,0,rail\nA,b,1,1,rail\n", kHeader),
               InputError);
  EXPECT_THROW(load("stop,name,lat,lon,mode\n", kHeader), InputError);
}

TEST(LoadNetwork, RoundTripIsIdentical) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_scheduling_instance(rng, 15);
    std::ostringstream s, t;
    write_stops_csv(s, inst.network);
    write_timetable_csv(t, inst.network);
    const auto again = load(s.str(), t.str());
    EXPECT_EQ(again.stops(), inst.network.stops());
    EXPECT_EQ(again.connections(), inst.network.connections());
  }
}

TEST(Haversine, IdentityAndSymmetry) {
  EXPECT_DOUBLE_EQ(haversine_km({55.0, -3.0}, {55.0, -3.0}), 0.0);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const LatLon a{rng.uniform(-89000, 89000) / 1000.0, rng.uniform(-179000, 179000) / 1000.0};
    const LatLon b{rng.uniform(-89000, 89000) / 1000.0, rng.uniform(-179000, 179000) / 1000.0};
    EXPECT_NEAR(haversine_km(a, b), haversine_km(b, a), 1e-9);
  }
}

TEST(Haversine, EdinburghAberdeenMatchesCosineLaw) {
  const double d = haversine_km({55.9533, -3.1883}, {57.1497, -2.0943});
  const double oracle = cosine_law_km(55.9533, -3.1883, 57.1497, -2.0943);
  EXPECT_NEAR(d, oracle, 0.1);
  EXPECT_NEAR(d, 150.0, 10.0);
}

namespace {

// Two stops `km` apart along a meridian.
TransitNetwork pair_apart(double km, Mode a = Mode::rail, Mode b = Mode::coach) {
  const double dlat = km / kEarthRadiusKm * 180.0 / M_PI;
  return TransitNetwork({Stop{StopId("P"), "p", 55.0, -3.0, a}, Stop{StopId("Q"), "q", 55.0 + dlat, -3.0, b}},
                        {});
}

}  // namespace

TEST(WalkingLinks, FourHundredMetresIsFiveMinutes) {
  const auto net = add_walking_links(pair_apart(0.4), {0.5, 5.0});
  ASSERT_EQ(net.walking_links().size(), 2u);
  EXPECT_EQ(net.walking_duration(StopId("P"), StopId("Q")), 5);
  EXPECT_EQ(net.walking_duration(StopId("Q"), StopId("P")), 5);
}

TEST(WalkingLinks, TooFarApart) {
  EXPECT_TRUE(add_walking_links(pair_apart(2.0), {0.5, 5.0}).walking_links().empty());
}

TEST(WalkingLinks, Idempotent) {
  const auto once = add_walking_links(pair_apart(0.3), {});
  const auto twice = add_walking_links(once, {});
  EXPECT_EQ(once.walking_links(), twice.walking_links());
}

TEST(WalkingLinks, SymmetricOnRandomClusters) {
  Rng rng(5);
  std::vector<Stop> stops;
  for (int i = 0; i < 60; ++i) {
    stops.push_back(Stop{StopId("W" + std::to_string(i)), "", 55.0 + rng.uniform(0, 300) * 1e-5,
                         -3.0 + rng.uniform(0, 300) * 1e-5, Mode::rail});
  }
  const auto net = add_walking_links(TransitNetwork(stops, {}), {});
  EXPECT_FALSE(net.walking_links().empty());
  for (const auto& w : net.walking_links()) {
    EXPECT_EQ(net.walking_duration(w.to, w.from), w.duration);
    const auto* a = net.find_stop(w.from);
    const auto* b = net.find_stop(w.to);
    const double d = haversine_km({a->lat, a->lon}, {b->lat, b->lon});
    EXPECT_LE(d, 0.5);
    EXPECT_EQ(w.duration, std::max(1, static_cast<int>(std::ceil(60.0 * d / 5.0 - 1e-9))));
  }
}

TEST(WalkingLinks, RejectsBadParameters) {
  EXPECT_THROW(add_walking_links(pair_apart(0.1), {0.0, 5.0}), InputError);
  EXPECT_THROW(add_walking_links(pair_apart(0.1), {0.5, -1.0}), InputError);
}

TEST(RelaxedGraph, ExampleEdgeCosts) {
  const auto g = build_relaxed_graph(relaxed_example_network());
  const auto ab = g.find_edge(StopId("A"), StopId("B"));
  ASSERT_TRUE(ab);
  EXPECT_EQ(g.edge(*ab).min_duration, 50);
  EXPECT_EQ(g.edge(*g.find_edge(StopId("C"), StopId("D"))).min_duration, 45);
  EXPECT_EQ(g.edge(*g.find_edge(StopId("D"), StopId("E"))).min_duration, 70);
  EXPECT_EQ(g.edge(*g.find_edge(StopId("E"), StopId("F"))).min_duration, 30);
  EXPECT_EQ(g.edge(*g.find_edge(StopId("D"), StopId("E"))).backing.run_id, "L2b");
}

TEST(RelaxedGraph, NonstopRunIsFiltered) {
  const auto net = relaxed_example_network();
  const auto g = build_relaxed_graph(net);
  EXPECT_FALSE(g.find_edge(StopId("C"), StopId("F")));
  EXPECT_EQ(g.edge_count(), 5u);
  const auto express = express_pairs(net);
  EXPECT_NE(std::ranges::find(express, EdgeKey{StopId("C"), StopId("F")}), express.end());
}

TEST(RelaxedGraph, SingleConnection) {
  const TransitNetwork net({Stop{StopId("A"), "", 1, 1, Mode::rail}, Stop{StopId("B"), "", 1, 2, Mode::rail}},
                           {{"s", "r", 1, StopId("A"), StopId("B"), 60, 17}});
  const auto g = build_relaxed_graph(net);
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.edges()[0].min_duration, 17);
}

TEST(RelaxedGraph, TieBreakPicksLowestRunAndPrefersServiceOnEqualWalk) {
  const TransitNetwork net(
      {Stop{StopId("A"), "", 1, 1, Mode::rail}, Stop{StopId("B"), "", 1, 1.001, Mode::rail}},
      {{"s2", "r1", 1, StopId("A"), StopId("B"), 60, 5}, {"s1", "r9", 1, StopId("A"), StopId("B"), 90, 5},
       {"s1", "r2", 1, StopId("A"), StopId("B"), 30, 5}},
      {{StopId("A"), StopId("B"), 5}, {StopId("B"), StopId("A"), 5}});
  const auto g = build_relaxed_graph(net);
  const auto& e = g.edge(*g.find_edge(StopId("A"), StopId("B")));
  EXPECT_FALSE(e.backing.walking);
  EXPECT_EQ(e.backing.service_id, "s1");
  EXPECT_EQ(e.backing.run_id, "r2");
  EXPECT_TRUE(g.edge(*g.find_edge(StopId("B"), StopId("A"))).backing.walking);
}

// A stopping line plus random express runs that skip stops: every skipped
// pair must be filtered and its stopping segment must be in the graph, and
// each surviving edge carries the minimum surviving duration.
TEST(RelaxedGraph, ExpressFilterSoundnessAndMinimality) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.uniform(3, 8);
    std::vector<Stop> stops;
    for (int i = 0; i < n; ++i) stops.push_back(Stop{node_name(i), "", 50, 0.1 * i, Mode::rail});
    std::vector<TimetabledConnection> conns;
    for (int r = 0; r < 2; ++r) {
      Minutes t = rng.uniform(0, 100);
      for (int i = 0; i + 1 < n; ++i) {
        const Minutes d = rng.uniform(5, 40);
        conns.push_back({"S", "S" + std::to_string(r), i + 1, node_name(i), node_name(i + 1), t, d});
        t += d;
      }
    }
    const int express_runs = rng.uniform(0, 3);
    for (int r = 0; r < express_runs; ++r) {
      std::vector<int> visit{0};
      for (int i = 1; i + 1 < n; ++i) {
        if (rng.chance(0.4)) visit.push_back(i);
      }
      visit.push_back(n - 1);
      Minutes t = rng.uniform(0, 100);
      for (std::size_t k = 0; k + 1 < visit.size(); ++k) {
        const Minutes d = rng.uniform(3, 60);
        conns.push_back({"X", "X" + std::to_string(r), static_cast<int>(k) + 1, node_name(visit[k]),
                         node_name(visit[k + 1]), t, d});
        t += d;
      }
    }
    const TransitNetwork net(stops, conns);
    const auto g = build_relaxed_graph(net);
    const auto excluded = express_pairs(net);
    const auto runs = net.run_stop_sequences();

    for (const auto& [a, b] : excluded) {
      EXPECT_FALSE(g.find_edge(a, b));
      bool witnessed = false;
      for (const auto& [run, seq] : runs) {
        auto ia = std::ranges::find(seq, a);
        auto ib = std::ranges::find(seq, b);
        if (ia == seq.end() || ib == seq.end() || std::distance(ia, ib) < 2) continue;
        bool chain = true;
        for (auto it = ia; it != ib; ++it) chain = chain && g.find_edge(*it, *std::next(it)).has_value();
        witnessed = witnessed || chain;
      }
      EXPECT_TRUE(witnessed) << a << "->" << b;
    }
    for (const auto& e : g.edges()) {
      Minutes best = std::numeric_limits<Minutes>::max();
      for (const auto& c : net.connections()) {
        if (c.from_stop == g.node_id(e.from) && c.to_stop == g.node_id(e.to)) best = std::min(best, c.duration);
      }
      EXPECT_EQ(e.min_duration, best);
    }
    // Every stopping-line pair is present.
    for (int i = 0; i + 1 < n; ++i) EXPECT_TRUE(g.find_edge(node_name(i), node_name(i + 1)));
  }
}
