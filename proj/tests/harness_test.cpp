#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "jshare/harness.hpp"
#include "jshare/json_io.hpp"
#include "support/fixtures.hpp"

using namespace jshare;
using namespace jshare::testing;

namespace {

// Runs per direction and line from the service-window rule, written out.
int runs_per_direction(int first, int last, int headway, int span) {
  const int latest = std::min(last, kDayMinutes - span);
  return latest < first ? 0 : (latest - first) / headway + 1;
}

SyntheticNetworkSpec small_grid() {
  SyntheticNetworkSpec spec;
  spec.width = 6;
  spec.height = 6;
  spec.spacing_km = 8.0;
  spec.first_departure = 360;
  spec.last_departure = 720;
  return spec;
}

ConfigFile config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST(SyntheticNetwork, TenByTenClosedFormCounts) {
  SyntheticNetworkSpec spec;
  spec.width = 10;
  spec.height = 10;
  spec.headway = 30;
  spec.leg_minutes = 10;
  const auto net = generate_synthetic_network(spec);
  EXPECT_EQ(net.stops().size(), 100u);
  const int per_dir = runs_per_direction(spec.first_departure, spec.last_departure, 30, 9 * 10);
  EXPECT_EQ(per_dir, 46);
  const int runs = 2 * 2 * 10 * per_dir;
  EXPECT_EQ(net.run_stop_sequences().size(), static_cast<std::size_t>(runs));
  EXPECT_EQ(net.connections().size(), static_cast<std::size_t>(runs * 9));
}

TEST(SyntheticNetwork, OneByTwoIsASingleCorridor) {
  SyntheticNetworkSpec spec;
  spec.width = 1;
  spec.height = 2;
  const auto net = generate_synthetic_network(spec);
  EXPECT_EQ(net.stops().size(), 2u);
  const auto g = build_relaxed_graph(net);
  EXPECT_EQ(g.edge_count(), 2u);
  for (const auto& c : net.connections()) EXPECT_EQ(c.duration, spec.leg_minutes);
}

TEST(SyntheticNetwork, CoachLinesAndPhases) {
  SyntheticNetworkSpec spec = small_grid();
  spec.coach_every = 3;
  spec.coach_headway = 90;
  spec.coach_leg_minutes = 14;
  spec.phase_step = 7;
  const auto net = generate_synthetic_network(spec);
  std::set<std::string> services;
  for (const auto& c : net.connections()) {
    services.insert(c.service_id);
    if (c.service_id.front() == 'C') EXPECT_EQ(c.duration, 14);
  }
  EXPECT_TRUE(services.contains("CH2"));
  EXPECT_TRUE(services.contains("RH0"));
  EXPECT_FALSE(services.contains("RH2"));
}

TEST(SyntheticNetwork, FilesRoundTrip) {
  const auto net = generate_synthetic_network(small_grid());
  const auto dir = std::filesystem::temp_directory_path() / "jshare_synth_roundtrip";
  write_network_files(net, dir);
  const auto again = load_network(dir / "stops.csv", dir / "timetable.csv");
  EXPECT_EQ(again, net);
  std::filesystem::remove_all(dir);
}

TEST(SyntheticNetwork, RejectsBadSpecs) {
  SyntheticNetworkSpec spec;
  spec.headway = 0;
  EXPECT_THROW(generate_synthetic_network(spec), InputError);
  spec = {};
  spec.width = 1;
  spec.height = 1;
  EXPECT_THROW(generate_synthetic_network(spec), InputError);
}

TEST(Requests, CollinearStopsHaveNoQuadrant) {
  std::vector<Stop> stops;
  for (int i = 0; i < 10; ++i) stops.push_back(Stop{StopId("L" + std::to_string(i)), "", 50.0 + i, -3.0, Mode::rail});
  const TransitNetwork net(stops, {});
  EXPECT_THROW(generate_requests(net, ScenarioConfig{}), ScenarioError);
}

TEST(Requests, DirectionPredicatesAndDistanceWindow) {
  const auto net = generate_synthetic_network(small_grid());
  const auto q = split_quadrants(net);
  for (Direction d : {Direction::NS, Direction::SN, Direction::WE, Direction::EW}) {
    ScenarioConfig cfg;
    cfg.n_agents = 200;
    cfg.direction = d;
    const auto requests = generate_requests(net, cfg);
    ASSERT_EQ(requests.size(), 200u);
    for (const auto& r : requests) {
      const Stop* o = net.find_stop(r.origin);
      const Stop* t = net.find_stop(r.destination);
      const double km = haversine_km({o->lat, o->lon}, {t->lat, t->lon});
      EXPECT_GE(km, 20.0);
      EXPECT_LE(km, 160.0);
      switch (d) {
        case Direction::NS:
          EXPECT_TRUE(o->lat > q.axis_lat && t->lat < q.axis_lat);
          EXPECT_EQ(o->lon > q.axis_lon, t->lon > q.axis_lon);
          break;
        case Direction::SN:
          EXPECT_TRUE(o->lat < q.axis_lat && t->lat > q.axis_lat);
          break;
        case Direction::WE:
          EXPECT_TRUE(o->lon < q.axis_lon && t->lon > q.axis_lon);
          EXPECT_EQ(o->lat > q.axis_lat, t->lat > q.axis_lat);
          break;
        case Direction::EW:
          EXPECT_TRUE(o->lon > q.axis_lon && t->lon < q.axis_lon);
          break;
      }
    }
  }
}

TEST(Requests, SeedDeterministic) {
  const auto net = generate_synthetic_network(small_grid());
  ScenarioConfig a;
  a.n_agents = 6;
  a.seed_index = 4;
  auto b = a;
  const auto ra = generate_requests(net, a);
  const auto rb = generate_requests(net, b);
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    EXPECT_EQ(ra[i].origin, rb[i].origin);
    EXPECT_EQ(ra[i].destination, rb[i].destination);
    EXPECT_EQ(ra[i].agent, AgentId(static_cast<int>(i) + 1));
  }
  b.seed_index = 5;
  const auto rc = generate_requests(net, b);
  bool differs = false;
  for (std::size_t i = 0; i < ra.size(); ++i) differs = differs || ra[i].origin != rc[i].origin;
  EXPECT_TRUE(differs);
}

TEST(Pipeline, SingleAgent) {
  const auto net = generate_synthetic_network(small_grid());
  const auto g = build_relaxed_graph(net);
  const AgentRequest r[] = {{AgentId(1), StopId("G000_000"), StopId("G003_004")}};
  const auto out = run_pipeline(net, g, r);
  EXPECT_TRUE(out.result.error.empty());
  ASSERT_TRUE(out.result.delta_c);
  EXPECT_DOUBLE_EQ(*out.result.delta_c, 0.0);
  ASSERT_EQ(out.result.groups.size(), 1u);
  EXPECT_EQ(out.result.groups[0].size, 1);
  EXPECT_TRUE(out.result.groups[0].matched);
  EXPECT_DOUBLE_EQ(*out.result.groups[0].delta_t, 0.0);
}

TEST(Pipeline, TwoAgentsShareACorridor) {
  const auto net = generate_synthetic_network(small_grid());
  const auto g = build_relaxed_graph(net);
  const AgentRequest r[] = {{AgentId(1), StopId("G000_002"), StopId("G005_002")},
                            {AgentId(2), StopId("G001_002"), StopId("G004_002")}};
  const auto out = run_pipeline(net, g, r);
  EXPECT_TRUE(out.result.error.empty());
  ASSERT_TRUE(out.result.delta_c);
  EXPECT_GT(*out.result.delta_c, 0.0);
  ASSERT_EQ(out.result.groups.size(), 1u);
  EXPECT_EQ(out.result.groups[0].size, 2);
  EXPECT_TRUE(out.result.groups[0].matched);
  ASSERT_TRUE(out.result.groups[0].delta_t);
  EXPECT_GE(*out.result.groups[0].delta_t, 0.0);
  for (const auto& [agent, cost] : out.result.shared_cost) {
    EXPECT_LE(cost, out.result.initial_cost.at(agent) + 1e-9);
  }
}

TEST(Pipeline, UnreachableAgentIsExcluded) {
  auto stops = generate_synthetic_network(small_grid()).stops();
  stops.push_back(Stop{StopId("ISLAND"), "", 10.0, 10.0, Mode::rail});
  const auto base = generate_synthetic_network(small_grid());
  const TransitNetwork net(stops, base.connections());
  const auto g = build_relaxed_graph(net);
  const AgentRequest r[] = {{AgentId(1), StopId("G000_002"), StopId("G005_002")},
                            {AgentId(2), StopId("G000_002"), StopId("ISLAND")}};
  const auto out = run_pipeline(net, g, r);
  EXPECT_TRUE(out.result.error.empty());
  EXPECT_EQ(out.result.unreachable, std::vector<AgentId>{AgentId(2)});
  EXPECT_DOUBLE_EQ(*out.result.delta_c, 0.0);
  EXPECT_EQ(out.result.groups.size(), 1u);
}

TEST(Pipeline, ThreadsDoNotChangeOutput) {
  const auto net = generate_synthetic_network(small_grid());
  const auto g = build_relaxed_graph(net);
  ScenarioConfig cfg;
  cfg.n_agents = 8;
  const auto requests = generate_requests(net, cfg);
  PipelineConfig one, four;
  four.threads = 4;
  const auto a = run_pipeline(net, g, requests, one);
  const auto b = run_pipeline(net, g, requests, four);
  EXPECT_EQ(to_json(a.joint), to_json(b.joint));
  ASSERT_EQ(a.schedules.size(), b.schedules.size());
  for (std::size_t i = 0; i < a.schedules.size(); ++i) {
    EXPECT_EQ(to_json(a.schedules[i], 0), to_json(b.schedules[i], 0));
  }
}

TEST(Batch, OneCellGivesFortyExperiments) {
  BatchScenario sc;
  sc.name = "T";
  sc.synthetic = small_grid();
  sc.agent_counts = {2};
  const BatchScenario scenarios[] = {sc};
  const auto results = run_batch(scenarios);
  ASSERT_EQ(results.size(), 40u);
  for (const auto& r : results) {
    EXPECT_TRUE(r.error.empty()) << r.error;
    EXPECT_GE(r.timings.initial_ms, 0.0);
    EXPECT_GE(r.timings.br_ms, 0.0);
    EXPECT_GE(r.timings.timetabling_ms, 0.0);
    EXPECT_GE(r.timings.total_ms, 0.0);
    ASSERT_TRUE(r.delta_c);
    EXPECT_GE(*r.delta_c, 0.0);
  }
  std::ostringstream csv;
  write_results_csv(csv, results);
  std::istringstream in(csv.str());
  EXPECT_TRUE(validate_results(read_results_csv(in)).empty());
}

TEST(Batch, ParallelOutputIsIdentical) {
  BatchScenario sc;
  sc.synthetic = small_grid();
  sc.agent_counts = {2, 4};
  sc.seeds = 2;
  const BatchScenario scenarios[] = {sc};
  std::ostringstream a, b;
  write_results_csv(a, run_batch(scenarios, {1, {}}));
  write_results_csv(b, run_batch(scenarios, {4, {}}));
  EXPECT_EQ(strip_timing_columns(a.str()), strip_timing_columns(b.str()));
}

TEST(Matrix, ParsesSectionsAndDefaults) {
  const auto file = config(
      "# defaults\n"
      "seeds = 3\n"
      "agents = 2,4\n"
      "walk.max_km = 0.3\n"
      "[small]\n"
      "grid = 6x5\n"
      "headway = 20\n"
      "directions = NS, EW\n"
      "[big]\n"
      "grid = 12x12\n"
      "seeds = 1\n"
      "min_km = 10\n");
  const auto m = load_matrix(file);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].name, "small");
  EXPECT_EQ(m[0].synthetic->width, 6);
  EXPECT_EQ(m[0].synthetic->height, 5);
  EXPECT_EQ(m[0].synthetic->headway, 20);
  EXPECT_EQ(m[0].seeds, 3);
  EXPECT_EQ(m[0].agent_counts, (std::vector<int>{2, 4}));
  EXPECT_EQ(m[0].directions, (std::vector<Direction>{Direction::NS, Direction::EW}));
  EXPECT_DOUBLE_EQ(m[0].walking.max_distance_km, 0.3);
  EXPECT_EQ(m[1].seeds, 1);
  EXPECT_DOUBLE_EQ(m[1].window.min_km, 10.0);
  EXPECT_EQ(m[1].directions.size(), 4u);
}

TEST(Matrix, EmptyMatrixHasNoScenarios) {
  EXPECT_TRUE(load_matrix(config("")).empty());
  EXPECT_TRUE(run_batch({}).empty());
  EXPECT_EQ(load_matrix(config("grid = 4x4\n")).size(), 1u);
}

TEST(Matrix, Errors) {
  EXPECT_THROW(load_matrix(config("[a]\ngrid = 4by4\n")), InputError);
  EXPECT_THROW(load_matrix(config("[a]\ngrid = 4x4\ndirections = NE\n")), InputError);
  EXPECT_THROW(load_matrix(config("[a]\nstops = s.csv\n")), InputError);
  EXPECT_THROW(load_matrix(config("[a]\ngrid = 4x4\nmin_km = 200\n")), InputError);
  EXPECT_THROW(load_matrix(config("[a]\ngrid = 4x4\nheadway = x\n")), InputError);
}

TEST(Config, PipelineKeys) {
  const auto file = config(
      "sched.limit.small_s = 1\nsched.limit.medium_s = 2\nsched.limit.large_s = 3\n"
      "br.max_rounds = 7\n");
  const auto c = pipeline_config_from(file.global);
  EXPECT_EQ(time_limit_for(4, c.scheduler), 1.0);
  EXPECT_EQ(time_limit_for(9, c.scheduler), 2.0);
  EXPECT_EQ(time_limit_for(12, c.scheduler), 3.0);
  EXPECT_EQ(c.br.max_rounds, 7);
  EXPECT_THROW(pipeline_config_from(config("cost.discount_share = 0.9\n").global), InputError);
  EXPECT_THROW(config("no equals sign\n"), ParseError);
}

TEST(Requests, LoadCsv) {
  std::istringstream ok("agent,origin,destination\n1,A,B\n2,C,D\n");
  const auto r = load_requests(ok);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1].origin, StopId("C"));
  std::istringstream dup("agent,origin,destination\n1,A,B\n1,C,D\n");
  EXPECT_THROW(load_requests(dup), ParseError);
}

TEST(Json, PlanAndJointPlanRoundTrip) {
  const auto plans = group_example_plans();
  for (const auto& p : plans) {
    const auto back = plan_from_json(to_json(p));
    EXPECT_EQ(back.legs, p.legs);
    EXPECT_EQ(back.agent, p.agent);
    EXPECT_DOUBLE_EQ(back.total_cost, p.total_cost);
  }
  const auto joint = merge_plans(plans);
  const auto back = joint_plan_from_json(to_json(joint));
  EXPECT_EQ(back.edges, joint.edges);
  auto tampered = to_json(joint);
  tampered["edges"][0]["agents"] = nlohmann::json::array({7});
  EXPECT_THROW(joint_plan_from_json(tampered), InputError);
  EXPECT_THROW(plan_from_json(nlohmann::json::object()), InputError);
}

TEST(Matrix, ShippedDefaultMatrixMatchesBuiltInFamily) {
  const auto m = load_matrix(load_config(std::filesystem::path(JSHARE_DATA_DIR) / "default_matrix.ini"));
  EXPECT_EQ(m, default_scenarios());
}

TEST(Matrix, DefaultFamilyCoversGrowingGrids) {
  const auto family = default_scenarios();
  ASSERT_EQ(family.size(), 5u);
  EXPECT_EQ(family.front().synthetic->width * family.front().synthetic->height, 100);
  EXPECT_EQ(family.back().synthetic->width * family.back().synthetic->height, 2000);
  for (const auto& s : family) {
    EXPECT_EQ(s.seeds * static_cast<int>(s.directions.size()), 40);
    EXPECT_NO_THROW(s.synthetic->validate());
  }
}
