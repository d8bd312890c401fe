#include "jshare/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "csv.hpp"

namespace jshare {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any call is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string grid_stop_id(int x, int y) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "G%03d_%03d", x, y);
  return buf;
}

double median(std::vector<double> values) {
  std::ranges::sort(values);
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

void SyntheticNetworkSpec::validate() const {
  if (width < 1 || height < 1 || width * height < 2) {
    throw InputError("synthetic grid needs at least two stops");
  }
  if (!(spacing_km > 0.0) || headway <= 0 || leg_minutes <= 0 || coach_headway <= 0 ||
      coach_leg_minutes <= 0 || coach_every < 0 || phase_step < 0) {
    throw InputError("synthetic network parameters must be positive");
  }
  if (first_departure < 0 || last_departure >= kDayMinutes || first_departure > last_departure) {
    throw InputError("synthetic service window must lie within the day");
  }
}

TransitNetwork generate_synthetic_network(const SyntheticNetworkSpec& spec) {
  spec.validate();
  const double km_per_deg = kEarthRadiusKm * std::numbers::pi / 180.0;
  const double dlat = spec.spacing_km / km_per_deg;
  const double dlon =
      spec.spacing_km / (km_per_deg * std::cos(spec.origin_lat * std::numbers::pi / 180.0));

  std::vector<Stop> stops;
  for (int x = 0; x < spec.width; ++x) {
    for (int y = 0; y < spec.height; ++y) {
      stops.push_back(Stop{StopId(grid_stop_id(x, y)),
                           "Grid " + std::to_string(x) + "," + std::to_string(y),
                           spec.origin_lat + y * dlat, spec.origin_lon + x * dlon, Mode::rail});
    }
  }

  // Rows first (constant y), then columns (constant x).
  std::vector<std::pair<std::string, std::vector<std::string>>> lines;
  if (spec.width >= 2) {
    for (int y = 0; y < spec.height; ++y) {
      std::vector<std::string> line;
      for (int x = 0; x < spec.width; ++x) line.push_back(grid_stop_id(x, y));
      lines.emplace_back("H" + std::to_string(y), std::move(line));
    }
  }
  if (spec.height >= 2) {
    for (int x = 0; x < spec.width; ++x) {
      std::vector<std::string> line;
      for (int y = 0; y < spec.height; ++y) line.push_back(grid_stop_id(x, y));
      lines.emplace_back("V" + std::to_string(x), std::move(line));
    }
  }

  std::vector<TimetabledConnection> connections;
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const auto& [name, line] = lines[l];
    const bool coach = spec.coach_every > 0 && (l + 1) % spec.coach_every == 0;
    const Minutes headway = coach ? spec.coach_headway : spec.headway;
    const Minutes leg = coach ? spec.coach_leg_minutes : spec.leg_minutes;
    const Minutes phase = static_cast<Minutes>((l * spec.phase_step) % headway);
    const Minutes span = static_cast<Minutes>(line.size() - 1) * leg;
    const std::string service = (coach ? "C" : "R") + name;
    for (int dir = 0; dir < 2; ++dir) {
      std::vector<std::string> order = line;
      if (dir == 1) std::ranges::reverse(order);
      int k = 0;
      for (Minutes start = spec.first_departure + phase;
           start <= spec.last_departure && start + span <= kDayMinutes; start += headway, ++k) {
        const std::string run = service + (dir == 0 ? "F" : "B") + std::to_string(k);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
          connections.push_back(TimetabledConnection{service, run, static_cast<int>(i + 1),
                                                     StopId(order[i]), StopId(order[i + 1]),
                                                     start + static_cast<Minutes>(i) * leg, leg});
        }
      }
    }
  }
  return TransitNetwork(std::move(stops), std::move(connections));
}

void write_network_files(const TransitNetwork& network, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream stops(dir / "stops.csv");
  std::ofstream timetable(dir / "timetable.csv");
  if (!stops || !timetable) throw InputError("cannot write network files to " + dir.string());
  write_stops_csv(stops, network);
  write_timetable_csv(timetable, network);
}

Quadrants split_quadrants(const TransitNetwork& network) {
  Quadrants q;
  if (network.stops().empty()) return q;
  std::vector<double> lats;
  std::vector<double> lons;
  for (const auto& s : network.stops()) {
    lats.push_back(s.lat);
    lons.push_back(s.lon);
  }
  q.axis_lat = median(std::move(lats));
  q.axis_lon = median(std::move(lons));
  for (const auto& s : network.stops()) {
    if (s.lat > q.axis_lat && s.lon > q.axis_lon) q.north_east.push_back(s.id);
    if (s.lat > q.axis_lat && s.lon < q.axis_lon) q.north_west.push_back(s.id);
    if (s.lat < q.axis_lat && s.lon < q.axis_lon) q.south_west.push_back(s.id);
    if (s.lat < q.axis_lat && s.lon > q.axis_lon) q.south_east.push_back(s.id);
  }
  return q;
}

std::vector<std::pair<StopId, StopId>> admissible_pairs(const TransitNetwork& network,
                                                        Direction direction,
                                                        DistanceWindow window) {
  const Quadrants q = split_quadrants(network);
  using List = const std::vector<StopId>*;
  std::pair<List, List> routes[2];
  switch (direction) {
    case Direction::NS:
      routes[0] = {&q.north_east, &q.south_east};
      routes[1] = {&q.north_west, &q.south_west};
      break;
    case Direction::SN:
      routes[0] = {&q.south_east, &q.north_east};
      routes[1] = {&q.south_west, &q.north_west};
      break;
    case Direction::WE:
      routes[0] = {&q.north_west, &q.north_east};
      routes[1] = {&q.south_west, &q.south_east};
      break;
    case Direction::EW:
      routes[0] = {&q.north_east, &q.north_west};
      routes[1] = {&q.south_east, &q.south_west};
      break;
  }
  std::vector<std::pair<StopId, StopId>> pairs;
  for (const auto& [from, to] : routes) {
    for (const auto& a : *from) {
      const Stop* sa = network.find_stop(a);
      for (const auto& b : *to) {
        const Stop* sb = network.find_stop(b);
        const double d = haversine_km({sa->lat, sa->lon}, {sb->lat, sb->lon});
        if (d >= window.min_km && d <= window.max_km) pairs.emplace_back(a, b);
      }
    }
  }
  return pairs;
}

void ScenarioConfig::validate() const {
  if (n_agents < 1) throw InputError("scenario needs at least one agent");
  if (!(window.min_km < window.max_km)) throw InputError("distance window must be min < max");
}

std::vector<AgentRequest> sample_requests(std::span<const std::pair<StopId, StopId>> pairs,
                                          const ScenarioConfig& config) {
  config.validate();
  if (pairs.empty()) {
    throw ScenarioError("no admissible origin/destination pair for direction " +
                        std::string(to_string(config.direction)));
  }
  std::seed_seq seq{static_cast<std::uint32_t>(config.base_seed),
                    static_cast<std::uint32_t>(config.base_seed >> 32),
                    static_cast<std::uint32_t>(config.n_agents),
                    static_cast<std::uint32_t>(config.direction),
                    static_cast<std::uint32_t>(config.seed_index)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  std::vector<AgentRequest> requests;
  for (int i = 1; i <= config.n_agents; ++i) {
    const auto& [o, d] = pairs[pick(rng)];
    requests.push_back(AgentRequest{AgentId(i), o, d});
  }
  return requests;
}

std::vector<AgentRequest> generate_requests(const TransitNetwork& network,
                                            const ScenarioConfig& config) {
  config.validate();
  if (network.stops().empty()) throw ScenarioError("network has no stops");
  const auto pairs = admissible_pairs(network, config.direction, config.window);
  return sample_requests(pairs, config);
}

PipelineOutput run_pipeline(const TransitNetwork& network, const RelaxedGraph& graph,
                            std::span<const AgentRequest> requests,
                            const PipelineConfig& config) {
  PipelineOutput out;
  ExperimentResult& r = out.result;
  r.n_agents = static_cast<int>(requests.size());
  const auto start = Clock::now();

  try {
    config.cost.validate();

    // Initial phase: independent single-agent searches.
    auto phase = Clock::now();
    std::vector<std::optional<Plan>> found(requests.size());
    parallel_for(requests.size(), config.threads,
                 [&](std::size_t i) { found[i] = plan_individual(graph, requests[i]); });
    for (std::size_t i = 0; i < requests.size(); ++i) {
      if (found[i]) {
        r.initial_cost[found[i]->agent] = found[i]->solo_minutes();
        out.initial_plans.push_back(std::move(*found[i]));
      } else {
        r.unreachable.push_back(requests[i].agent);
      }
    }
    r.timings.initial_ms = elapsed_ms(phase);

    // Best-response phase.
    phase = Clock::now();
    if (!out.initial_plans.empty()) {
      auto br = run_br_phase(out.initial_plans, graph, config.cost, config.br);
      out.joint = std::move(br.joint);
      r.br_converged = br.converged;
      r.br_sweeps = br.sweeps;
      for (const auto& [agent, plan] : out.joint.per_agent) {
        r.shared_cost[agent] = agent_cost(out.joint, agent, config.cost);
      }
      r.delta_c = cost_improvement(out.initial_plans, out.joint, config.cost);
    }
    r.timings.br_ms = elapsed_ms(phase);

    // Timetabling phase: groups are independent of each other.
    phase = Clock::now();
    out.groups = identify_groups(out.joint);
    out.parts.resize(out.groups.size());
    out.schedules.resize(out.groups.size());
    parallel_for(out.groups.size(), config.threads, [&](std::size_t g) {
      const Group& group = out.groups[g];
      out.parts[g] = split_into_parts(group);
      const auto tt = relevant_timetable(group.id, out.parts[g], network);
      const auto limit = std::chrono::duration<double>(
          time_limit_for(static_cast<int>(group.agents.size()), config.scheduler));
      out.schedules[g] = schedule_group(group.id, out.parts[g], tt, limit);
      if (out.schedules[g].schedule) check_schedule(*out.schedules[g].schedule, out.parts[g]);
    });

    std::vector<ItineraryOutcome> solo(out.initial_plans.size());
    const auto solo_limit = std::chrono::duration<double>(time_limit_for(1, config.scheduler));
    parallel_for(out.initial_plans.size(), config.threads, [&](std::size_t i) {
      solo[i] = schedule_single_agent(out.initial_plans[i], network, solo_limit);
    });
    for (std::size_t i = 0; i < solo.size(); ++i) {
      out.solo.emplace(out.initial_plans[i].agent, std::move(solo[i]));
    }

    for (std::size_t g = 0; g < out.groups.size(); ++g) {
      const Group& group = out.groups[g];
      const auto& outcome = out.schedules[g];
      GroupResult gr;
      gr.group_id = group.id;
      gr.size = static_cast<int>(group.agents.size());
      gr.matched = outcome.status == ScheduleStatus::ok;
      gr.timed_out = outcome.status == ScheduleStatus::timed_out;
      std::map<AgentId, Itinerary> solo_itins;
      for (AgentId a : group.agents) {
        const auto& s = out.solo.at(a);
        if (s.itinerary) {
          gr.solo_durations[a] = s.itinerary->duration();
          solo_itins.emplace(a, *s.itinerary);
        }
      }
      if (gr.matched) {
        gr.group_duration = outcome.schedule->total_duration();
        gr.delta_t = prolongation(outcome.schedule->itineraries, solo_itins);
      }
      r.groups.push_back(std::move(gr));
    }
    r.timings.timetabling_ms = elapsed_ms(phase);
  } catch (const Error& e) {
    r.error = e.what();
    spdlog::error("pipeline failed: {}", e.what());
  }
  r.timings.total_ms = elapsed_ms(start);
  return out;
}

std::vector<ExperimentResult> run_batch(std::span<const BatchScenario> scenarios,
                                        const BatchOptions& options) {
  struct Prepared {
    TransitNetwork network;
    RelaxedGraph graph;
    std::map<Direction, std::vector<std::pair<StopId, StopId>>> pairs;
  };
  struct Job {
    std::size_t scenario;
    int n_agents;
    Direction direction;
    int seed;
  };

  std::vector<Prepared> prepared;
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const auto& sc = scenarios[s];
    TransitNetwork base = sc.synthetic ? generate_synthetic_network(*sc.synthetic)
                                       : load_network(sc.stops_csv, sc.timetable_csv);
    Prepared p;
    p.network = add_walking_links(base, sc.walking);
    p.graph = build_relaxed_graph(p.network);
    for (Direction d : sc.directions) p.pairs[d] = admissible_pairs(p.network, d, sc.window);
    prepared.push_back(std::move(p));
    for (int n : sc.agent_counts) {
      for (Direction d : sc.directions) {
        for (int k = 0; k < sc.seeds; ++k) jobs.push_back(Job{s, n, d, k});
      }
    }
  }

  std::vector<ExperimentResult> results(jobs.size());
  PipelineConfig pipeline = options.pipeline;
  if (options.parallel > 1) pipeline.threads = 1;
  parallel_for(jobs.size(), options.parallel, [&](std::size_t j) {
    const Job& job = jobs[j];
    const auto& sc = scenarios[job.scenario];
    const auto& p = prepared[job.scenario];
    ExperimentResult result;
    try {
      ScenarioConfig cfg{sc.name, job.n_agents, job.direction, sc.window, sc.base_seed, job.seed};
      const auto requests = sample_requests(p.pairs.at(job.direction), cfg);
      result = run_pipeline(p.network, p.graph, requests, pipeline).result;
    } catch (const Error& e) {
      spdlog::error("experiment {}/{}/{}/{} failed: {}", sc.name, job.n_agents,
                    to_string(job.direction), job.seed, e.what());
      result.error = e.what();
    }
    result.scenario = sc.name;
    result.n_agents = job.n_agents;
    result.direction = job.direction;
    result.seed = static_cast<std::uint64_t>(job.seed);
    results[j] = std::move(result);
  });
  return results;
}

WalkingParams walking_params_from(const ConfigSection& section) {
  WalkingParams w;
  w.max_distance_km = section.get_double("walk.max_km", w.max_distance_km);
  w.speed_kmh = section.get_double("walk.speed_kmh", w.speed_kmh);
  return w;
}

PipelineConfig pipeline_config_from(const ConfigSection& section) {
  PipelineConfig c;
  c.scheduler.small_limit_s = section.get_double("sched.limit.small_s", c.scheduler.small_limit_s);
  c.scheduler.medium_limit_s =
      section.get_double("sched.limit.medium_s", c.scheduler.medium_limit_s);
  c.scheduler.large_limit_s = section.get_double("sched.limit.large_s", c.scheduler.large_limit_s);
  c.br.max_rounds = section.get_int("br.max_rounds", c.br.max_rounds);
  c.cost.discount_share = section.get_double("cost.discount_share", c.cost.discount_share);
  c.cost.floor_share = section.get_double("cost.floor_share", c.cost.floor_share);
  c.cost.validate();
  return c;
}

std::vector<BatchScenario> load_matrix(const ConfigFile& file,
                                       const std::filesystem::path& base_dir) {
  std::vector<ConfigSection> sections = file.sections;
  if (sections.empty() && (file.global.get("grid") || file.global.get("stops"))) {
    sections.push_back(ConfigSection{file.global.get_string("name", "S"), {}});
  }

  std::vector<BatchScenario> out;
  for (auto section : sections) {
    for (const auto& [k, v] : file.global.values) section.values.emplace(k, v);
    BatchScenario sc;
    sc.name = section.name;
    if (auto stops = section.get("stops")) {
      auto timetable = section.get("timetable");
      if (!timetable) throw InputError("scenario '" + sc.name + "' has stops but no timetable");
      sc.stops_csv = base_dir / *stops;
      sc.timetable_csv = base_dir / *timetable;
    } else {
      SyntheticNetworkSpec spec;
      if (auto grid = section.get("grid")) {
        const auto x = grid->find('x');
        if (x == std::string::npos) throw InputError("grid must look like WxH");
        ConfigSection dims{"", {{"w", grid->substr(0, x)}, {"h", grid->substr(x + 1)}}};
        spec.width = dims.get_int("w", 0);
        spec.height = dims.get_int("h", 0);
      }
      spec.spacing_km = section.get_double("spacing_km", spec.spacing_km);
      spec.headway = section.get_int("headway", spec.headway);
      spec.leg_minutes = section.get_int("leg", spec.leg_minutes);
      spec.first_departure = section.get_int("first_departure", spec.first_departure);
      spec.last_departure = section.get_int("last_departure", spec.last_departure);
      spec.coach_every = section.get_int("coach_every", spec.coach_every);
      spec.coach_headway = section.get_int("coach_headway", spec.coach_headway);
      spec.coach_leg_minutes = section.get_int("coach_leg", spec.coach_leg_minutes);
      spec.phase_step = section.get_int("phase_step", spec.phase_step);
      spec.validate();
      sc.synthetic = spec;
    }
    sc.walking = walking_params_from(section);
    sc.agent_counts = section.get_int_list("agents", sc.agent_counts);
    if (auto dirs = section.get("directions")) {
      sc.directions.clear();
      for (const auto& d : section.get_list("directions", {})) {
        auto parsed = parse_direction(d);
        if (!parsed) throw InputError("unknown direction '" + d + "'");
        sc.directions.push_back(*parsed);
      }
    }
    sc.seeds = section.get_int("seeds", sc.seeds);
    sc.base_seed = static_cast<std::uint64_t>(section.get_int("base_seed", 1));
    sc.window.min_km = section.get_double("min_km", sc.window.min_km);
    sc.window.max_km = section.get_double("max_km", sc.window.max_km);
    if (sc.seeds < 0) throw InputError("seeds must be non-negative");
    if (!(sc.window.min_km < sc.window.max_km)) throw InputError("min_km must be below max_km");
    out.push_back(std::move(sc));
  }
  return out;
}

std::vector<BatchScenario> default_scenarios() {
  struct Size {
    const char* name;
    int w;
    int h;
    double spacing_km;
    Minutes leg;
    Minutes coach_leg;
  };
  // Roughly the same 150-200 km region at growing resolution.
  const Size sizes[] = {{"S1'", 10, 10, 16.0, 16, 11},
                        {"S2'", 15, 15, 11.0, 11, 8},
                        {"S3'", 20, 20, 8.0, 8, 6},
                        {"S4'", 30, 30, 5.0, 5, 4},
                        {"S5'", 40, 50, 4.0, 4, 3}};
  std::vector<BatchScenario> out;
  for (const auto& s : sizes) {
    BatchScenario sc;
    sc.name = s.name;
    SyntheticNetworkSpec spec;
    spec.width = s.w;
    spec.height = s.h;
    spec.spacing_km = s.spacing_km;
    spec.leg_minutes = s.leg;
    spec.headway = 60;
    spec.first_departure = 360;
    spec.last_departure = 1200;
    spec.coach_every = 2;
    spec.coach_headway = 300;
    spec.coach_leg_minutes = s.coach_leg;
    spec.phase_step = 23;
    sc.synthetic = spec;
    out.push_back(std::move(sc));
  }
  return out;
}

std::vector<AgentRequest> load_requests(std::istream& in) {
  std::vector<AgentRequest> out;
  std::set<int> seen;
  for (const auto& row : csv::read(in, "agent,origin,destination")) {
    if (row.fields.size() != 3) throw ParseError(row.line, "expected 3 fields");
    AgentRequest r{AgentId(csv::parse_number<int>(row, 0, "agent")), StopId(row.fields[1]),
                   StopId(row.fields[2])};
    if (!seen.insert(r.agent.value).second) throw ParseError(row.line, "duplicate agent id");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace jshare
