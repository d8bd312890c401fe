#include "fixtures.hpp"

namespace jshare::testing {

Plan make_plan(int agent, std::initializer_list<std::pair<const char*, Minutes>> stops_and_minutes,
               const char* last) {
  Plan plan;
  plan.agent = AgentId(agent);
  std::vector<std::pair<StopId, Minutes>> hops;
  for (const auto& [s, m] : stops_and_minutes) hops.emplace_back(StopId(s), m);
  plan.origin = hops.front().first;
  plan.destination = StopId(last);
  for (std::size_t i = 0; i < hops.size(); ++i) {
    const StopId to = i + 1 < hops.size() ? hops[i + 1].first : StopId(last);
    plan.legs.push_back(Leg{hops[i].first, to, hops[i].second});
    plan.total_cost += hops[i].second;
  }
  return plan;
}

namespace {

Stop stop(const char* id, double lat, double lon) { return Stop{StopId(id), id, lat, lon, Mode::rail}; }

}  // namespace

TransitNetwork relaxed_example_network() {
  std::vector<Stop> stops{stop("A", 56.0, -4.0), stop("B", 56.0, -3.5), stop("C", 56.0, -3.0),
                          stop("D", 56.0, -2.5), stop("E", 56.0, -2.0), stop("F", 56.0, -1.5)};
  std::vector<TimetabledConnection> c{
      {"L1", "L1a", 1, StopId("A"), StopId("B"), 400, 50},
      {"L1", "L1a", 2, StopId("B"), StopId("C"), 452, 30},
      {"L2", "L2a", 1, StopId("C"), StopId("D"), 500, 45},
      {"L2", "L2a", 2, StopId("D"), StopId("E"), 547, 75},
      {"L2", "L2a", 3, StopId("E"), StopId("F"), 624, 30},
      {"L2", "L2b", 1, StopId("C"), StopId("D"), 600, 50},
      {"L2", "L2b", 2, StopId("D"), StopId("E"), 652, 70},
      {"L2", "L2b", 3, StopId("E"), StopId("F"), 724, 35},
      {"X", "Xa", 1, StopId("C"), StopId("F"), 530, 100},
  };
  return TransitNetwork(stops, c);
}

TransitNetwork group_example_network() {
  std::vector<Stop> stops{stop("A", 57.0, -4.0), stop("B", 55.0, -4.0), stop("C", 56.0, -3.5),
                          stop("D", 56.0, -3.0), stop("E", 56.0, -2.5), stop("F", 56.0, -2.0),
                          stop("G", 57.0, -1.5), stop("H", 56.003, -2.0)};
  std::vector<TimetabledConnection> c{
      {"T1", "T1", 1, StopId("C"), StopId("F"), 450, 60},
      {"T2", "T2", 1, StopId("C"), StopId("D"), 445, 20},
      {"T2", "T2", 2, StopId("D"), StopId("E"), 465, 30},
      {"T2", "T2", 3, StopId("E"), StopId("F"), 495, 25},
      {"T3", "T3", 1, StopId("A"), StopId("C"), 400, 30},
      {"T4", "T4", 1, StopId("B"), StopId("C"), 410, 30},
      {"T5", "T5", 1, StopId("F"), StopId("G"), 530, 30},
  };
  std::vector<WalkingLink> w{{StopId("F"), StopId("H"), 10}, {StopId("H"), StopId("F"), 10}};
  return TransitNetwork(stops, c, w);
}

std::vector<Plan> group_example_plans() {
  return {make_plan(1, {{"A", 30}, {"C", 20}, {"D", 30}, {"E", 25}, {"F", 30}}, "G"),
          make_plan(2, {{"B", 30}, {"C", 20}, {"D", 30}, {"E", 25}, {"F", 10}}, "H")};
}

const char* const kFourStopStops =
    "stop_id,name,lat,lon,mode\n"
    "S1,North,55.90,-3.20,rail\n"
    "S2,Middle,55.80,-3.20,rail\n"
    "S3,\"South, upper\",55.70,-3.20,coach\n"
    "S4,South,55.60,-3.20,walk-node\n";

const char* const kFourStopTimetable =
    "service_id,run_id,seq,from_stop,to_stop,departure_min,duration_min\n"
    "R,R1,1,S1,S2,480,12\n"
    "R,R1,2,S2,S3,493,15\n"
    "R,R1,3,S3,S4,510,9\n"
    "R,R2,1,S4,S3,600,9\n"
    "R,R2,2,S3,S2,610,15\n"
    "R,R2,3,S2,S1,626,12\n"
    "R,R1,2,S2,S3,493,14\n";

}  // namespace jshare::testing
