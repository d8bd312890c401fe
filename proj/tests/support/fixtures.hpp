#pragma once

#include <string>
#include <vector>

#include "jshare/best_response.hpp"
#include "jshare/transit.hpp"

namespace jshare::testing {

Plan make_plan(int agent, std::initializer_list<std::pair<const char*, Minutes>> stops_and_minutes,
               const char* last);

/// Stops A..F. Runs: A-B-C, two stopping runs C-D-E-F and a nonstop C-F.
/// Minimal durations A->B 50, C->D 45, D->E 70, E->F 30.
TransitNetwork relaxed_example_network();

/// Two agents around the C..F corridor: agent 1 A->G, agent 2 B->H. Trains T1
/// (direct C->F), T2 (stopping C-D-E-F), T3 (A->C), T4 (B->C), T5 (F->G); H is
/// a walk from F.
TransitNetwork group_example_network();
std::vector<Plan> group_example_plans();

/// CSV text of a 4-stop network with two runs, one row duplicated.
extern const char* const kFourStopStops;
extern const char* const kFourStopTimetable;

}  // namespace jshare::testing
