#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "jshare/best_response.hpp"
#include "jshare/groups.hpp"
#include "jshare/planner.hpp"
#include "jshare/scheduler.hpp"

namespace jshare {

/// {"agent","origin","destination","legs":[{"from","to","minutes"}],"cost"}
nlohmann::json to_json(const Plan& plan);
Plan plan_from_json(const nlohmann::json& j);

/// {"edges":[{"from","to","minutes","agents":[]}],"plans":[<plan>...]}
nlohmann::json to_json(const JointPlan& joint);
JointPlan joint_plan_from_json(const nlohmann::json& j);

/// {"group_id","agents":[],"parts":[{"id","stops":[],"agents":[]}]}
nlohmann::json to_json(const Group& group, std::span<const Part> parts);

/// {"from","to","mode","run_id","board","alight"}
nlohmann::json to_json(const LegAssignment& leg);
/// {"agent","legs":[...],"depart","arrive"}
nlohmann::json to_json(const Itinerary& itinerary);
/// {"group_id","status","reason","itineraries":[...]}
nlohmann::json to_json(const GroupScheduleOutcome& outcome, int group_id);

}  // namespace jshare
