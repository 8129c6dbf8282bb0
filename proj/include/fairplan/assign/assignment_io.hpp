#pragma once

#include "fairplan/assign/assignment.hpp"

#include "json.hpp"

namespace fairplan::assign {

inline constexpr int kAssignmentFormatVersion = 1;

nlohmann::json to_json(const GoalAssignment& a);
// Reads the document written by to_json; statistics are taken as stored.
GoalAssignment assignment_from_json(const nlohmann::json& doc);

} // namespace fairplan::assign
