#pragma once

#include "fairplan/assign/assignment.hpp"
#include "fairplan/eval/fairness.hpp"
#include "fairplan/harness/planner.hpp"
#include "fairplan/pddl/task.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fairplan::harness {

using assign::Scheme;

struct Approach {
    enum class Kind { Passthrough, ContractNet, Milp, Fpc };
    Kind kind = Kind::Passthrough;
    std::optional<Scheme> scheme;  // Milp and Fpc only

    // passthrough, contract-net, milp-g-maximin, ..., fpc-g-propeq
    std::string name() const;
    bool operator==(const Approach&) const = default;
};

// Throws std::invalid_argument on unknown names and on fpc with a
// workload scheme.
Approach parse_approach(const std::string& name);

// "g-maximin", "w-propeq", ...
std::string short_name(Scheme s);

enum class RunStatus { Solved, Unsolvable, Timeout, Failed, OutOfMemory, InvalidPlan, AssignmentFailed, CompileFailed };
std::string to_string(RunStatus s);
RunStatus parse_run_status(const std::string& s);

struct RunRecord {
    std::string approach;
    std::string task_id;
    std::string domain;
    std::size_t agents = 0;
    std::size_t goals = 0;
    RunStatus status = RunStatus::Failed;
    std::optional<std::int64_t> raw_cost;  // as validated on the planned task
    std::optional<std::int64_t> cost;      // reward actions stripped; validated on the original task
    std::optional<eval::FairnessReport> report;
    std::optional<assign::GoalAssignment> assignment;
    std::optional<std::vector<std::size_t>> partition;  // claimed by the reward step
    double time = 0;          // seconds, assignment and compilation included
    double planner_time = 0;
    std::string message;

    bool solved() const { return status == RunStatus::Solved; }
};

inline constexpr int kRecordFormatVersion = 1;
nlohmann::json to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& doc);

struct RunOptions {
    std::int64_t priority = assign::kDefaultPriority;
    std::string task_dir;     // receives domain.pddl and problem.pddl of the planned task
    std::string scratch_dir;  // planner working files
    std::string plan_path;    // optional copy of the planner's plan
};

// One approach on one task: assign and compile as the approach requires,
// emit, plan, validate on the planned task, project and validate on the
// original task, then evaluate fairness there.
RunRecord run_approach(const Approach& approach, const pddl::Task& task, const std::string& task_id,
                       const std::string& domain, const PlannerAdapter& adapter, const RunOptions& options);

} // namespace fairplan::harness
