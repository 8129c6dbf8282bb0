#pragma once

#include "fairplan/ground/plan.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fairplan::harness {

// How a planner is run. Built-in planners read the emitted files like an
// external one would; external ones are shell command templates.
struct PlannerAdapter {
    enum class Kind { Bfs, Ucs, External };

    std::string name = "bfs";
    Kind kind = Kind::Bfs;
    std::string command;  // external only; must use {domain} {problem} {plan}
    double timeout = 900;
    std::size_t max_states = 2'000'000;  // built-in only
    std::string cost_regex = R"(;\s*cost\s*=\s*(-?[0-9]+))";

    // Throws std::invalid_argument.
    void validate() const;

    static PlannerAdapter builtin(const std::string& name, double timeout = 900,
                                  std::size_t max_states = 2'000'000);
    static PlannerAdapter external(std::string name, std::string command, double timeout = 900);
};

// {"name": "bfs"} or {"name": "lama", "command": "...", "timeout": 900}
PlannerAdapter adapter_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const PlannerAdapter& a);

struct TaskFiles {
    std::string domain;
    std::string problem;
    std::string plan;  // where the planner writes its plan
};

enum class PlannerStatus { Solved, Unsolvable, Timeout, Failed, OutOfMemory };
std::string to_string(PlannerStatus s);

struct PlannerOutcome {
    PlannerStatus status = PlannerStatus::Failed;
    std::vector<ground::PlanStep> steps;
    std::optional<std::int64_t> reported_cost;
    double seconds = 0;
    std::string message;
};

// Runs the planner with wall-clock measurement. A negative timeout means
// the adapter's own. External commands run in their own process group,
// which is killed on timeout; their output goes to `<plan>.log`.
PlannerOutcome run_planner(const PlannerAdapter& adapter, const TaskFiles& files, double timeout = -1);

// 'a b' -> "'a b'"
std::string shell_quote(const std::string& s);

} // namespace fairplan::harness
