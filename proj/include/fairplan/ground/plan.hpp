#pragma once

#include "fairplan/ground/ground_task.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fairplan::ground {

struct PlanStep {
    std::string name;
    std::vector<std::string> args;

    bool operator==(const PlanStep&) const = default;
};

struct Plan {
    std::vector<std::size_t> actions;  // indices into GroundTask::actions
    std::optional<std::int64_t> reported_cost;
};

class PlanError : public std::runtime_error {
public:
    PlanError(const std::string& message, int line) : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// IPC plan text: one "(name args...)" per line, ';' comments, and an
// optional "; cost = N" trailer. An optional "N:" step prefix is accepted.
std::vector<PlanStep> parse_plan_steps(std::string_view text, std::optional<std::int64_t>* reported_cost = nullptr);

Plan parse_plan(std::string_view text, const GroundTask& task);
Plan resolve_plan(const std::vector<PlanStep>& steps, const GroundTask& task);

std::vector<PlanStep> plan_steps(const Plan& plan, const GroundTask& task);
std::string format_plan(const Plan& plan, const GroundTask& task);
std::int64_t plan_cost(const Plan& plan, const GroundTask& task);

// Per-step record of plan execution.
struct PlanTrace {
    bool valid = false;
    std::vector<State> states;  // states[i] precedes step i; size = executed steps + 1
    std::vector<std::size_t> actions;
    std::vector<std::vector<std::size_t>> fired;  // conditional effects applied per step
    std::int64_t cost = 0;

    std::optional<std::size_t> failed_step;
    std::vector<FactId> missing;  // unmet preconditions at failed_step, or unmet goals
    std::string error;

    const State& final_state() const { return states.back(); }
};

// Strict validator: an inapplicable step makes the plan invalid at that index.
PlanTrace execute(const GroundTask& task, const Plan& plan);

} // namespace fairplan::ground
