#pragma once

#include "fairplan/ground/ground_task.hpp"
#include "fairplan/heuristics/relaxed.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairplan::assign {

using ground::FactId;
using ground::GroundTask;
using heuristics::HeuristicValue;

enum class Scheme { GoalMaximin, GoalPropEq, WorkloadMaximin, WorkloadPropEq };

inline constexpr Scheme kAllSchemes[] = {Scheme::GoalMaximin, Scheme::GoalPropEq, Scheme::WorkloadMaximin,
                                          Scheme::WorkloadPropEq};

// "goal-maximin", "goal-propeq", "workload-maximin", "workload-propeq".
std::string to_string(Scheme s);
// Also accepts the short forms "g-maximin", "w-propeq", ...
std::optional<Scheme> parse_scheme(const std::string& text);
inline bool is_goal_scheme(Scheme s) { return s == Scheme::GoalMaximin || s == Scheme::GoalPropEq; }
inline bool is_propeq(Scheme s) { return s == Scheme::GoalPropEq || s == Scheme::WorkloadPropEq; }

class UnassignableGoal : public std::runtime_error {
public:
    explicit UnassignableGoal(const std::string& goal)
        : std::runtime_error("goal " + goal + " cannot be achieved by any agent"), goal_(goal) {}
    const std::string& goal() const { return goal_; }

private:
    std::string goal_;
};

// Goals false in the initial state, in declaration order.
std::vector<FactId> assignable_goals(const GroundTask& task);

inline constexpr std::int64_t kDefaultPriority = 1000;

// x[a][g] exists iff h[a][g] is finite.
struct AssignmentModel {
    Scheme scheme = Scheme::GoalMaximin;
    std::int64_t priority = kDefaultPriority;  // the big constant weighting the fairness term
    std::vector<std::string> agents;
    std::vector<std::string> goals;
    std::vector<std::vector<HeuristicValue>> h;  // h[agent][goal]

    bool carries(std::size_t a, std::size_t g) const { return h[a][g].is_finite(); }
    std::size_t variable_count() const;
    // Numbers of the constraint families present (5 always; 6/7 goal, 8/9 workload).
    std::vector<int> constraint_families() const;
    // CPLEX LP text of the weighted single-objective formulation.
    std::string lp_text() const;
};

// Throws UnassignableGoal when a goal has no finite h entry.
AssignmentModel make_model(std::vector<std::string> agents, std::vector<std::string> goals,
                           std::vector<std::vector<HeuristicValue>> h, Scheme scheme,
                           std::int64_t priority = kDefaultPriority);
AssignmentModel build_model(const GroundTask& task, Scheme scheme, std::int64_t priority = kDefaultPriority);

struct GoalAssignment {
    std::string method;
    std::optional<Scheme> scheme;
    std::int64_t priority = kDefaultPriority;
    std::vector<std::string> agents;
    std::vector<std::string> goals;
    std::vector<std::size_t> agent_of;  // goal index -> agent index

    std::vector<std::int64_t> goal_counts;  // per agent
    std::vector<std::int64_t> workloads;    // per agent, sum of h
    std::int64_t min_goals = 0, max_goals = 0;
    std::int64_t min_workload = 0, max_workload = 0;
    std::int64_t cost = 0;  // sum of h over the assignment

    // minG, minG-maxG, minW or minW-maxW; larger is fairer.
    std::int64_t fairness_value(Scheme s) const;
    std::int64_t fairness_value() const { return fairness_value(scheme.value_or(Scheme::GoalMaximin)); }
    const std::string& agent_for(const std::string& goal) const;

    bool operator==(const GoalAssignment&) const = default;
};

// Fills the per-agent statistics of an assignment from h.
GoalAssignment describe(const AssignmentModel& model, std::vector<std::size_t> agent_of, std::string method);

// Exact two-level lexicographic optimum: fairness term first, then minimal
// sum of h. Among equal optima the assignment vector, read in goal-name
// order with agents compared by name, is lexicographically smallest.
GoalAssignment solve(const AssignmentModel& model);

class BoundExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kBruteForceBound = 10'000'000;

// Exhaustive enumeration with the same objective and tie-break as solve().
GoalAssignment brute_force_assignment(const AssignmentModel& model, std::uint64_t bound = kBruteForceBound);
GoalAssignment brute_force_assignment(const GroundTask& task, Scheme scheme, std::uint64_t bound = kBruteForceBound);

} // namespace fairplan::assign
