#pragma once

#include "fairplan/assign/assignment.hpp"
#include "fairplan/ground/plan.hpp"
#include "fairplan/pddl/task.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fairplan::compile {

using assign::Scheme;
using pddl::Atom;
using pddl::Task;

// Goals of the lifted task that are false initially, in declaration order.
std::vector<Atom> assignable_goals(const Task& task);

// The add atom of `schema` that grounds to `goal` through the schema's own
// parameters, if any. Atoms binding an agent-typed variable never match,
// and neither do schemas whose first parameter is not an agent.
std::optional<Atom> eff_pred_goal(const pddl::ActionSchema& schema, const Atom& goal, const Task& task);

// "(at package1 s1)" -> "atpackage1-s1-done"
std::string done_flag(const Atom& goal);
// "at" -> "atab"
std::string labeled_symbol(const std::string& predicate);

inline constexpr const char* kRewardPrefix = "__give_min_reward_";

// Result of a compilation plus what is needed to map plans back.
struct Compilation {
    Task task;
    std::vector<Atom> assignable;                     // the goals being counted or labeled
    std::map<std::string, std::size_t> source_arity;  // schema name -> arity in the source task
    std::vector<std::string> extended_schemas;        // schemas given conditional effects
    std::size_t new_predicates = 0;

    // fairness compilation only
    std::vector<std::vector<std::size_t>> partitions;
    std::vector<std::string> reward_schemas;  // parallel to partitions
    std::vector<std::string> numbers;         // counter objects n0..n_{|G|+1}

    bool is_reward(const std::string& schema) const;
};

// Agent-labeled compilation of a fixed goal assignment.
Compilation compile_labeled(const Task& task, const assign::GoalAssignment& assignment);

// All multisets of `agents` nonnegative parts summing to `goals`, each sorted
// nondecreasingly, listed in lexicographic order.
std::vector<std::vector<std::size_t>> restricted_partitions(std::size_t goals, std::size_t agents);

// Reward cost for a final goal distribution. Goal schemes only.
std::int64_t omega(Scheme scheme, const std::vector<std::size_t>& partition, std::size_t goal_count,
                   std::int64_t priority);

enum class RewardCost {
    NumericFunction,  // (increase (total-cost) (min-associated-cost n_k))
    Constant,         // (increase (total-cost) ω)
};

struct FairOptions {
    std::int64_t priority = assign::kDefaultPriority;
    RewardCost reward_cost = RewardCost::NumericFunction;
};

// Joint assignment-and-planning compilation with goal counters and one
// reward action per restricted partition.
Compilation compile_fair(const Task& task, Scheme scheme, const FairOptions& options = {});

// Drops reward steps and the counter arguments added to extended schemas.
std::vector<ground::PlanStep> project_plan(const Compilation& c, const std::vector<ground::PlanStep>& steps);

// Partition claimed by the reward step of a compiled plan, if it has one.
std::optional<std::vector<std::size_t>> rewarded_partition(const Compilation& c,
                                                           const std::vector<ground::PlanStep>& steps);

} // namespace fairplan::compile
