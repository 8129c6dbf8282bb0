#pragma once

#include "fairplan/assign/assignment.hpp"
#include "fairplan/ground/ground_task.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fairplan::harness {

using ground::FactId;
using ground::GroundTask;
using ground::State;

// Applicable actions of a state, found through the first precondition of
// each action instead of a scan over all of them.
class SuccessorGenerator {
public:
    explicit SuccessorGenerator(const GroundTask& task);
    // Indices in increasing order.
    void applicable(const State& s, std::vector<std::size_t>& out) const;

private:
    const GroundTask* task_;
    std::vector<std::vector<std::size_t>> by_fact_;
    std::vector<std::size_t> unconditional_;  // no positive precondition
};

enum class SearchStatus { Solved, Unsolvable, LimitReached, Timeout };
std::string to_string(SearchStatus s);

struct SearchLimits {
    std::size_t max_states = 2'000'000;
    double timeout = 0;  // seconds; 0 = none
};

struct SearchResult {
    SearchStatus status = SearchStatus::Unsolvable;
    std::vector<std::size_t> plan;  // action indices
    std::int64_t cost = 0;
    std::size_t expanded = 0;
    std::size_t stored = 0;
};

// Fewest steps. Exhausting the reachable space proves unsolvability.
SearchResult bfs(const GroundTask& task, const SearchLimits& limits = {});
// Cheapest plan under action costs.
SearchResult ucs(const GroundTask& task, const SearchLimits& limits = {});

// What brute_force_plan minimizes: plan cost alone, or a fairness scheme
// first and plan cost second.
struct PlanObjective {
    std::optional<assign::Scheme> scheme;

    static PlanObjective cost() { return {}; }
    static PlanObjective lexicographic(assign::Scheme s) { return {s}; }
};

struct BrutePlan {
    std::vector<std::size_t> actions;
    std::int64_t cost = 0;
    std::vector<std::int64_t> goal_counts;  // first achievers, per agent
    std::vector<std::int64_t> workloads;
    std::int64_t fairness = 0;  // value of the objective's scheme, 0 for cost
};

// Exhaustive search over plans of at most `horizon` steps. States are
// extended with whatever the objective depends on (credited goals and
// per-agent counts, or workloads). Ties: objective, cost, fewer steps,
// then discovery order. Throws assign::BoundExceeded past `bound` stored
// search nodes.
std::optional<BrutePlan> brute_force_plan(const GroundTask& task, std::size_t horizon,
                                          const PlanObjective& objective, std::size_t bound = 2'000'000);

} // namespace fairplan::harness
