#pragma once

#include "fairplan/ground/ground_task.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fairplan::heuristics {

using ground::FactId;
using ground::GroundTask;

class HeuristicValue {
public:
    constexpr HeuristicValue() = default;
    constexpr explicit HeuristicValue(std::int64_t v) : value_(v) {}
    static constexpr HeuristicValue infinity() { return HeuristicValue(kInfinite); }

    constexpr bool is_infinite() const { return value_ == kInfinite; }
    constexpr bool is_finite() const { return !is_infinite(); }
    // Undefined for infinite values.
    constexpr std::int64_t value() const { return value_; }

    constexpr auto operator<=>(const HeuristicValue&) const = default;

private:
    static constexpr std::int64_t kInfinite = std::numeric_limits<std::int64_t>::max();
    std::int64_t value_ = 0;
};

// Keeps agentless actions and the actions whose agent is `agent`.
GroundTask restrict_to_agent(const GroundTask& task, const std::string& agent);

// Delete relaxation of a ground task evaluated from its initial state.
// Each conditional effect C ▷ E becomes a separate relaxed action
// pre ∪ C → add(E); negative conditions are ignored.
class RelaxedAnalysis {
public:
    struct Piece {
        std::size_t action;  // ground action index
        std::size_t part;    // 0 = unconditional effects, i+1 = conditional effect i
        std::vector<FactId> pre;
        std::vector<FactId> add;
        std::int64_t cost;
    };

    explicit RelaxedAnalysis(const GroundTask& task);

    // FF relaxed-plan cost; infinite when some goal is relaxed-unreachable.
    HeuristicValue h_ff(const std::vector<FactId>& goals) const;
    // Relaxed plan as relaxed pieces in an executable order.
    std::optional<std::vector<std::size_t>> relaxed_plan(const std::vector<FactId>& goals) const;

    HeuristicValue h_add(FactId f) const;
    bool reachable(FactId f) const { return h_add_[f] != kUnreached; }
    const std::vector<Piece>& pieces() const { return pieces_; }

private:
    static constexpr std::int64_t kUnreached = std::numeric_limits<std::int64_t>::max();

    std::optional<std::size_t> best_supporter(FactId f) const;

    const GroundTask* task_;
    std::vector<Piece> pieces_;
    std::vector<std::vector<std::size_t>> achievers_;  // fact -> pieces adding it
    std::vector<std::int64_t> h_add_;
    std::vector<std::size_t> pop_order_;    // fact finalisation order
    std::vector<std::size_t> ready_order_;  // piece finalisation order
    std::vector<int> piece_layer_;
    std::vector<std::string> piece_name_;
};

HeuristicValue h_ff(const GroundTask& task, const std::vector<FactId>& goals);

// h_FF({a}, goals) for every agent, with the restricted relaxations cached.
class AgentHeuristics {
public:
    explicit AgentHeuristics(const GroundTask& task);

    HeuristicValue h_ff(std::size_t agent, const std::vector<FactId>& goals) const;
    const std::vector<std::string>& agents() const { return agents_; }

private:
    std::vector<std::string> agents_;
    std::vector<std::unique_ptr<GroundTask>> restricted_;
    std::vector<std::unique_ptr<RelaxedAnalysis>> analyses_;
};

// Memo of h_FF({a},{g}) over agents × goals; a pair is achievable iff finite.
struct AchievabilityTable {
    std::vector<std::string> agents;
    std::vector<FactId> goals;
    std::vector<std::vector<HeuristicValue>> h;  // h[agent][goal]

    bool achievable(std::size_t agent, std::size_t goal) const { return h[agent][goal].is_finite(); }
    std::vector<std::pair<std::size_t, std::size_t>> pairs() const;
};

AchievabilityTable achievable(const GroundTask& task, const std::vector<std::string>& agents,
                              const std::vector<FactId>& goals);

} // namespace fairplan::heuristics
