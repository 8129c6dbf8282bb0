#pragma once

#include "fairplan/pddl/task.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fairplan::ground {

using FactId = std::uint32_t;
using pddl::Atom;

// Set of facts over a fixed universe, packed as bits.
class State {
public:
    State() = default;
    explicit State(std::size_t universe) : words_((universe + 63) / 64, 0) {}

    bool test(FactId f) const { return (words_[f >> 6] >> (f & 63)) & 1U; }
    void set(FactId f) { words_[f >> 6] |= std::uint64_t{1} << (f & 63); }
    void reset(FactId f) { words_[f >> 6] &= ~(std::uint64_t{1} << (f & 63)); }

    bool contains_all(const std::vector<FactId>& facts) const;
    bool contains_none(const std::vector<FactId>& facts) const;
    // s ⊆ other
    bool subset_of(const State& other) const;
    std::size_t hash() const;

    // Calls f(FactId) for every member, in increasing order.
    template <class F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w)
            for (std::uint64_t bits = words_[w]; bits; bits &= bits - 1)
                f(static_cast<FactId>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits))));
    }

    bool operator==(const State& other) const { return words_ == other.words_; }

private:
    std::vector<std::uint64_t> words_;
};

struct StateHash {
    std::size_t operator()(const State& s) const { return s.hash(); }
};

struct GroundConditionalEffect {
    std::vector<FactId> condition;          // must hold
    std::vector<FactId> negated_condition;  // must not hold
    std::vector<FactId> add;
    std::vector<FactId> del;
};

struct GroundAction {
    std::string name;
    std::vector<std::string> args;
    std::size_t schema = 0;
    std::optional<std::size_t> agent;  // index into GroundTask::agents
    std::vector<FactId> pre;
    std::vector<FactId> negated_pre;
    std::vector<FactId> add;
    std::vector<FactId> del;
    std::vector<GroundConditionalEffect> conditional;
    std::int64_t cost = 1;

    // "(name arg1 ... argk)"
    std::string signature() const;
};

class GroundTask {
public:
    std::vector<Atom> facts;  // sorted; FactId indexes this vector
    std::vector<GroundAction> actions;
    std::vector<FactId> init;   // sorted
    std::vector<FactId> goals;  // problem declaration order
    std::vector<std::string> agents;
    pddl::Metric metric = pddl::Metric::None;
    std::map<std::string, std::size_t> schema_arity;

    std::optional<FactId> find_fact(const Atom& atom) const;
    FactId fact(const Atom& atom) const;  // throws when absent
    std::optional<std::size_t> find_action(const std::string& name, const std::vector<std::string>& args) const;
    std::optional<std::size_t> agent_index(const std::string& agent) const;

    State initial_state() const;
    bool is_goal(const State& s) const;
    std::string fact_name(FactId f) const { return facts[f].str(); }

    // Rebuilds the lookup tables after facts/actions were edited.
    void reindex();

private:
    std::map<Atom, FactId> fact_index_;
    std::map<std::string, std::size_t> action_index_;
};

struct GroundOptions {
    // Evaluate static predicates against the initial state while grounding.
    bool prune_static = true;
};

// Predicates that never appear in an add or delete effect.
std::vector<std::string> static_predicates(const pddl::Task& task);

GroundTask ground(const pddl::Task& task, const GroundOptions& options = {});

bool applicable(const State& s, const GroundAction& a);

// Successor state; an inapplicable action leaves the state unchanged.
// Conditions are evaluated on the pre-transition state, deletes precede adds.
State apply(const State& s, const GroundAction& a);
// Same, also reporting which conditional effects fired.
State apply(const State& s, const GroundAction& a, std::vector<std::size_t>& fired);

} // namespace fairplan::ground
