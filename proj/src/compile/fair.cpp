#include "fairplan/compile/compile.hpp"
#include "compile_util.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

namespace fairplan::compile {

using pddl::ActionSchema;
using pddl::CostExpr;
using pddl::Literal;
using pddl::TypedName;

std::vector<std::vector<std::size_t>> restricted_partitions(std::size_t goals, std::size_t agents) {
    if (agents == 0)
        throw std::invalid_argument("partitions need at least one part");
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> parts;
    // parts stay nondecreasing: each next part is at least the previous one
    std::function<void(std::size_t, std::size_t)> extend = [&](std::size_t left, std::size_t floor) {
        const std::size_t slots = agents - parts.size();
        if (slots == 1) {
            if (left >= floor) {
                parts.push_back(left);
                out.push_back(parts);
                parts.pop_back();
            }
            return;
        }
        for (std::size_t v = floor; v * slots <= left; ++v) {
            parts.push_back(v);
            extend(left - v, v);
            parts.pop_back();
        }
    };
    extend(goals, 0);
    return out;
}

std::int64_t omega(Scheme scheme, const std::vector<std::size_t>& partition, std::size_t goal_count,
                   std::int64_t priority) {
    if (partition.empty())
        throw std::invalid_argument("empty partition");
    auto [lo, hi] = std::minmax_element(partition.begin(), partition.end());
    switch (scheme) {
    case Scheme::GoalMaximin:
        return (static_cast<std::int64_t>(goal_count) - static_cast<std::int64_t>(*lo)) * priority;
    case Scheme::GoalPropEq: return static_cast<std::int64_t>(*hi - *lo) * priority;
    default: throw std::invalid_argument("the fairness compilation supports goal schemes only");
    }
}

namespace {

std::string join(const std::vector<std::size_t>& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i)
        s += (i ? "-" : "") + std::to_string(p[i]);
    return s;
}

} // namespace

Compilation compile_fair(const Task& task, Scheme scheme, const FairOptions& options) {
    if (!assign::is_goal_scheme(scheme))
        throw std::invalid_argument("the fairness compilation supports goal schemes only, not " +
                                    assign::to_string(scheme));
    if (task.agents.empty())
        throw std::invalid_argument("fairness compilation needs at least one agent");

    Compilation out;
    out.task = task;
    out.assignable = assignable_goals(task);
    for (const auto& a : task.actions)
        out.source_arity[a.name] = a.params.size();
    Task& t = out.task;
    const std::size_t goal_count = out.assignable.size();
    const std::size_t n_agents = task.agents.size();
    const std::string agent_type = task.agent_type();

    // Fresh names for every symbol the compilation introduces.
    const std::string number = detail::fresh("number", [&](const std::string& n) { return t.types.contains(n); });
    std::set<std::string> object_names;
    for (const auto& o : t.objects)
        object_names.insert(o.name);
    for (const auto& c : t.constants)
        object_names.insert(c.name);
    std::string prefix = "n";
    for (int attempt = 0;; ++attempt) {
        bool clash = false;
        for (std::size_t k = 0; k <= goal_count + 1; ++k)
            clash = clash || object_names.count(prefix + std::to_string(k));
        if (!clash)
            break;
        prefix = "n" + std::string(static_cast<std::size_t>(attempt + 1), '_');
    }
    auto pred_taken = [&](const std::string& n) { return detail::has_predicate(t, n); };
    const std::string next = detail::fresh("next", pred_taken);
    const std::string end = detail::fresh("end", pred_taken);
    const std::string counter = detail::fresh("n_goal_achieved", pred_taken);
    const std::string function = detail::fresh(
        scheme == Scheme::GoalMaximin ? "min-associated-cost" : "spread-associated-cost",
        [&](const std::string& n) { return t.function(n) != nullptr; });

    t.types.declare(number);
    t.types.normalize();
    for (std::size_t k = 0; k <= goal_count + 1; ++k) {
        out.numbers.push_back(prefix + std::to_string(k));
        t.objects.push_back({out.numbers.back(), number});
    }

    const std::size_t before = t.predicates.size();
    t.predicates.push_back({next, {{"?n1", number}, {"?n2", number}}});
    t.predicates.push_back({end, {}});
    t.predicates.push_back({counter, {{"?a", agent_type}, {"?n", number}}});
    for (const auto& g : out.assignable)
        t.predicates.push_back({done_flag(g), {}});
    out.new_predicates = t.predicates.size() - before;
    if (options.reward_cost == RewardCost::NumericFunction)
        t.functions.push_back({function, {{"?n", number}}});

    const bool unit = !task.has_cost_model();
    for (std::size_t s = 0; s < t.actions.size(); ++s) {
        ActionSchema& schema = t.actions[s];
        if (unit)
            schema.cost = CostExpr{1, std::nullopt};
        std::vector<std::pair<Atom, Atom>> matches;  // (lifted add, goal)
        for (const auto& g : out.assignable)
            if (auto lifted = eff_pred_goal(task.actions[s], g, task))
                matches.push_back({*lifted, g});
        if (matches.empty())
            continue;
        auto param_taken = [&](const std::string& n) { return schema.param(n) != nullptr; };
        const std::string n1 = detail::fresh("?n1", param_taken);
        schema.params.push_back({n1, number});
        const std::string n2 = detail::fresh("?n2", param_taken);
        schema.params.push_back({n2, number});
        const std::string actor = schema.params.front().name;
        schema.precondition.push_back({Atom{counter, {actor, n1}}, false});
        schema.precondition.push_back({Atom{next, {n1, n2}}, false});
        for (const auto& [lifted, g] : matches) {
            pddl::ConditionalEffect ce;
            ce.condition = detail::equality_pins(lifted, g);
            ce.condition.push_back({Atom{done_flag(g), {}}, true});
            ce.effect.push_back({Atom{counter, {actor, n1}}, true});
            ce.effect.push_back({Atom{counter, {actor, n2}}, false});
            ce.effect.push_back({Atom{done_flag(g), {}}, false});
            schema.conditional.push_back(std::move(ce));
        }
        out.extended_schemas.push_back(schema.name);
    }

    std::set<Atom> assignable(out.assignable.begin(), out.assignable.end());
    for (const auto& p : restricted_partitions(goal_count, n_agents)) {
        ActionSchema r;
        r.name = kRewardPrefix + join(p);
        for (std::size_t i = 0; i < n_agents; ++i)
            r.params.push_back({"?a" + std::to_string(i), agent_type});
        for (const auto& g : out.assignable) {
            r.precondition.push_back({g, false});
            r.precondition.push_back({Atom{done_flag(g), {}}, false});
        }
        for (const auto& g : task.goal)
            if (!assignable.count(g))
                r.precondition.push_back({g, false});
        for (std::size_t i = 0; i < n_agents; ++i)
            for (std::size_t k = i + 1; k < n_agents; ++k)
                r.precondition.push_back({Atom{"=", {r.params[i].name, r.params[k].name}}, true});
        for (std::size_t i = 0; i < n_agents; ++i)
            r.precondition.push_back({Atom{counter, {r.params[i].name, out.numbers[p[i]]}}, false});
        r.effect.push_back({Atom{end, {}}, false});
        if (options.reward_cost == RewardCost::NumericFunction) {
            std::size_t key = scheme == Scheme::GoalMaximin ? p.front() : p.back() - p.front();
            r.cost = CostExpr{0, Atom{function, {out.numbers[key]}}};
        } else {
            r.cost = CostExpr{omega(scheme, p, goal_count, options.priority), std::nullopt};
        }
        out.partitions.push_back(p);
        out.reward_schemas.push_back(r.name);
        t.actions.push_back(std::move(r));
    }

    for (const auto& a : task.agents)
        t.init.push_back({counter, {a, out.numbers.front()}});
    for (std::size_t k = 1; k < out.numbers.size(); ++k)
        t.init.push_back({next, {out.numbers[k - 1], out.numbers[k]}});
    if (options.reward_cost == RewardCost::NumericFunction)
        for (std::size_t k = 0; k < out.numbers.size(); ++k) {
            std::int64_t v = scheme == Scheme::GoalMaximin
                                 ? std::max<std::int64_t>(0, static_cast<std::int64_t>(goal_count) -
                                                                 static_cast<std::int64_t>(k)) *
                                       options.priority
                                 : static_cast<std::int64_t>(k) * options.priority;
            t.numeric_init.push_back({Atom{function, {out.numbers[k]}}, v});
        }

    t.goal = {Atom{end, {}}};
    t.metric = pddl::Metric::MinimizeTotalCost;
    detail::add_requirements(t, {":typing", ":conditional-effects", ":equality", ":negative-preconditions",
                                 ":action-costs"});
    return out;
}

} // namespace fairplan::compile
