#include "fairplan/compile/compile.hpp"
#include "compile_util.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace fairplan::compile {

using pddl::ActionSchema;
using pddl::Literal;
using pddl::Predicate;
using pddl::TypedName;

std::vector<Atom> assignable_goals(const Task& task) {
    std::set<Atom> init(task.init.begin(), task.init.end());
    std::vector<Atom> out;
    for (const auto& g : task.goal)
        if (!init.count(g) && std::find(out.begin(), out.end(), g) == out.end())
            out.push_back(g);
    return out;
}

std::optional<Atom> eff_pred_goal(const ActionSchema& schema, const Atom& goal, const Task& task) {
    if (schema.params.empty() || task.agents.empty())
        return std::nullopt;
    const std::string agent_type = task.agent_type();
    const TypedName& actor = schema.params.front();
    if (!task.types.is_subtype(actor.type, agent_type))
        return std::nullopt;
    for (const auto& lit : schema.effect) {
        if (lit.negated || lit.atom.predicate != goal.predicate || lit.atom.args.size() != goal.args.size())
            continue;
        std::map<std::string, std::string> binding;
        bool ok = true;
        for (std::size_t i = 0; ok && i < goal.args.size(); ++i) {
            const std::string& term = lit.atom.args[i];
            const std::string& obj = goal.args[i];
            if (!pddl::is_variable(term)) {
                ok = term == obj;
                continue;
            }
            const TypedName* p = schema.param(term);
            auto obj_type = task.object_type(obj);
            if (!p || term == actor.name || task.types.is_subtype(p->type, agent_type) || !obj_type ||
                !task.types.is_subtype(*obj_type, p->type)) {
                ok = false;
                continue;
            }
            auto [it, fresh] = binding.emplace(term, obj);
            ok = fresh || it->second == obj;
        }
        if (ok)
            return lit.atom;
    }
    return std::nullopt;
}

std::string done_flag(const Atom& goal) {
    std::string out = goal.predicate;
    for (std::size_t i = 0; i < goal.args.size(); ++i)
        out += (i == 0 ? "" : "-") + goal.args[i];
    return out + "-done";
}

std::string labeled_symbol(const std::string& predicate) { return predicate + "ab"; }

bool Compilation::is_reward(const std::string& schema) const {
    return std::find(reward_schemas.begin(), reward_schemas.end(), schema) != reward_schemas.end();
}

namespace detail {

std::string fresh(const std::string& base, const std::function<bool(const std::string&)>& taken) {
    if (!taken(base))
        return base;
    for (int i = 1;; ++i) {
        std::string candidate = base + "-" + std::to_string(i);
        if (!taken(candidate))
            return candidate;
    }
}

std::vector<Literal> equality_pins(const Atom& lifted, const Atom& goal) {
    std::vector<Literal> pins;
    for (std::size_t i = 0; i < lifted.args.size(); ++i) {
        if (!pddl::is_variable(lifted.args[i]))
            continue;
        Literal pin{Atom{"=", {lifted.args[i], goal.args[i]}}, false};
        if (std::find(pins.begin(), pins.end(), pin) == pins.end())
            pins.push_back(pin);
    }
    return pins;
}

void add_requirements(Task& task, const std::vector<std::string>& flags) {
    for (const auto& f : flags)
        if (std::find(task.requirements.begin(), task.requirements.end(), f) == task.requirements.end())
            task.requirements.push_back(f);
}

bool has_predicate(const Task& t, const std::string& name) { return t.predicate(name) != nullptr; }

} // namespace detail

Compilation compile_labeled(const Task& task, const assign::GoalAssignment& assignment) {
    if (task.agents.empty())
        throw std::invalid_argument("labeled compilation needs at least one agent");
    Compilation out;
    out.task = task;
    out.assignable = assignable_goals(task);
    for (const auto& a : task.actions)
        out.source_arity[a.name] = a.params.size();

    std::map<std::string, std::string> agent_of;
    for (std::size_t i = 0; i < assignment.goals.size(); ++i) {
        const std::string& g = assignment.goals[i];
        bool assignable = std::any_of(out.assignable.begin(), out.assignable.end(),
                                      [&](const Atom& a) { return a.str() == g; });
        if (!assignable)
            throw std::invalid_argument("assignment references non-assignable goal " + g);
        agent_of[g] = assignment.agents.at(assignment.agent_of.at(i));
    }
    for (const auto& g : out.assignable)
        if (!agent_of.count(g.str()))
            throw std::invalid_argument("assignment does not cover goal " + g.str());

    Task& t = out.task;
    const std::string agent_type = task.agent_type();
    const std::size_t before = t.predicates.size();

    // labeled predicate per goal symbol, agent appended
    std::map<std::string, std::string> ab_name;
    for (const auto& g : out.assignable) {
        if (ab_name.count(g.predicate))
            continue;
        const Predicate* base = task.predicate(g.predicate);
        if (!base)
            throw std::invalid_argument("goal predicate " + g.predicate + " is not declared");
        Predicate ab{detail::fresh(labeled_symbol(g.predicate), [&](const std::string& n) {
                         return detail::has_predicate(t, n);
                     }),
                     base->params};
        std::string var = detail::fresh("?a", [&](const std::string& n) {
            return std::any_of(ab.params.begin(), ab.params.end(), [&](const TypedName& p) { return p.name == n; });
        });
        ab.params.push_back({var, agent_type});
        ab_name[g.predicate] = ab.name;
        t.predicates.push_back(std::move(ab));
    }
    for (const auto& g : out.assignable)
        t.predicates.push_back({done_flag(g), {}});
    out.new_predicates = t.predicates.size() - before;

    std::vector<bool> achieved(out.assignable.size(), false);
    for (std::size_t s = 0; s < t.actions.size(); ++s) {
        ActionSchema& schema = t.actions[s];
        bool extended = false;
        for (std::size_t i = 0; i < out.assignable.size(); ++i) {
            const Atom& g = out.assignable[i];
            auto lifted = eff_pred_goal(task.actions[s], g, task);
            if (!lifted)
                continue;
            pddl::ConditionalEffect ce;
            ce.condition = detail::equality_pins(*lifted, g);
            ce.condition.push_back({Atom{done_flag(g), {}}, true});
            Atom labeled{ab_name.at(g.predicate), lifted->args};
            labeled.args.push_back(schema.params.front().name);
            ce.effect.push_back({labeled, false});
            ce.effect.push_back({Atom{done_flag(g), {}}, false});
            schema.conditional.push_back(std::move(ce));
            achieved[i] = true;
            extended = true;
        }
        if (extended)
            out.extended_schemas.push_back(schema.name);
    }
    for (std::size_t i = 0; i < out.assignable.size(); ++i)
        if (!achieved[i])
            throw std::invalid_argument("no action schema achieves goal " + out.assignable[i].str());

    std::vector<Atom> goals;
    for (const auto& g : out.assignable) {
        Atom labeled{ab_name.at(g.predicate), g.args};
        labeled.args.push_back(agent_of.at(g.str()));
        goals.push_back(std::move(labeled));
    }
    goals.insert(goals.end(), task.goal.begin(), task.goal.end());
    t.goal = std::move(goals);
    t.metric = pddl::Metric::None;
    if (!out.assignable.empty())
        detail::add_requirements(t, {":conditional-effects", ":equality", ":negative-preconditions"});
    return out;
}

std::vector<ground::PlanStep> project_plan(const Compilation& c, const std::vector<ground::PlanStep>& steps) {
    std::vector<ground::PlanStep> out;
    for (const auto& step : steps) {
        if (c.is_reward(step.name))
            continue;
        ground::PlanStep p = step;
        auto it = c.source_arity.find(step.name);
        if (it != c.source_arity.end() && p.args.size() > it->second)
            p.args.resize(it->second);
        out.push_back(std::move(p));
    }
    return out;
}

std::optional<std::vector<std::size_t>> rewarded_partition(const Compilation& c,
                                                           const std::vector<ground::PlanStep>& steps) {
    for (const auto& step : steps)
        for (std::size_t i = 0; i < c.reward_schemas.size(); ++i)
            if (c.reward_schemas[i] == step.name)
                return c.partitions[i];
    return std::nullopt;
}

} // namespace fairplan::compile
