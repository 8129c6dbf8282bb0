#include "fairplan/pddl/task.hpp"

#include <algorithm>
#include <stdexcept>

namespace fairplan::pddl {

std::string Atom::str() const {
    std::string out = "(" + predicate;
    for (const auto& a : args)
        out += " " + a;
    return out + ")";
}

std::vector<Atom> ActionSchema::adds() const {
    std::vector<Atom> out;
    for (const auto& l : effect)
        if (!l.negated)
            out.push_back(l.atom);
    return out;
}

std::vector<Atom> ActionSchema::deletes() const {
    std::vector<Atom> out;
    for (const auto& l : effect)
        if (l.negated)
            out.push_back(l.atom);
    return out;
}

const TypedName* ActionSchema::param(const std::string& var) const {
    for (const auto& p : params)
        if (p.name == var)
            return &p;
    return nullptr;
}

const Predicate* Task::predicate(const std::string& name) const {
    for (const auto& p : predicates)
        if (p.name == name)
            return &p;
    return nullptr;
}

const ActionSchema* Task::action(const std::string& name) const {
    for (const auto& a : actions)
        if (a.name == name)
            return &a;
    return nullptr;
}

const FunctionDecl* Task::function(const std::string& name) const {
    for (const auto& f : functions)
        if (f.name == name)
            return &f;
    return nullptr;
}

std::optional<std::string> Task::object_type(const std::string& name) const {
    for (const auto& o : objects)
        if (o.name == name)
            return o.type;
    for (const auto& c : constants)
        if (c.name == name)
            return c.type;
    return std::nullopt;
}

std::vector<std::string> Task::objects_of(const std::string& type) const {
    std::vector<std::string> out;
    for (const auto& c : constants)
        if (types.is_subtype(c.type, type))
            out.push_back(c.name);
    for (const auto& o : objects)
        if (types.is_subtype(o.type, type) && std::find(out.begin(), out.end(), o.name) == out.end())
            out.push_back(o.name);
    return out;
}

bool Task::is_agent(const std::string& object) const {
    return std::find(agents.begin(), agents.end(), object) != agents.end();
}

bool Task::has_cost_model() const {
    return std::any_of(actions.begin(), actions.end(), [](const ActionSchema& a) { return a.cost.has_value(); });
}

std::string Task::agent_type() const {
    std::vector<std::string> ts;
    for (const auto& a : agents)
        if (auto t = object_type(a))
            ts.push_back(*t);
    return types.common_ancestor(ts);
}

namespace {

template <typename T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

} // namespace

Task canonical(const Task& task) {
    Task t = task;
    sort_unique(t.requirements);
    sort_unique(t.predicates);
    sort_unique(t.functions);
    sort_unique(t.constants);
    for (auto& a : t.actions) {
        sort_unique(a.precondition);
        sort_unique(a.effect);
        for (auto& c : a.conditional) {
            sort_unique(c.condition);
            sort_unique(c.effect);
        }
        sort_unique(a.conditional);
    }
    std::sort(t.actions.begin(), t.actions.end(),
              [](const ActionSchema& x, const ActionSchema& y) { return x.name < y.name; });
    sort_unique(t.objects);
    sort_unique(t.init);
    sort_unique(t.numeric_init);
    sort_unique(t.goal);
    sort_unique(t.agents);
    return t;
}

bool semantically_equal(const Task& a, const Task& b) {
    const Task x = canonical(a);
    const Task y = canonical(b);
    return x.domain_name == y.domain_name && x.problem_name == y.problem_name &&
           x.requirements == y.requirements && x.types == y.types && x.predicates == y.predicates &&
           x.functions == y.functions && x.constants == y.constants && x.actions == y.actions &&
           x.objects == y.objects && x.init == y.init && x.numeric_init == y.numeric_init &&
           x.goal == y.goal && x.metric == y.metric && x.agents == y.agents;
}

} // namespace fairplan::pddl
