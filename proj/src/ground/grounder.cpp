#include "fairplan/ground/ground_task.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace fairplan::ground {

bool State::contains_all(const std::vector<FactId>& facts) const {
    return std::all_of(facts.begin(), facts.end(), [this](FactId f) { return test(f); });
}

bool State::contains_none(const std::vector<FactId>& facts) const {
    return std::none_of(facts.begin(), facts.end(), [this](FactId f) { return test(f); });
}

bool State::subset_of(const State& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
        if (words_[i] & ~other.words_[i])
            return false;
    return true;
}

std::size_t State::hash() const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto w : words_) {
        h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

std::string GroundAction::signature() const {
    std::string out = "(" + name;
    for (const auto& a : args)
        out += " " + a;
    return out + ")";
}

std::optional<FactId> GroundTask::find_fact(const Atom& atom) const {
    auto it = fact_index_.find(atom);
    if (it == fact_index_.end())
        return std::nullopt;
    return it->second;
}

FactId GroundTask::fact(const Atom& atom) const {
    auto f = find_fact(atom);
    if (!f)
        throw std::out_of_range("fact " + atom.str() + " is not in the task");
    return *f;
}

std::optional<std::size_t> GroundTask::find_action(const std::string& name,
                                                   const std::vector<std::string>& args) const {
    std::string key = name;
    for (const auto& a : args)
        key += " " + a;
    auto it = action_index_.find(key);
    if (it == action_index_.end())
        return std::nullopt;
    return it->second;
}

std::optional<std::size_t> GroundTask::agent_index(const std::string& agent) const {
    auto it = std::find(agents.begin(), agents.end(), agent);
    if (it == agents.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - agents.begin());
}

State GroundTask::initial_state() const {
    State s(facts.size());
    for (FactId f : init)
        s.set(f);
    return s;
}

bool GroundTask::is_goal(const State& s) const { return s.contains_all(goals); }

void GroundTask::reindex() {
    fact_index_.clear();
    for (FactId i = 0; i < facts.size(); ++i)
        fact_index_[facts[i]] = i;
    action_index_.clear();
    for (std::size_t i = 0; i < actions.size(); ++i) {
        std::string key = actions[i].name;
        for (const auto& a : actions[i].args)
            key += " " + a;
        action_index_.emplace(key, i);
    }
}

std::vector<std::string> static_predicates(const pddl::Task& task) {
    std::set<std::string> fluent;
    for (const auto& a : task.actions) {
        for (const auto& l : a.effect)
            fluent.insert(l.atom.predicate);
        for (const auto& c : a.conditional)
            for (const auto& l : c.effect)
                fluent.insert(l.atom.predicate);
    }
    std::vector<std::string> out;
    for (const auto& p : task.predicates)
        if (!fluent.count(p.name))
            out.push_back(p.name);
    return out;
}

namespace {

using pddl::Literal;

class Grounder {
public:
    Grounder(const pddl::Task& task, const GroundOptions& options) : task_(task), options_(options) {
        for (const auto& p : static_predicates(task))
            static_.insert(p);
        init_.insert(task.init.begin(), task.init.end());
        for (const auto& n : task.numeric_init)
            numeric_[n.term] = n.value;
        unit_costs_ = !task.has_cost_model();
    }

    GroundTask run() {
        for (const auto& a : task_.init)
            intern(a);
        for (const auto& g : task_.goal)
            intern(g);
        for (std::size_t s = 0; s < task_.actions.size(); ++s)
            ground_schema(s);
        return finish();
    }

private:
    FactId intern(const Atom& atom) {
        auto [it, inserted] = ids_.emplace(atom, static_cast<FactId>(ids_.size()));
        return it->second;
    }

    bool is_static(const Atom& a) const { return options_.prune_static && static_.count(a.predicate); }

    Atom substitute(const Atom& atom, const std::unordered_map<std::string, std::string>& binding) const {
        Atom out{atom.predicate, {}};
        out.args.reserve(atom.args.size());
        for (const auto& t : atom.args) {
            if (pddl::is_variable(t))
                out.args.push_back(binding.at(t));
            else
                out.args.push_back(t);
        }
        return out;
    }

    // For equality and static literals: is it satisfied under the binding?
    bool holds_statically(const Literal& l, const std::unordered_map<std::string, std::string>& binding) const {
        Atom g = substitute(l.atom, binding);
        bool truth = g.is_equality() ? g.args[0] == g.args[1] : init_.count(g) != 0;
        return truth != l.negated;
    }

    bool resolvable(const Literal& l) const { return l.atom.is_equality() || is_static(l.atom); }

    void ground_schema(std::size_t index) {
        const pddl::ActionSchema& schema = task_.actions[index];
        const std::size_t k = schema.params.size();
        std::unordered_map<std::string, std::size_t> position;
        for (std::size_t i = 0; i < k; ++i)
            position[schema.params[i].name] = i;

        std::vector<std::vector<std::string>> candidates(k);
        for (std::size_t i = 0; i < k; ++i) {
            candidates[i] = task_.objects_of(schema.params[i].type);
            if (candidates[i].empty())
                return;
        }

        // Checks become decidable once their last variable is bound.
        std::vector<std::vector<const Literal*>> checks(k + 1);
        for (const auto& l : schema.precondition) {
            if (!resolvable(l))
                continue;
            std::size_t level = 0;
            for (const auto& t : l.atom.args)
                if (pddl::is_variable(t))
                    level = std::max(level, position.at(t) + 1);
            checks[level].push_back(&l);
        }

        std::unordered_map<std::string, std::string> binding;
        for (const Literal* l : checks[0])
            if (!holds_statically(*l, binding))
                return;

        std::vector<std::string> args(k);
        std::function<void(std::size_t)> bind = [&](std::size_t depth) {
            if (depth == k) {
                emit(index, args, binding);
                return;
            }
            for (const auto& obj : candidates[depth]) {
                binding[schema.params[depth].name] = obj;
                args[depth] = obj;
                bool ok = true;
                for (const Literal* l : checks[depth + 1])
                    if (!holds_statically(*l, binding)) {
                        ok = false;
                        break;
                    }
                if (ok)
                    bind(depth + 1);
            }
            binding.erase(schema.params[depth].name);
        };
        bind(0);
    }

    void emit(std::size_t index, const std::vector<std::string>& args,
              const std::unordered_map<std::string, std::string>& binding) {
        const pddl::ActionSchema& schema = task_.actions[index];
        GroundAction a;
        a.name = schema.name;
        a.args = args;
        a.schema = index;
        if (!args.empty()) {
            auto it = std::find(task_.agents.begin(), task_.agents.end(), args.front());
            if (it != task_.agents.end())
                a.agent = static_cast<std::size_t>(it - task_.agents.begin());
        }
        for (const auto& l : schema.precondition) {
            if (resolvable(l))
                continue;
            FactId f = intern(substitute(l.atom, binding));
            (l.negated ? a.negated_pre : a.pre).push_back(f);
        }
        for (const auto& l : schema.effect) {
            FactId f = intern(substitute(l.atom, binding));
            (l.negated ? a.del : a.add).push_back(f);
        }
        for (const auto& ce : schema.conditional) {
            GroundConditionalEffect g;
            bool possible = true;
            for (const auto& l : ce.condition) {
                if (resolvable(l)) {
                    if (!holds_statically(l, binding)) {
                        possible = false;
                        break;
                    }
                    continue;
                }
                FactId f = intern(substitute(l.atom, binding));
                (l.negated ? g.negated_condition : g.condition).push_back(f);
            }
            if (!possible)
                continue;
            for (const auto& l : ce.effect) {
                FactId f = intern(substitute(l.atom, binding));
                (l.negated ? g.del : g.add).push_back(f);
            }
            if (g.condition.empty() && g.negated_condition.empty()) {
                a.add.insert(a.add.end(), g.add.begin(), g.add.end());
                a.del.insert(a.del.end(), g.del.begin(), g.del.end());
            } else {
                a.conditional.push_back(std::move(g));
            }
        }
        if (schema.cost) {
            if (schema.cost->function) {
                Atom term = substitute(*schema.cost->function, binding);
                auto it = numeric_.find(term);
                if (it == numeric_.end())
                    throw std::invalid_argument("no value for cost term " + term.str() + " of " + a.signature());
                a.cost = it->second;
            } else {
                a.cost = schema.cost->constant;
            }
        } else {
            a.cost = unit_costs_ ? 1 : 0;
        }
        actions_.push_back(std::move(a));
    }

    GroundTask finish() {
        GroundTask out;
        std::vector<FactId> remap(ids_.size());
        out.facts.reserve(ids_.size());
        for (const auto& [atom, id] : ids_) {
            remap[id] = static_cast<FactId>(out.facts.size());
            out.facts.push_back(atom);
        }
        auto fix = [&](std::vector<FactId>& v) {
            for (auto& f : v)
                f = remap[f];
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        for (auto& a : actions_) {
            fix(a.pre);
            fix(a.negated_pre);
            fix(a.add);
            fix(a.del);
            for (auto& c : a.conditional) {
                fix(c.condition);
                fix(c.negated_condition);
                fix(c.add);
                fix(c.del);
            }
        }
        out.actions = std::move(actions_);
        for (const auto& a : task_.init)
            out.init.push_back(remap[ids_.at(a)]);
        std::sort(out.init.begin(), out.init.end());
        out.init.erase(std::unique(out.init.begin(), out.init.end()), out.init.end());
        for (const auto& g : task_.goal) {
            FactId f = remap[ids_.at(g)];
            if (std::find(out.goals.begin(), out.goals.end(), f) == out.goals.end())
                out.goals.push_back(f);
        }
        for (const auto& schema : task_.actions)
            out.schema_arity[schema.name] = schema.params.size();
        out.agents = task_.agents;
        out.metric = task_.metric;
        out.reindex();
        return out;
    }

    const pddl::Task& task_;
    GroundOptions options_;
    std::set<std::string> static_;
    std::set<Atom> init_;
    std::map<Atom, std::int64_t> numeric_;
    bool unit_costs_ = true;
    std::map<Atom, FactId> ids_;
    std::vector<GroundAction> actions_;
};

} // namespace

GroundTask ground(const pddl::Task& task, const GroundOptions& options) { return Grounder(task, options).run(); }

bool applicable(const State& s, const GroundAction& a) {
    return s.contains_all(a.pre) && s.contains_none(a.negated_pre);
}

State apply(const State& s, const GroundAction& a, std::vector<std::size_t>& fired) {
    fired.clear();
    if (!applicable(s, a))
        return s;
    State next = s;
    for (FactId f : a.del)
        next.reset(f);
    for (std::size_t i = 0; i < a.conditional.size(); ++i) {
        const auto& c = a.conditional[i];
        if (s.contains_all(c.condition) && s.contains_none(c.negated_condition)) {
            fired.push_back(i);
            for (FactId f : c.del)
                next.reset(f);
        }
    }
    for (FactId f : a.add)
        next.set(f);
    for (std::size_t i : fired)
        for (FactId f : a.conditional[i].add)
            next.set(f);
    return next;
}

State apply(const State& s, const GroundAction& a) {
    std::vector<std::size_t> fired;
    return apply(s, a, fired);
}

} // namespace fairplan::ground
