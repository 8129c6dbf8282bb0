#pragma once

#include "fairplan/pddl/parser.hpp"

#include <algorithm>
#include <string>

namespace testing {

inline std::string fixture(const std::string& rel) { return std::string(FAIRPLAN_FIXTURES) + "/" + rel; }

inline fairplan::pddl::Task driverlog(const std::string& which = "original") {
    using namespace fairplan::pddl;
    Task dom = parse_domain(read_file(fixture("driverlog/" + which + "-domain.pddl")));
    Task t = parse_problem(read_file(fixture("driverlog/" + which + "-problem.pddl")), dom);
    set_agents(t, {"driver1", "driver2", "driver3"});
    return t;
}

} // namespace testing

#include "fairplan/ground/plan.hpp"

#include <map>
#include <optional>
#include <set>

namespace testing {

// Reference executor over the lifted task: substitutes schema parameters
// directly and keeps states as atom sets. Independent of the grounder.
struct NaiveRun {
    bool valid = false;
    std::set<fairplan::pddl::Atom> final_state;
    std::int64_t cost = 0;
    std::size_t steps = 0;  // applicable steps executed
};

inline NaiveRun naive_execute(const fairplan::pddl::Task& t, const std::vector<fairplan::ground::PlanStep>& plan) {
    using namespace fairplan::pddl;
    std::set<Atom> s(t.init.begin(), t.init.end());
    std::map<Atom, std::int64_t> numbers;
    for (const auto& n : t.numeric_init)
        numbers[n.term] = n.value;
    const bool unit = !t.has_cost_model();
    NaiveRun run;
    for (const auto& step : plan) {
        const ActionSchema* a = t.action(step.name);
        if (!a || a->params.size() != step.args.size())
            return run;
        std::map<std::string, std::string> sub;
        for (std::size_t i = 0; i < a->params.size(); ++i)
            sub[a->params[i].name] = step.args[i];
        auto inst = [&](const Atom& x) {
            Atom g{x.predicate, {}};
            for (const auto& arg : x.args)
                g.args.push_back(is_variable(arg) ? sub.at(arg) : arg);
            return g;
        };
        auto holds = [&](const Literal& l, const std::set<Atom>& st) {
            Atom g = inst(l.atom);
            bool v = g.is_equality() ? g.args[0] == g.args[1] : st.count(g) > 0;
            return v != l.negated;
        };
        for (const auto& l : a->precondition)
            if (!holds(l, s))
                return run;
        std::vector<Atom> add, del;
        for (const auto& l : a->effect)
            (l.negated ? del : add).push_back(inst(l.atom));
        for (const auto& c : a->conditional) {
            bool fire = true;
            for (const auto& l : c.condition)
                fire = fire && holds(l, s);
            if (fire)
                for (const auto& l : c.effect)
                    (l.negated ? del : add).push_back(inst(l.atom));
        }
        for (const auto& d : del)
            s.erase(d);
        for (const auto& x : add)
            s.insert(x);
        if (a->cost)
            run.cost += a->cost->function ? numbers.at(inst(*a->cost->function)) : a->cost->constant;
        else if (unit)
            run.cost += 1;
        ++run.steps;
    }
    run.valid = std::all_of(t.goal.begin(), t.goal.end(), [&](const Atom& g) { return s.count(g) > 0; });
    run.final_state = std::move(s);
    return run;
}

} // namespace testing
