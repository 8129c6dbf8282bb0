#include "doctest.h"
#include "support.hpp"

#include "fairplan/ground/ground_task.hpp"
#include "fairplan/ground/plan.hpp"

#include <set>

namespace pddl = fairplan::pddl;
using namespace fairplan::ground;
using pddl::Atom;
using testing::driverlog;
using testing::fixture;

namespace {

std::set<std::string> signatures(const GroundTask& g) {
    std::set<std::string> out;
    for (const auto& a : g.actions)
        out.insert(a.signature());
    return out;
}

std::size_t count_schema(const GroundTask& g, const std::string& name) {
    std::size_t n = 0;
    for (const auto& a : g.actions)
        n += a.name == name;
    return n;
}

} // namespace

TEST_CASE("drive-truck grounding matches exhaustive enumeration") {
    pddl::Task t = driverlog();
    // oracle: every driver, location pair, truck; keep pairs linked in I
    std::set<Atom> init(t.init.begin(), t.init.end());
    std::size_t expected = 0;
    for (const auto& d : t.objects_of("driver"))
        for (const auto& from : t.objects_of("location"))
            for (const auto& to : t.objects_of("location"))
                for (const auto& tr : t.objects_of("truck"))
                    expected += init.count(Atom{"link", {from, to}}) ? 1 : 0;
    GroundTask g = ground(t);
    CHECK(expected == 36);
    CHECK(count_schema(g, "drive-truck") == expected);
}

TEST_CASE("pruned grounding equals unpruned grounding filtered by static preconditions") {
    for (const char* which : {"original", "labeled", "fair"}) {
        CAPTURE(which);
        pddl::Task t = driverlog(which);
        GroundTask pruned = ground(t);
        GroundTask raw = ground(t, {.prune_static = false});
        auto statics = static_predicates(t);
        std::set<std::string> st(statics.begin(), statics.end());
        auto init = raw.initial_state();
        std::set<std::string> filtered;
        for (const auto& a : raw.actions) {
            bool ok = true;
            for (FactId f : a.pre)
                if (st.count(raw.facts[f].predicate) && !init.test(f))
                    ok = false;
            for (FactId f : a.negated_pre)
                if (st.count(raw.facts[f].predicate) && init.test(f))
                    ok = false;
            if (ok)
                filtered.insert(a.signature());
        }
        CHECK(signatures(pruned) == filtered);
    }
}

TEST_CASE("parameter type without objects yields no ground actions") {
    pddl::Task d = pddl::parse_domain(R"(
(define (domain e) (:requirements :typing) (:types ghost room)
  (:predicates (at ?g - ghost ?r - room))
  (:action haunt :parameters (?g - ghost ?r - room) :precondition (at ?g ?r) :effect (not (at ?g ?r)))))");
    pddl::Task t = pddl::parse_problem("(define (problem e1) (:domain e) (:objects r - room) (:init) (:goal (and)))", d);
    CHECK(ground(t).actions.empty());
}

TEST_CASE("equality pins resolve at ground time") {
    GroundTask g = ground(driverlog("fair"));
    const FactId flag = g.fact(Atom{"atpackage1-s1-done", {}});
    std::size_t with_pkg1_effect = 0;
    for (const auto& a : g.actions) {
        if (a.name != "unload-truck")
            continue;
        bool has = false;
        for (const auto& c : a.conditional)
            has = has || std::find(c.add.begin(), c.add.end(), flag) != c.add.end();
        bool pinned = a.args[2] == "package1" && a.args[3] == "s1";
        CHECK(has == pinned);
        with_pkg1_effect += has;
        for (const auto& c : a.conditional)
            for (FactId f : c.condition)
                CHECK(g.facts[f].predicate != "=");
        CHECK(a.conditional.size() <= 1);
    }
    CHECK(with_pkg1_effect > 0);
}

TEST_CASE("apply semantics") {
    GroundTask g = ground(driverlog());
    State s = g.initial_state();
    SUBCASE("inapplicable action leaves the state unchanged") {
        auto idx = g.find_action("load-truck", {"driver1", "truck1", "package4", "s1"});
        REQUIRE(idx);
        CHECK(!applicable(s, g.actions[*idx]));
        CHECK(apply(s, g.actions[*idx]) == s);
    }
    SUBCASE("empty effect action") {
        GroundAction noop;
        CHECK(apply(s, noop) == s);
    }
    SUBCASE("delete before add") {
        GroundAction a;
        FactId f = g.init.front();
        a.add = {f};
        a.del = {f};
        CHECK(apply(s, a).test(f));
    }
}

TEST_CASE("compiled unload-truck fires the counting conditional") {
    pddl::Task t = driverlog("fair");
    GroundTask g = ground(t);
    auto idx = g.find_action("unload-truck", {"driver1", "truck1", "package1", "s1", "n0", "n1"});
    REQUIRE(idx);
    std::vector<Atom> facts = {{"at", {"truck1", "s1"}},
                               {"in", {"package1", "truck1"}},
                               {"driving", {"driver1", "truck1"}},
                               {"n_goal_achieved", {"driver1", "n0"}},
                               {"next", {"n0", "n1"}}};
    State s(g.facts.size());
    for (const auto& a : facts)
        s.set(g.fact(a));
    std::vector<std::size_t> fired;
    State next = apply(s, g.actions[*idx], fired);
    CHECK(fired.size() == 1);
    CHECK(next.test(g.fact({"atpackage1-s1-done", {}})));
    CHECK(next.test(g.fact({"n_goal_achieved", {"driver1", "n1"}})));
    CHECK(!next.test(g.fact({"n_goal_achieved", {"driver1", "n0"}})));
    CHECK(next.test(g.fact({"at", {"package1", "s1"}})));
    CHECK(!next.test(g.fact({"in", {"package1", "truck1"}})));

    // once the flag is set, a second unload does not count again
    State again = s;
    again.set(g.fact({"atpackage1-s1-done", {}}));
    State after = apply(again, g.actions[*idx], fired);
    CHECK(fired.empty());
    CHECK(after.test(g.fact({"n_goal_achieved", {"driver1", "n0"}})));
}

TEST_CASE("plan files") {
    pddl::Task t = driverlog();
    GroundTask g = ground(t);
    SUBCASE("nine step prefix with cost trailer") {
        Plan p = parse_plan(pddl::read_file(fixture("driverlog/plan-prefix9.plan")), g);
        CHECK(p.actions.size() == 9);
        REQUIRE(p.reported_cost);
        CHECK(*p.reported_cost == 9);
        PlanTrace tr = execute(g, p);
        CHECK(!tr.valid);
        CHECK(!tr.failed_step);  // every step applies, the goal is just not reached yet
        CHECK(tr.states.size() == 10);
    }
    SUBCASE("full plan validates and agrees with the reference executor") {
        std::string text = pddl::read_file(fixture("driverlog/plan-full.plan"));
        Plan p = parse_plan(text, g);
        PlanTrace tr = execute(g, p);
        CHECK(tr.valid);
        auto ref = testing::naive_execute(t, parse_plan_steps(text));
        CHECK(ref.valid);
        CHECK(tr.cost == ref.cost);
        CHECK(tr.cost == 13);
        std::set<Atom> final_atoms;
        for (FactId f = 0; f < g.facts.size(); ++f)
            if (tr.final_state().test(f))
                final_atoms.insert(g.facts[f]);
        CHECK(final_atoms == ref.final_state);
        // round trip through the printer
        CHECK(parse_plan(format_plan(p, g), g).actions == p.actions);
    }
    SUBCASE("walk lookup") {
        Plan p = parse_plan("(walk driver1 s1 p1-2)\n", g);
        REQUIRE(p.actions.size() == 1);
        CHECK(g.actions[p.actions[0]].signature() == "(walk driver1 s1 p1-2)");
    }
    SUBCASE("errors") {
        CHECK_THROWS_WITH_AS(parse_plan("(walk driver9 s1 p1-2)", g), doctest::Contains("unknown ground action"),
                             PlanError);
        CHECK_THROWS_WITH_AS(parse_plan("(walk driver1 s1)", g), doctest::Contains("arity mismatch"), PlanError);
        CHECK_THROWS_WITH_AS(parse_plan("(fly driver1)", g), doctest::Contains("unknown action"), PlanError);
    }
}

TEST_CASE("execute") {
    pddl::Task t = driverlog();
    GroundTask g = ground(t);
    SUBCASE("inapplicable step is reported") {
        Plan p = parse_plan("(board-truck driver1 truck1 s1)\n(load-truck driver2 truck1 package4 s1)\n", g);
        PlanTrace tr = execute(g, p);
        CHECK(!tr.valid);
        REQUIRE(tr.failed_step);
        CHECK(*tr.failed_step == 1);
        CHECK(tr.missing == std::vector<FactId>{g.fact({"driving", {"driver2", "truck1"}})});
    }
    SUBCASE("empty plan on a satisfied goal") {
        GroundTask sat = g;
        sat.goals = {sat.init.front()};
        PlanTrace tr = execute(sat, Plan{});
        CHECK(tr.valid);
        CHECK(tr.cost == 0);
    }
    SUBCASE("deterministic") {
        Plan p = parse_plan(pddl::read_file(fixture("driverlog/plan-full.plan")), g);
        PlanTrace a = execute(g, p), b = execute(g, p);
        CHECK(a.states == b.states);
        CHECK(a.fired == b.fired);
    }
}

TEST_CASE("delete-free actions are monotone") {
    GroundTask g = ground(driverlog());
    State s = g.initial_state();
    for (auto a : g.actions) {
        a.del.clear();
        for (auto& c : a.conditional)
            c.del.clear();
        CHECK(s.subset_of(apply(s, a)));
    }
}
