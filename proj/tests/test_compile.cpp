#include "doctest.h"
#include "support.hpp"

#include "fairplan/compile/compile.hpp"
#include "fairplan/ground/ground_task.hpp"
#include "fairplan/pddl/printer.hpp"

#include <set>

namespace pddl = fairplan::pddl;
using namespace fairplan::compile;
using fairplan::assign::GoalAssignment;
using fairplan::assign::Scheme;
using fairplan::ground::parse_plan_steps;
using testing::driverlog;
using testing::fixture;

namespace {

GoalAssignment appendix_assignment() {
    GoalAssignment a;
    a.agents = {"driver1", "driver2", "driver3"};
    a.goals = {"(at package1 s1)", "(at package4 s0)", "(at package3 s2)", "(at truck2 s2)"};
    a.agent_of = {0, 1, 2, 2};
    return a;
}

pddl::ActionSchema sorted(pddl::ActionSchema s) {
    pddl::Task t;
    t.actions = {std::move(s)};
    return pddl::canonical(t).actions.front();
}

std::set<pddl::Atom> as_set(const std::vector<pddl::Atom>& v) { return {v.begin(), v.end()}; }

Task reparse(const Task& t) {
    auto text = pddl::emit_pddl(t);
    Task back = pddl::parse_problem(text.problem, pddl::parse_domain(text.domain));
    back.agents = t.agents;
    return back;
}

} // namespace

TEST_CASE("restricted partitions") {
    using P = std::vector<std::vector<std::size_t>>;
    CHECK(restricted_partitions(4, 2) == P{{0, 4}, {1, 3}, {2, 2}});
    CHECK(restricted_partitions(4, 3) == P{{0, 0, 4}, {0, 1, 3}, {0, 2, 2}, {1, 1, 2}});
    CHECK(restricted_partitions(6, 1) == P{{6}});
    CHECK(restricted_partitions(0, 3) == P{{0, 0, 0}});
    // oracle: count by brute force over all compositions
    for (std::size_t g = 0; g <= 8; ++g)
        for (std::size_t n = 1; n <= 4; ++n) {
            std::set<std::vector<std::size_t>> seen;
            std::vector<std::size_t> cur(n, 0);
            std::function<void(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t left) {
                if (i + 1 == n) {
                    cur[i] = left;
                    auto s = cur;
                    std::sort(s.begin(), s.end());
                    seen.insert(s);
                    return;
                }
                for (std::size_t v = 0; v <= left; ++v) {
                    cur[i] = v;
                    go(i + 1, left - v);
                }
            };
            go(0, g);
            auto parts = restricted_partitions(g, n);
            CHECK(std::set<std::vector<std::size_t>>(parts.begin(), parts.end()) == seen);
            CHECK(parts.size() == seen.size());
        }
    CHECK_THROWS(restricted_partitions(3, 0));
}

TEST_CASE("omega") {
    CHECK(omega(Scheme::GoalMaximin, {2, 2}, 4, 1000) == 2000);
    CHECK(omega(Scheme::GoalPropEq, {3, 3, 3}, 9, 1000) == 0);
    CHECK(omega(Scheme::GoalMaximin, {0, 0, 4}, 4, 1000) == 4000);
    CHECK(omega(Scheme::GoalMaximin, {1, 1, 2}, 4, 1000) == 3000);
    CHECK(omega(Scheme::GoalPropEq, {0, 1, 3}, 4, 1000) == 3000);
    CHECK_THROWS_AS(omega(Scheme::WorkloadMaximin, {1, 1}, 2, 1000), std::invalid_argument);
    // higher minimum, lower cost
    auto parts = restricted_partitions(7, 3);
    for (const auto& a : parts)
        for (const auto& b : parts)
            if (a.front() < b.front())
                CHECK(omega(Scheme::GoalMaximin, a, 7, 10) > omega(Scheme::GoalMaximin, b, 7, 10));
}

TEST_CASE("eff_pred_goal") {
    Task t = driverlog();
    pddl::Atom pkg{"at", {"package1", "s1"}};
    auto m = eff_pred_goal(*t.action("unload-truck"), pkg, t);
    REQUIRE(m);
    CHECK(*m == pddl::Atom{"at", {"?obj", "?loc"}});
    CHECK(!eff_pred_goal(*t.action("board-truck"), pkg, t));
    CHECK(!eff_pred_goal(*t.action("drive-truck"), pkg, t));  // ?truck cannot hold a package
    CHECK(eff_pred_goal(*t.action("drive-truck"), pddl::Atom{"at", {"truck2", "s2"}}, t));
    // walk's add binds the driver itself
    CHECK(!eff_pred_goal(*t.action("walk"), pddl::Atom{"at", {"driver1", "s2"}}, t));
    CHECK(done_flag(pkg) == "atpackage1-s1-done");
}

TEST_CASE("labeled compilation reproduces the appendix") {
    Task orig = driverlog();
    Task appendix = driverlog("labeled");
    Compilation c = compile_labeled(orig, appendix_assignment());
    const Task& t = c.task;

    CHECK(as_set(t.goal) == as_set(appendix.goal));
    for (const char* same : {"board-truck", "disembark-truck", "load-truck", "walk"})
        CHECK(*t.action(same) == *orig.action(same));
    CHECK(t.action("drive-truck")->conditional.size() == 1);
    CHECK(t.action("unload-truck")->conditional.size() == 3);
    CHECK(c.extended_schemas == std::vector<std::string>{"unload-truck", "drive-truck"});

    // same guards as the appendix; effects additionally set the done flag
    for (const char* name : {"unload-truck", "drive-truck"}) {
        auto ours = sorted(*t.action(name));
        auto theirs = sorted(*appendix.action(name));
        REQUIRE(ours.conditional.size() == theirs.conditional.size());
        for (std::size_t i = 0; i < ours.conditional.size(); ++i) {
            CHECK(ours.conditional[i].condition == theirs.conditional[i].condition);
            for (const auto& l : theirs.conditional[i].effect)
                CHECK(std::find(ours.conditional[i].effect.begin(), ours.conditional[i].effect.end(), l) !=
                      ours.conditional[i].effect.end());
            CHECK(ours.conditional[i].effect.size() == theirs.conditional[i].effect.size() + 1);
        }
    }
    for (const char* p : {"attruck2-s2-done", "atpackage1-s1-done", "atpackage3-s2-done", "atpackage4-s0-done"})
        CHECK(t.predicate(p) != nullptr);
    REQUIRE(t.predicate("atab") != nullptr);
    CHECK(t.predicate("atab")->params.back().type == "driver");
    CHECK(c.new_predicates == 5);
    CHECK(semantically_equal(reparse(t), t));
}

TEST_CASE("labeled compilation with nothing to assign") {
    Task t = driverlog();
    t.goal = {pddl::Atom{"at", {"truck1", "s1"}}};
    Compilation c = compile_labeled(t, GoalAssignment{});
    CHECK(c.task.predicates == t.predicates);
    CHECK(c.task.actions == t.actions);
    CHECK(c.task.goal == t.goal);
}

TEST_CASE("labeled compilation rejects bad assignments") {
    Task t = driverlog();
    GoalAssignment a = appendix_assignment();
    a.goals[0] = "(at truck1 s1)";  // already true initially
    CHECK_THROWS_WITH_AS(compile_labeled(t, a), doctest::Contains("non-assignable"), std::invalid_argument);
    GoalAssignment partial = appendix_assignment();
    partial.goals.pop_back();
    partial.agent_of.pop_back();
    CHECK_THROWS_AS(compile_labeled(t, partial), std::invalid_argument);
}

TEST_CASE("fair compilation reproduces the appendix structure") {
    Task orig = driverlog();
    Task appendix = driverlog("fair");
    Compilation c = compile_fair(orig, Scheme::GoalMaximin);
    const Task& t = c.task;

    CHECK(c.reward_schemas == std::vector<std::string>{"__give_min_reward_0-0-4", "__give_min_reward_0-1-3",
                                                       "__give_min_reward_0-2-2", "__give_min_reward_1-1-2"});
    CHECK(c.numbers == std::vector<std::string>{"n0", "n1", "n2", "n3", "n4", "n5"});
    CHECK(t.objects_of("number") == appendix.objects_of("number"));
    for (const char* name : {"unload-truck", "drive-truck", "load-truck", "walk", "board-truck", "disembark-truck"})
        CHECK(sorted(*t.action(name)) == sorted(*appendix.action(name)));
    for (const auto& r : c.reward_schemas) {
        auto ours = sorted(*t.action(r));
        auto theirs = sorted(*appendix.action(r));
        for (auto& p : theirs.params)
            p.type = "driver";  // the appendix declares a separate agent type
        CHECK(ours == theirs);
    }
    for (const char* p : {"next", "end", "n_goal_achieved"})
        CHECK(*t.predicate(p) == *appendix.predicate(p));
    CHECK(as_set(t.init) ==
          [&] {
              auto s = as_set(appendix.init);
              return s;
          }());
    CHECK(t.goal == appendix.goal);
    CHECK(t.metric == pddl::Metric::MinimizeTotalCost);

    // reward costs follow (|G| - k) K and decrease in k, as in the appendix table
    std::map<std::string, std::int64_t> ours, theirs;
    for (const auto& n : t.numeric_init)
        ours[n.term.args[0]] = n.value;
    for (const auto& n : appendix.numeric_init)
        theirs[n.term.args[0]] = n.value;
    CHECK(ours["n0"] == 4000);
    CHECK(ours["n2"] == 2000);
    for (std::size_t k = 1; k < c.numbers.size(); ++k) {
        CHECK(ours[c.numbers[k]] <= ours[c.numbers[k - 1]]);
        CHECK(theirs[c.numbers[k]] < theirs[c.numbers[k - 1]]);
    }
    CHECK(semantically_equal(reparse(t), t));
}

TEST_CASE("fair compilation edge cases") {
    Task t = driverlog();
    CHECK_THROWS_AS(compile_fair(t, Scheme::WorkloadMaximin), std::invalid_argument);

    Task one = t;
    one.goal = {pddl::Atom{"at", {"package1", "s1"}}};
    one.agents = {"driver1", "driver2"};
    Compilation c = compile_fair(one, Scheme::GoalMaximin);
    CHECK(c.partitions == std::vector<std::vector<std::size_t>>{{0, 1}});
    CHECK(c.numbers.size() == 3);

    Compilation flat = compile_fair(t, Scheme::GoalPropEq, {.priority = 10, .reward_cost = RewardCost::Constant});
    CHECK(flat.task.functions.empty());
    const auto* r = flat.task.action("__give_min_reward_0-1-3");
    REQUIRE(r);
    CHECK(r->cost == pddl::CostExpr{30, std::nullopt});

    Compilation pe = compile_fair(t, Scheme::GoalPropEq);
    REQUIRE(pe.task.action("__give_min_reward_1-1-2")->cost->function);
    CHECK(pe.task.action("__give_min_reward_1-1-2")->cost->function->args[0] == "n1");
}

TEST_CASE("name clashes are avoided") {
    pddl::Task d = pddl::parse_domain(R"(
(define (domain clash) (:requirements :typing)
  (:types bot spot number)
  (:predicates (next ?b - bot) (done ?s - spot))
  (:action finish :parameters (?b - bot ?n1 - spot) :precondition (next ?b) :effect (done ?n1))))");
    pddl::Task t = pddl::parse_problem(
        "(define (problem p) (:domain clash) (:objects b1 b2 - bot x - spot n0 - number) (:init (next b1)) (:goal (done x)))",
        d);
    t.agents = {"b1", "b2"};
    Compilation c = compile_fair(t, Scheme::GoalMaximin);
    const auto* f = c.task.action("finish");
    REQUIRE(f->params.size() == 4);
    CHECK(f->params[2].name != "?n1");
    CHECK(c.numbers.front() != "n0");
    CHECK(c.task.predicates.size() == 2 + 4);
    CHECK(semantically_equal(reparse(c.task), c.task));
}

TEST_CASE("compiled plan projects back onto the original task") {
    Task orig = driverlog();
    std::string text = pddl::read_file(fixture("driverlog/fair-plan.plan"));
    auto steps = parse_plan_steps(text);
    Compilation c = compile_fair(orig, Scheme::GoalMaximin);

    auto ours = testing::naive_execute(c.task, steps);
    CHECK(ours.valid);
    CHECK(ours.cost == 13 + 4000);
    auto appendix = testing::naive_execute(driverlog("fair"), steps);
    CHECK(appendix.valid);
    CHECK(appendix.cost == 13 + 6000);

    auto projected = project_plan(c, steps);
    CHECK(projected.size() == 13);
    CHECK(projected == parse_plan_steps(pddl::read_file(fixture("driverlog/plan-full.plan"))));
    CHECK(testing::naive_execute(orig, projected).valid);
    CHECK(rewarded_partition(c, steps) == std::vector<std::size_t>{0, 1, 3});

    // the same moves under the labeled task credit the first achievers
    Compilation l = compile_labeled(orig, appendix_assignment());
    auto labeled = testing::naive_execute(l.task, projected);
    CHECK(!labeled.valid);  // driver3 took package1, which was assigned to driver1
    CHECK(labeled.final_state.count(pddl::Atom{"atab", {"package1", "s1", "driver3"}}));
    CHECK(labeled.final_state.count(pddl::Atom{"atab", {"package4", "s0", "driver1"}}));
}
