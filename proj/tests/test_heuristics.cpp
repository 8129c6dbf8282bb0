#include "doctest.h"
#include "support.hpp"

#include "fairplan/ground/ground_task.hpp"
#include "fairplan/heuristics/relaxed.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <random>

namespace pddl = fairplan::pddl;
using namespace fairplan::ground;
using namespace fairplan::heuristics;
using testing::driverlog;

namespace {

GroundTask make_task(std::size_t n_facts) {
    GroundTask t;
    for (std::size_t i = 0; i < n_facts; ++i)
        t.facts.push_back({"p" + std::to_string(i), {}});
    std::sort(t.facts.begin(), t.facts.end());
    return t;
}

GroundAction act(std::string name, std::vector<FactId> pre, std::vector<FactId> add, std::int64_t cost = 1) {
    GroundAction a;
    a.name = std::move(name);
    a.pre = std::move(pre);
    a.add = std::move(add);
    a.cost = cost;
    return a;
}

// Optimal delete-relaxed cost by uniform-cost search over relaxed states.
std::optional<std::int64_t> relaxed_optimum(const GroundTask& t, const std::vector<FactId>& goals) {
    using Node = std::pair<std::int64_t, std::vector<bool>>;
    std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
    std::map<std::vector<bool>, std::int64_t> best;
    std::vector<bool> init(t.facts.size(), false);
    for (FactId f : t.init)
        init[f] = true;
    open.push({0, init});
    best[init] = 0;
    while (!open.empty()) {
        auto [g, s] = open.top();
        open.pop();
        if (best[s] < g)
            continue;
        if (std::all_of(goals.begin(), goals.end(), [&](FactId f) { return s[f]; }))
            return g;
        for (const auto& a : t.actions) {
            if (!std::all_of(a.pre.begin(), a.pre.end(), [&](FactId f) { return s[f]; }))
                continue;
            auto n = s;
            for (FactId f : a.add)
                n[f] = true;
            for (const auto& c : a.conditional)
                if (std::all_of(c.condition.begin(), c.condition.end(), [&](FactId f) { return s[f]; }))
                    for (FactId f : c.add)
                        n[f] = true;
            auto it = best.find(n);
            if (it == best.end() || it->second > g + a.cost) {
                best[n] = g + a.cost;
                open.push({g + a.cost, n});
            }
        }
    }
    return std::nullopt;
}

GroundTask random_delete_free(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nf(3, 7), na(2, 7), cost(0, 3), coin(0, 3);
    GroundTask t = make_task(static_cast<std::size_t>(nf(rng)));
    const int F = static_cast<int>(t.facts.size());
    std::uniform_int_distribution<int> pick(0, F - 1);
    t.init = {static_cast<FactId>(pick(rng))};
    int n = na(rng);
    for (int i = 0; i < n; ++i) {
        GroundAction a = act("a" + std::to_string(i), {}, {}, cost(rng));
        for (int k = coin(rng) % 3; k > 0; --k)
            a.pre.push_back(static_cast<FactId>(pick(rng)));
        a.add.push_back(static_cast<FactId>(pick(rng)));
        if (coin(rng) == 0) {
            GroundConditionalEffect c;
            c.condition.push_back(static_cast<FactId>(pick(rng)));
            c.add.push_back(static_cast<FactId>(pick(rng)));
            a.conditional.push_back(c);
        }
        for (auto* v : {&a.pre, &a.add}) {
            std::sort(v->begin(), v->end());
            v->erase(std::unique(v->begin(), v->end()), v->end());
        }
        t.actions.push_back(a);
    }
    t.reindex();
    return t;
}

} // namespace

TEST_CASE("chain task") {
    GroundTask t = make_task(2);
    t.actions = {act("a1", {}, {0}), act("a2", {0}, {1})};
    t.reindex();
    CHECK(h_ff(t, {1}) == HeuristicValue(2));
    CHECK(relaxed_optimum(t, {1}) == 2);
    CHECK(h_ff(t, {}) == HeuristicValue(0));
}

TEST_CASE("goals in the initial state cost nothing; unreachable goals are infinite") {
    GroundTask t = make_task(3);
    t.init = {0};
    t.actions = {act("a", {0}, {1})};
    t.reindex();
    CHECK(h_ff(t, {0}) == HeuristicValue(0));
    CHECK(h_ff(t, {2}).is_infinite());
    CHECK(h_ff(t, {1, 2}).is_infinite());
}

TEST_CASE("relaxed plan on random delete-free tasks") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 300; ++round) {
        GroundTask t = random_delete_free(rng);
        std::vector<FactId> goals = {static_cast<FactId>(round % t.facts.size())};
        if (round % 3 == 0)
            goals.push_back(static_cast<FactId>((round / 3) % t.facts.size()));
        std::sort(goals.begin(), goals.end());
        goals.erase(std::unique(goals.begin(), goals.end()), goals.end());
        RelaxedAnalysis analysis(t);
        HeuristicValue h = analysis.h_ff(goals);
        auto opt = relaxed_optimum(t, goals);
        CAPTURE(round);
        REQUIRE(h.is_finite() == opt.has_value());
        if (!opt)
            continue;
        CHECK(h.value() >= *opt);
        // executing the relaxed plan on the delete-free task reaches the goals at cost h
        auto plan = analysis.relaxed_plan(goals);
        REQUIRE(plan);
        State s = t.initial_state();
        std::int64_t cost = 0;
        for (auto p : *plan) {
            const auto& a = t.actions[analysis.pieces()[p].action];
            REQUIRE(applicable(s, a));
            s = apply(s, a);
            cost += a.cost;
        }
        CHECK(s.contains_all(goals));
        CHECK(cost == h.value());

        // action order does not matter
        GroundTask shuffled = t;
        std::shuffle(shuffled.actions.begin(), shuffled.actions.end(), rng);
        shuffled.reindex();
        CHECK(h_ff(shuffled, goals) == h);
    }
}

TEST_CASE("restriction to one agent") {
    GroundTask g = ground(driverlog());
    GroundTask r = restrict_to_agent(g, "driver1");
    // oracle: count ground actions whose first argument is driver1
    std::size_t expected = 0;
    for (const auto& a : g.actions)
        expected += !a.args.empty() && a.args[0] == "driver1";
    CHECK(r.actions.size() == expected);
    for (const auto& a : r.actions)
        CHECK(a.args[0] == "driver1");
    CHECK(r.facts == g.facts);
    CHECK(r.init == g.init);
    CHECK(r.goals == g.goals);
    CHECK_THROWS_AS(restrict_to_agent(g, "driver9"), std::invalid_argument);

    GroundTask solo = g;
    solo.agents = {"driver1"};
    for (auto& a : solo.actions)
        a.agent = a.args[0] == "driver1" ? std::optional<std::size_t>(0) : std::nullopt;
    // agentless actions stay
    GroundTask rs = restrict_to_agent(solo, "driver1");
    CHECK(rs.actions.size() == g.actions.size());
}

TEST_CASE("driverlog achievability") {
    GroundTask g = ground(driverlog());
    std::vector<FactId> goals = g.goals;
    AchievabilityTable table = achievable(g, g.agents, goals);
    // every driver can walk to any truck and move any package
    CHECK(table.pairs().size() == g.agents.size() * goals.size());
    const FactId t1 = g.fact({"at", {"truck1", "s1"}});
    auto it = std::find(goals.begin(), goals.end(), t1);
    REQUIRE(it != goals.end());
    for (std::size_t a = 0; a < g.agents.size(); ++a)
        CHECK(table.h[a][static_cast<std::size_t>(it - goals.begin())] == HeuristicValue(0));

    AgentHeuristics cached(g);
    for (std::size_t a = 0; a < g.agents.size(); ++a)
        for (std::size_t i = 0; i < goals.size(); ++i)
            CHECK(cached.h_ff(a, {goals[i]}) == table.h[a][i]);
}
