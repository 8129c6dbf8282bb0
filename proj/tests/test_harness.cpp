#include "doctest.h"
#include "support.hpp"

#include "fairplan/compile/compile.hpp"
#include "fairplan/harness/bench.hpp"
#include "fairplan/harness/search.hpp"
#include "fairplan/heuristics/relaxed.hpp"
#include "fairplan/pddl/printer.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

namespace fs = std::filesystem;
namespace pddl = fairplan::pddl;
namespace ground = fairplan::ground;
using namespace fairplan::harness;
using fairplan::assign::Scheme;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("fairplan-test-" + std::to_string(::getpid()) + "-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::pair<std::size_t, std::size_t> coords(const std::string& cell) {
    auto dash = cell.find('-');
    return {std::stoul(cell.substr(1, dash - 1)), std::stoul(cell.substr(dash + 1))};
}

std::string start_of(const pddl::Task& t, const std::string& robot) {
    for (const auto& a : t.init)
        if (a.predicate == "at" && a.args[0] == robot)
            return a.args[1];
    return "";
}

// plain unit-cost BFS distance over the adjacency facts
std::size_t grid_distance(const pddl::Task& t, const std::string& from, const std::string& to) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& a : t.init)
        if (a.predicate == "adjacent")
            adj[a.args[0]].push_back(a.args[1]);
    std::map<std::string, std::size_t> dist{{from, 0}};
    std::vector<std::string> queue{from};
    for (std::size_t i = 0; i < queue.size(); ++i)
        for (const auto& n : adj[queue[i]])
            if (dist.emplace(n, dist[queue[i]] + 1).second)
                queue.push_back(n);
    return dist.at(to);
}

fairplan::assign::GoalAssignment fixed_assignment(const pddl::Task& t, const std::vector<std::size_t>& agent_of) {
    fairplan::assign::GoalAssignment a;
    a.method = "fixed";
    a.agents = t.agents;
    for (const auto& g : fairplan::compile::assignable_goals(t))
        a.goals.push_back(g.str());
    a.agent_of = agent_of;
    a.goal_counts.assign(t.agents.size(), 0);
    a.workloads.assign(t.agents.size(), 0);
    return a;
}

RunRecord synthetic(const std::string& approach, const std::string& task, std::optional<std::int64_t> cost,
                    std::int64_t gmax = 0, std::int64_t gpe = 0, std::int64_t wmax = 0, std::int64_t wpe = 0,
                    double time = 0.5, const std::string& domain = "d") {
    RunRecord r;
    r.approach = approach;
    r.task_id = task;
    r.domain = domain;
    r.agents = 2;
    r.goals = 4;
    r.time = time;
    if (!cost) {
        r.status = RunStatus::Timeout;
        return r;
    }
    r.status = RunStatus::Solved;
    r.cost = r.raw_cost = cost;
    fairplan::eval::FairnessReport rep;
    rep.agents = {"a", "b"};
    rep.goal_counts = {0, 0};
    rep.workloads = {0, 0};
    rep.g_maximin = gmax;
    rep.g_propeq = gpe;
    rep.w_maximin = wmax;
    rep.w_propeq = wpe;
    r.report = rep;
    return r;
}

} // namespace

TEST_CASE("warehouse generator") {
    auto corridor = generate_warehouse({1, 5, 1, 2, 0, 0, 7});
    CHECK(corridor.agents == std::vector<std::string>{"robot1"});
    CHECK(corridor.goal.size() == 2);
    auto g = ground::ground(corridor);
    auto r = bfs(g);
    REQUIRE(r.status == SearchStatus::Solved);
    CHECK(ground::execute(g, {r.plan, std::nullopt}).valid);

    // relaxed cost of every goal is the walking distance
    fairplan::heuristics::RelaxedAnalysis relaxed(g);
    const auto [sx, sy] = coords(start_of(corridor, "robot1"));
    for (const auto& goal : corridor.goal) {
        auto [gx, gy] = coords(goal.args[0]);
        const auto manhattan = static_cast<std::int64_t>((sx > gx ? sx - gx : gx - sx) + (sy > gy ? sy - gy : gy - sy));
        CHECK(relaxed.h_ff({g.fact(goal)}).value() == manhattan);
    }

    CHECK(pddl::emit_problem(generate_warehouse({3, 3, 2, 3, 1, 1, 5})) ==
          pddl::emit_problem(generate_warehouse({3, 3, 2, 3, 1, 1, 5})));

    // the emitted files parse back to the same task
    auto t = generate_warehouse({3, 4, 3, 4, 2, 2, 11});
    auto back = pddl::parse_problem(pddl::emit_problem(t), pddl::parse_domain(pddl::emit_domain(t)));
    pddl::set_agents(back, t.agents);
    CHECK(pddl::emit_problem(back) == pddl::emit_problem(t));

    auto empty = generate_warehouse({2, 2, 1, 0, 0, 0, 1});
    CHECK(empty.goal.empty());
    auto eg = ground::ground(empty);
    auto er = bfs(eg);
    CHECK(er.status == SearchStatus::Solved);
    CHECK(er.plan.empty());
    CHECK(ground::execute(eg, {}).valid);

    CHECK_THROWS_AS(generate_warehouse({2, 2, 1, 2, 3, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(generate_warehouse({2, 2, 1, 5, 0, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(generate_warehouse({2, 2, 3, 2, 0, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(generate_warehouse({2, 2, 1, 2, 0, 3, 1}), std::invalid_argument);
}

TEST_CASE("hammers gate black locations") {
    // 1x4 corridor: robot, hammer and black cell placed by hand
    auto t = generate_warehouse({1, 4, 1, 1, 1, 1, 3});
    auto g = ground::ground(t);
    auto r = ucs(g);
    REQUIRE(r.status == SearchStatus::Solved);
    std::string robot = start_of(t, "robot1"), hammer, black;
    for (const auto& a : t.init)
        if (a.predicate == "hammer-at")
            hammer = a.args[1];
    black = t.goal[0].args[0];
    auto d = [&](const std::string& x, const std::string& y) {
        return static_cast<std::int64_t>(grid_distance(t, x, y));
    };
    CHECK(r.cost == d(robot, hammer) + d(hammer, black));
    bool used_hammer = false;
    for (auto i : r.plan)
        used_hammer = used_hammer || g.actions[i].name == "perform-work-black-location";
    CHECK(used_hammer);
}

TEST_CASE("successor generator agrees with a full scan") {
    auto t = generate_warehouse({3, 3, 2, 3, 1, 1, 2});
    auto g = ground::ground(t);
    SuccessorGenerator succ(g);
    auto s = g.initial_state();
    std::mt19937_64 rng(9);
    std::vector<std::size_t> ops, scan;
    for (int step = 0; step < 200; ++step) {
        succ.applicable(s, ops);
        scan.clear();
        for (std::size_t i = 0; i < g.actions.size(); ++i)
            if (ground::applicable(s, g.actions[i]))
                scan.push_back(i);
        REQUIRE(ops == scan);
        if (ops.empty())
            break;
        s = ground::apply(s, g.actions[ops[rng() % ops.size()]]);
    }
}

TEST_CASE("bfs, ucs and brute force agree on optimal costs") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        auto t = generate_warehouse({3, 2, 2, 2, 1, 1, seed});
        auto g = ground::ground(t);
        auto b = bfs(g);
        auto u = ucs(g);
        REQUIRE(b.status == SearchStatus::Solved);
        REQUIRE(u.status == SearchStatus::Solved);
        auto brute = brute_force_plan(g, b.plan.size() + 6, PlanObjective::cost());
        REQUIRE(brute);
        CHECK(brute->cost == u.cost);
        CHECK(u.cost <= b.cost);
        CHECK(ground::execute(g, {u.plan, std::nullopt}).valid);
        CHECK(ground::execute(g, {brute->actions, std::nullopt}).cost == brute->cost);
    }
}

TEST_CASE("brute-force planning") {
    auto empty = ground::ground(generate_warehouse({2, 2, 2, 0, 0, 0, 1}));
    auto e = brute_force_plan(empty, 3, PlanObjective::lexicographic(Scheme::GoalMaximin));
    REQUIRE(e);
    CHECK(e->actions.empty());

    // robot at one end of a 1x4 corridor, the only work at the other end
    auto corridor = generate_warehouse({1, 4, 1, 1, 0, 0, 1});
    for (auto& a : corridor.init)
        if (a.predicate == "at")
            a.args[1] = "c1-1";
    for (auto& o : corridor.objects)
        if (o.type == "white_location")
            o.type = "floor";
    for (auto& o : corridor.objects)
        if (o.name == "c1-4")
            o.type = "white_location";
    corridor.goal = {pddl::Atom{"work-performed", {"c1-4"}}};
    auto cg = ground::ground(corridor);
    auto c = brute_force_plan(cg, 10, PlanObjective::cost());
    REQUIRE(c);
    CHECK(c->cost == 3);
    CHECK_FALSE(brute_force_plan(cg, 2, PlanObjective::cost()));
    CHECK_THROWS_AS(brute_force_plan(cg, 10, PlanObjective::cost(), 3), fairplan::assign::BoundExceeded);

    // 2 robots, 4 works on a 2x3 grid: the fairest plans split them 2/2
    auto toy = generate_warehouse({3, 2, 2, 4, 0, 0, 4});
    auto tg = ground::ground(toy);
    auto fair = brute_force_plan(tg, 12, PlanObjective::lexicographic(Scheme::GoalMaximin));
    REQUIRE(fair);
    CHECK(fair->goal_counts == std::vector<std::int64_t>{2, 2});
    CHECK(fair->fairness == 2);
    auto cheap = brute_force_plan(tg, 12, PlanObjective::cost());
    REQUIRE(cheap);
    CHECK(cheap->cost <= fair->cost);
    auto trace = ground::execute(tg, {fair->actions, std::nullopt});
    CHECK(trace.valid);
    auto rep = fairplan::eval::fairness_report(tg, trace);
    CHECK(rep.goal_counts == fair->goal_counts);
    CHECK(rep.cost == fair->cost);
}

TEST_CASE("two hammers cannot serve three black-location assignments") {
    auto t = generate_warehouse({3, 3, 3, 3, 3, 2, 1});
    auto g = ground::ground(t);
    auto original = bfs(g);
    CHECK(original.status == SearchStatus::Solved);
    auto c = fairplan::compile::compile_labeled(t, fixed_assignment(t, {0, 1, 2}));
    auto labeled = bfs(ground::ground(c.task));
    CHECK(labeled.status == SearchStatus::Unsolvable);
    // two black goals for one robot is fine
    auto ok = fairplan::compile::compile_labeled(t, fixed_assignment(t, {0, 0, 1}));
    CHECK(bfs(ground::ground(ok.task)).status == SearchStatus::Solved);
}

TEST_CASE("time score") {
    CHECK(time_score(0.01) == 1.0);
    CHECK(time_score(1) == 1.0);
    CHECK(time_score(900) == 0.0);
    CHECK(time_score(1000) == 0.0);
    CHECK(time_score(30) == 0.5);
    CHECK(time_score(90) == doctest::Approx(1 - std::log(90.0) / std::log(900.0)).epsilon(1e-12));
}

TEST_CASE("score table") {
    // costs 10 and 20, one approach fairer, last one unsolved
    std::vector<RunRecord> recs{synthetic("a", "t1", 10, 1, 2, 3, 4, 0.5),
                                synthetic("b", "t1", 20, 2, 0, 6, 0, 30),
                                synthetic("c", "t1", std::nullopt)};
    auto scores = task_scores(recs);
    REQUIRE(scores.size() == 3);
    CHECK(scores[0].plan_cost == 1.0);
    CHECK(scores[1].plan_cost == 0.5);
    CHECK(scores[0].g_maximin == 0.5);
    CHECK(scores[1].g_maximin == 1.0);
    CHECK(scores[0].g_propeq == 0.0);  // best is 0
    CHECK(scores[1].g_propeq == 1.0);
    CHECK(scores[0].w_maximin == 0.5);
    CHECK(scores[0].w_propeq == 0.0);
    CHECK(scores[1].time == 0.5);
    CHECK(scores[2].plan_cost == 0.0);
    CHECK(scores[2].time == 0.0);
    CHECK_FALSE(scores[2].solved);

    // all propeq values 0 -> everybody scores 1
    auto tie = task_scores({synthetic("a", "t", 5, 0, 0, 0, 0), synthetic("b", "t", 5, 0, 0, 0, 0)});
    for (const auto& s : tie) {
        CHECK(s.g_propeq == 1.0);
        CHECK(s.g_maximin == 1.0);
        CHECK(s.w_propeq == 1.0);
    }

    // propeq 3 vs 4 -> 1 and 0.75; maximin 3 vs 4 -> 0.75 and 1
    auto ratios = task_scores({synthetic("a", "t", 7, 3, 3, 3, 3), synthetic("b", "t", 7, 4, 4, 4, 4)});
    CHECK(ratios[0].g_propeq == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ratios[1].g_propeq == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(ratios[0].w_maximin == doctest::Approx(0.75).epsilon(1e-12));

    std::vector<RunRecord> many{synthetic("a", "t1", 10), synthetic("b", "t1", 20),
                                synthetic("a", "t2", 3, 0, 0, 0, 0, 0.5, "e"), synthetic("b", "t2", std::nullopt, 0, 0, 0, 0, 0.5, "e")};
    auto table = score_table(many, {"b", "a"});
    CHECK(table.approaches == std::vector<std::string>{"b", "a"});
    REQUIRE(table.domains.size() == 2);
    CHECK(table.domains[0].name == "d");
    CHECK(table.all.rows[1].approach == "a");
    CHECK(table.all.rows[1].coverage == 2);
    CHECK(table.all.rows[0].coverage == 1);
    CHECK(table.all.rows[0].plan_cost == 0.5);
    CHECK(table.common.tasks == 1);
    CHECK(table.common.rows[1].plan_cost == 1.0);
    CHECK(table.all.agents_mean == 2.0);
    CHECK(table.all.agents_std == 0.0);
    auto md = to_markdown(table);
    CHECK(md.find("| Problems | \\|N\\| | \\|G\\| | Approach | Plan Cost | G-Maximin | G-Propeq | W-Maximin | "
                  "W-Propeq | Total Time | Coverage |") == 0);
    CHECK(md.find("Commonly Solved Problems (1)") != std::string::npos);

    CHECK_THROWS_AS(score_table({}), std::invalid_argument);
    CHECK_THROWS_AS(score_table({synthetic("a", "t1", 1), synthetic("b", "t2", 1)}), std::invalid_argument);
    CHECK_THROWS_AS(score_table({synthetic("a", "t1", 1), synthetic("a", "t1", 1)}), std::invalid_argument);
}

TEST_CASE("approach names") {
    for (const char* n : {"passthrough", "contract-net", "milp-g-maximin", "milp-g-propeq", "milp-w-maximin",
                          "milp-w-propeq", "fpc-g-maximin", "fpc-g-propeq"})
        CHECK(parse_approach(n).name() == n);
    CHECK_THROWS_AS(parse_approach("fpc-w-maximin"), std::invalid_argument);
    CHECK_THROWS_AS(parse_approach("lama"), std::invalid_argument);
}

TEST_CASE("every approach solves a small warehouse") {
    auto dir = scratch("pipeline");
    auto t = generate_warehouse({3, 3, 2, 3, 1, 1, 5});
    auto adapter = PlannerAdapter::builtin("bfs", 60);
    for (const char* n : {"passthrough", "contract-net", "milp-g-maximin", "milp-g-propeq", "milp-w-maximin",
                          "milp-w-propeq", "fpc-g-maximin", "fpc-g-propeq"}) {
        CAPTURE(n);
        auto rec = run_approach(parse_approach(n), t, "w1", "warehouse", adapter,
                                {1000, (dir / n).string(), (dir / "scratch").string(), (dir / "plans" / n).string()});
        CHECK(rec.status == RunStatus::Solved);
        CHECK(rec.message == "");
        CHECK(rec.time < 60);
        CHECK(fs::exists(dir / "plans" / n));
        REQUIRE(rec.cost);
        if (std::string(n).rfind("fpc", 0) == 0) {
            REQUIRE(rec.partition);
            CHECK(*rec.raw_cost > *rec.cost);
            auto ws = *rec.partition;
            auto counts = rec.report->goal_counts;
            std::sort(counts.begin(), counts.end());
            CHECK(std::vector<std::int64_t>(ws.begin(), ws.end()) == counts);
        } else {
            CHECK(rec.raw_cost == rec.cost);
        }
        auto again = record_from_json(to_json(rec));
        CHECK(to_json(again) == to_json(rec));
    }
    fs::remove_all(dir);
}

TEST_CASE("external planner adapters") {
    auto dir = scratch("external");
    auto t = generate_warehouse({2, 2, 1, 1, 0, 0, 3});
    auto g = ground::ground(t);
    auto r = bfs(g);
    REQUIRE(r.status == SearchStatus::Solved);
    const std::string good = (dir / "good.plan").string();
    {
        std::ofstream f(good);
        f << ground::format_plan({r.plan, r.cost}, g);
    }
    {
        std::ofstream f(dir / "bad.plan");
        f << "(perform-work robot1 nowhere)\n";
    }
    auto run = [&](const std::string& cmd, double timeout = 10) {
        auto a = PlannerAdapter::external("sh", cmd, timeout);
        return run_approach(parse_approach("passthrough"), t, "x", "w", a,
                            {1000, (dir / "task").string(), (dir / "scratch").string(), ""});
    };
    auto ok = run("cp " + shell_quote(good) + " {plan} # {domain} {problem}");
    CHECK(ok.status == RunStatus::Solved);
    CHECK(ok.cost == r.cost);
    CHECK(run("cp " + shell_quote((dir / "bad.plan").string()) + " {plan} # {domain} {problem}").status ==
          RunStatus::InvalidPlan);
    CHECK(run("exit 3 # {domain} {problem} {plan}").status == RunStatus::Failed);
    auto slow = run("sleep 5; cp " + shell_quote(good) + " {plan} # {domain} {problem}", 0.3);
    CHECK(slow.status == RunStatus::Timeout);
    CHECK(slow.time < 3);
    // the command sees the emitted files
    CHECK(run("test -s {domain} && test -s {problem} && cp " + shell_quote(good) + " {plan}").status ==
          RunStatus::Solved);
    CHECK_THROWS_AS(PlannerAdapter::external("x", "planner {domain} {plan}").validate(), std::invalid_argument);
    CHECK_THROWS_AS(PlannerAdapter::builtin("bfs", 0).validate(), std::invalid_argument);
    fs::remove_all(dir);
}

TEST_CASE("bench runs are reproducible") {
    auto dir = scratch("bench");
    auto tmp = dir / "tmp";
    fs::create_directories(tmp);
    ::setenv("FAIRPLAN_TMPDIR", tmp.string().c_str(), 1);
    nlohmann::json cfg = {
        {"seed", 3},
        {"workers", 3},
        {"approaches", {"milp-g-maximin", "fpc-g-maximin"}},
        {"planner", {{"name", "bfs"}, {"timeout", 60}}},
        {"tasks",
         {{{"domain", "warehouse"},
           {"count", 3},
           {"warehouse", {{"width", 3}, {"height", 2}, {"agents", 2}, {"work", 3}, {"black", 1}, {"hammers", 1}}}}}}};
    auto config = bench_config_from_json(cfg);
    CHECK(config.tasks.size() == 3);
    auto first = run_bench(config, (dir / "one").string());
    auto second = run_bench(bench_config_from_json(cfg), (dir / "two").string());
    ::unsetenv("FAIRPLAN_TMPDIR");
    CHECK(first.records.size() == 6);
    for (const auto& r : first.records)
        CHECK(r.solved());
    CHECK(pddl::read_file((dir / "one" / "scores.json").string()) ==
          pddl::read_file((dir / "two" / "scores.json").string()));
    CHECK(pddl::read_file((dir / "one" / "scores.md").string()) ==
          pddl::read_file((dir / "two" / "scores.md").string()));
    auto loaded = load_records((dir / "one").string());
    CHECK(loaded.size() == 6);
    auto rescored = score_table(loaded, load_approach_order((dir / "one").string()));
    CHECK(to_json(rescored) == to_json(first.table));
    CHECK(fs::exists(dir / "one" / "tasks" / "warehouse-1" / "original" / "domain.pddl"));
    CHECK(fs::exists(dir / "one" / "tasks" / "warehouse-1" / "fpc-g-maximin" / "problem.pddl"));
    CHECK(fs::exists(dir / "one" / "plans" / "warehouse-2__milp-g-maximin.plan"));
    CHECK(fs::is_empty(tmp));
    fs::remove_all(dir);
}
