// fairplan: fair goal assignment and planning from the command line.

#include "fairplan/assign/assignment.hpp"
#include "fairplan/assign/assignment_io.hpp"
#include "fairplan/assign/contract_net.hpp"
#include "fairplan/compile/compile.hpp"
#include "fairplan/eval/fairness.hpp"
#include "fairplan/ground/plan.hpp"
#include "fairplan/harness/bench.hpp"
#include "fairplan/pddl/parser.hpp"
#include "fairplan/pddl/printer.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
namespace pddl = fairplan::pddl;
namespace ground = fairplan::ground;
namespace assign = fairplan::assign;
namespace compile = fairplan::compile;
namespace harness = fairplan::harness;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kSolver = 3 };

struct Failure {
    Exit code;
    std::string kind;
    std::string message;
    json extra = json::object();
};

[[noreturn]] void fail(Exit code, std::string kind, std::string message, json extra = json::object()) {
    throw Failure{code, std::move(kind), std::move(message), std::move(extra)};
}

const char* kDialect = R"txt(PDDL dialect:
  Requirements :strips :typing :equality :negative-preconditions
  :conditional-effects :action-costs; anything else is rejected.
  Identifiers are case-insensitive and folded to lower case.
  Types may have several parents ("(either ...)" is not supported).
  Preconditions and goals are conjunctions of literals; goals are positive.
  Effects are conjunctions of literals, (when <cond> <effect>) and one
  (increase (total-cost) <n | (f args)>). Without any increase, every
  action costs 1. The only metric is (:metric minimize (total-cost)).
  Agents: one object per line in the file given with --agents ('#' or ';'
  comments); without it, the objects of the first-parameter type shared by
  all schemas are the agents.
Exit codes: 0 success, 1 usage, 2 input error, 3 solver or planner failure.)txt";

struct TaskArgs {
    std::string domain, problem, agents;

    void add(CLI::App* cmd) {
        cmd->add_option("-d,--domain", domain, "domain file")->required()->check(CLI::ExistingFile);
        cmd->add_option("-p,--problem", problem, "problem file")->required()->check(CLI::ExistingFile);
        cmd->add_option("-a,--agents", agents, "agent list file")->check(CLI::ExistingFile);
    }

    pddl::Task load() const {
        try {
            return pddl::load_task(domain, problem, agents);
        } catch (const pddl::ParseError& e) {
            fail(kInput, "parse-error", e.what(), {{"line", e.line()}, {"column", e.column()}});
        } catch (const std::exception& e) {
            fail(kInput, "input-error", e.what());
        }
    }
};

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    try {
        harness::write_atomic(path, text);
    } catch (const std::exception& e) {
        fail(kInput, "io-error", e.what());
    }
}

assign::Scheme scheme_arg(const std::string& text) {
    auto s = assign::parse_scheme(text);
    if (!s)
        fail(kUsage, "usage", "unknown scheme '" + text + "' (goal-maximin, goal-propeq, workload-maximin, workload-propeq)");
    return *s;
}

ground::GroundTask ground_or_fail(const pddl::Task& t) {
    try {
        return ground::ground(t);
    } catch (const std::exception& e) {
        fail(kInput, "grounding-error", e.what());
    }
}

// --- assign ---------------------------------------------------------------

struct AssignArgs {
    TaskArgs task;
    std::string scheme = "goal-maximin", method = "milp", out;
    std::int64_t priority = assign::kDefaultPriority;
};

int cmd_assign(const AssignArgs& a) {
    pddl::Task t = a.task.load();
    ground::GroundTask g = ground_or_fail(t);
    if (assign::assignable_goals(g).empty())
        std::cerr << "warning: no assignable goals; the assignment is empty\n";
    assign::GoalAssignment result;
    try {
        if (a.method == "contract-net")
            result = assign::contract_net_assign(g, a.priority);
        else if (a.method == "milp" || a.method == "brute-force") {
            auto model = assign::build_model(g, scheme_arg(a.scheme), a.priority);
            result = a.method == "milp" ? assign::solve(model) : assign::brute_force_assignment(model);
        } else
            fail(kUsage, "usage", "unknown method '" + a.method + "' (milp, brute-force, contract-net)");
    } catch (const assign::UnassignableGoal& e) {
        fail(kSolver, "unassignable-goal", e.what(), {{"goal", e.goal()}});
    } catch (const assign::BoundExceeded& e) {
        fail(kSolver, "bound-exceeded", e.what());
    }
    write_output(a.out, assign::to_json(result).dump(2) + "\n");
    return kOk;
}

// --- compile --------------------------------------------------------------

struct CompileArgs {
    TaskArgs task;
    std::string mode, assignment, scheme = "goal-maximin", reward_cost = "function", out_dir = ".";
    std::int64_t priority = assign::kDefaultPriority;
};

int cmd_compile(const CompileArgs& a) {
    if (a.mode == "labeled" && a.assignment.empty())
        fail(kUsage, "usage", "labeled mode needs --assignment");
    if (a.mode != "labeled" && a.mode != "fair")
        fail(kUsage, "usage", "unknown mode '" + a.mode + "' (labeled, fair)");
    assign::Scheme scheme = scheme_arg(a.scheme);
    if (a.mode == "fair" && !assign::is_goal_scheme(scheme))
        fail(kUsage, "usage", "fair mode supports goal schemes only, not " + assign::to_string(scheme));
    if (a.reward_cost != "function" && a.reward_cost != "constant")
        fail(kUsage, "usage", "unknown reward cost '" + a.reward_cost + "' (function, constant)");

    pddl::Task t = a.task.load();
    compile::Compilation c;
    try {
        if (a.mode == "labeled") {
            assign::GoalAssignment ga;
            try {
                ga = assign::assignment_from_json(json::parse(pddl::read_file(a.assignment)));
            } catch (const std::exception& e) {
                fail(kInput, "input-error", a.assignment + ": " + e.what());
            }
            c = compile::compile_labeled(t, ga);
        } else {
            compile::FairOptions opts{a.priority, a.reward_cost == "constant" ? compile::RewardCost::Constant
                                                                              : compile::RewardCost::NumericFunction};
            c = compile::compile_fair(t, scheme, opts);
        }
    } catch (const Failure&) {
        throw;
    } catch (const std::exception& e) {
        fail(kInput, "compile-error", e.what());
    }
    const std::string domain = pddl::emit_domain(c.task), problem = pddl::emit_problem(c.task);
    try {
        pddl::parse_problem(problem, pddl::parse_domain(domain));
    } catch (const std::exception& e) {
        fail(kSolver, "internal-error", std::string("emitted task does not reparse: ") + e.what());
    }
    fs::create_directories(a.out_dir);
    write_output((fs::path(a.out_dir) / "domain.pddl").string(), domain);
    write_output((fs::path(a.out_dir) / "problem.pddl").string(), problem);
    write_output((fs::path(a.out_dir) / "agents.txt").string(), pddl::emit_agents(c.task));
    std::cout << "mode: " << a.mode << "\n"
              << "assignable goals: " << c.assignable.size() << "\n"
              << "new predicates: " << c.new_predicates << "\n"
              << "extended schemas: " << c.extended_schemas.size() << "\n"
              << "reward schemas: " << c.reward_schemas.size() << "\n"
              << "partitions: " << c.partitions.size() << "\n"
              << "number objects: " << c.numbers.size() << "\n";
    return kOk;
}

// --- evaluate -------------------------------------------------------------

struct EvaluateArgs {
    TaskArgs task;
    std::string plan, out;
};

int cmd_evaluate(const EvaluateArgs& a) {
    pddl::Task t = a.task.load();
    ground::GroundTask g = ground_or_fail(t);
    ground::Plan plan;
    try {
        plan = ground::parse_plan(pddl::read_file(a.plan), g);
    } catch (const ground::PlanError& e) {
        fail(kInput, "plan-error", e.what(), {{"line", e.line()}});
    } catch (const std::exception& e) {
        fail(kInput, "plan-error", e.what());
    }
    auto trace = ground::execute(g, plan);
    if (!trace.valid) {
        json err{{"valid", false}, {"error", trace.error}};
        if (trace.failed_step)
            err["failed_step"] = *trace.failed_step + 1;
        std::vector<std::string> missing;
        for (auto f : trace.missing)
            missing.push_back(g.fact_name(f));
        err["missing"] = missing;
        std::cout << "invalid: " << trace.error << "\n";
        std::cerr << err.dump() << "\n";
        return kInput;
    }
    auto report = fairplan::eval::fairness_report(g, trace);
    json doc = fairplan::eval::to_json(report);
    doc["valid"] = true;
    if (!a.out.empty() && a.out != "-")
        std::cout << "valid: " << report.steps << " steps, cost " << report.cost << "\n";
    write_output(a.out, doc.dump(2) + "\n");
    return kOk;
}

// --- run ------------------------------------------------------------------

struct RunArgs {
    TaskArgs task;
    std::string approach = "fpc-g-maximin", planner = "bfs", command, out_dir = "fairplan-out";
    double timeout = 900;
    std::int64_t priority = assign::kDefaultPriority;
    std::size_t max_states = 2'000'000;
};

int cmd_run(const RunArgs& a) {
    harness::Approach approach;
    harness::PlannerAdapter adapter;
    try {
        approach = harness::parse_approach(a.approach);
        adapter = a.command.empty() ? harness::PlannerAdapter::builtin(a.planner, a.timeout, a.max_states)
                                    : harness::PlannerAdapter::external(a.planner, a.command, a.timeout);
        adapter.validate();
    } catch (const std::exception& e) {
        fail(kUsage, "usage", e.what());
    }
    pddl::Task t = a.task.load();
    const fs::path out(a.out_dir);
    const fs::path scratch = fs::path(harness::temp_root()) / ("fairplan-run-" + std::to_string(::getpid()));
    auto rec = harness::run_approach(approach, t, t.problem_name, t.domain_name, adapter,
                                     {a.priority, (out / "task").string(), scratch.string(),
                                      (out / (approach.name() + ".plan")).string()});
    std::error_code ec;
    fs::remove_all(scratch, ec);
    write_output((out / "record.json").string(), harness::to_json(rec).dump(2) + "\n");
    std::cout << rec.approach << ": " << harness::to_string(rec.status);
    if (rec.solved())
        std::cout << ", cost " << *rec.cost << ", gMaximin " << rec.report->g_maximin << ", gPropEq "
                  << rec.report->g_propeq;
    if (!rec.message.empty())
        std::cout << " (" << rec.message << ")";
    std::cout << "\n";
    return rec.solved() ? kOk : kSolver;
}

// --- bench / score --------------------------------------------------------

int cmd_bench(const std::string& config_path, std::string out, std::size_t workers) {
    harness::BenchConfig config;
    json raw;
    try {
        config = harness::load_bench_config(config_path);
        raw = json::parse(pddl::read_file(config_path));
    } catch (const std::exception& e) {
        fail(kInput, "config-error", e.what());
    }
    if (workers)
        config.workers = workers;
    if (out.empty())
        out = raw.value("output", std::string("fairplan-run"));
    auto result = harness::run_bench(config, out);
    std::cout << harness::to_markdown(result.table);
    std::size_t solved = 0;
    for (const auto& r : result.records)
        solved += r.solved() ? 1 : 0;
    std::cerr << solved << "/" << result.records.size() << " runs solved; records in " << out << "\n";
    return kOk;
}

int cmd_score(const std::string& run_dir) {
    harness::ScoreTable table;
    try {
        table = harness::score_table(harness::load_records(run_dir), harness::load_approach_order(run_dir));
    } catch (const std::exception& e) {
        fail(kInput, "input-error", e.what());
    }
    harness::write_scores(table, run_dir);
    std::cout << harness::to_markdown(table);
    return kOk;
}

// --- generate -------------------------------------------------------------

int cmd_generate(const harness::WarehouseSpec& spec, const std::string& out_dir) {
    pddl::Task t;
    try {
        t = harness::generate_warehouse(spec);
    } catch (const std::exception& e) {
        fail(kInput, "infeasible", e.what());
    }
    fs::create_directories(out_dir);
    pddl::write_task(t, (fs::path(out_dir) / "domain.pddl").string(), (fs::path(out_dir) / "problem.pddl").string(),
                     (fs::path(out_dir) / "agents.txt").string());
    std::cout << t.problem_name << ": " << t.goal.size() << " goals, " << t.agents.size() << " agents\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fair goal assignment and cost-aware fair planning for cooperative multi-agent tasks."};
    app.footer(kDialect);
    app.require_subcommand(1);

    AssignArgs assign_args;
    auto* assign_cmd = app.add_subcommand("assign", "assign goals to agents");
    assign_args.task.add(assign_cmd);
    assign_cmd->add_option("-s,--scheme", assign_args.scheme, "fairness scheme")->capture_default_str();
    assign_cmd->add_option("-m,--method", assign_args.method, "milp, brute-force or contract-net")->capture_default_str();
    assign_cmd->add_option("-K,--priority", assign_args.priority, "weight of the fairness term")->capture_default_str();
    assign_cmd->add_option("-o,--out", assign_args.out, "assignment file (default stdout)");

    CompileArgs compile_args;
    auto* compile_cmd = app.add_subcommand("compile", "compile a task for fair planning");
    compile_args.task.add(compile_cmd);
    compile_cmd->add_option("-m,--mode", compile_args.mode, "labeled or fair")->required();
    compile_cmd->add_option("--assignment", compile_args.assignment, "assignment file (labeled mode)");
    compile_cmd->add_option("-s,--scheme", compile_args.scheme, "goal scheme (fair mode)")->capture_default_str();
    compile_cmd->add_option("-K,--priority", compile_args.priority, "reward scale")->capture_default_str();
    compile_cmd->add_option("--reward-cost", compile_args.reward_cost, "function or constant")->capture_default_str();
    compile_cmd->add_option("-o,--out-dir", compile_args.out_dir, "output directory")->capture_default_str();

    EvaluateArgs eval_args;
    auto* eval_cmd = app.add_subcommand("evaluate", "validate a plan and report its fairness");
    eval_args.task.add(eval_cmd);
    eval_cmd->add_option("--plan", eval_args.plan, "plan file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("-o,--out", eval_args.out, "report file (default stdout)");

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "run one approach end to end");
    run_args.task.add(run_cmd);
    run_cmd->add_option("--approach", run_args.approach,
                        "passthrough, contract-net, milp-<scheme>, fpc-g-maximin or fpc-g-propeq")
        ->capture_default_str();
    run_cmd->add_option("--planner", run_args.planner, "bfs, ucs, or a name for --command")->capture_default_str();
    run_cmd->add_option("--command", run_args.command, "external planner, with {domain} {problem} {plan}");
    run_cmd->add_option("-t,--timeout", run_args.timeout, "seconds")->capture_default_str();
    run_cmd->add_option("--max-states", run_args.max_states, "state limit of built-in planners")->capture_default_str();
    run_cmd->add_option("-K,--priority", run_args.priority, "fairness weight")->capture_default_str();
    run_cmd->add_option("-o,--out-dir", run_args.out_dir, "output directory")->capture_default_str();

    std::string bench_config, bench_out;
    std::size_t bench_workers = 0;
    auto* bench_cmd = app.add_subcommand("bench", "run a benchmark matrix and score it");
    bench_cmd->add_option("config", bench_config, "JSON bench config")->required()->check(CLI::ExistingFile);
    bench_cmd->add_option("-o,--out", bench_out, "run directory (default: the config's \"output\")");
    bench_cmd->add_option("-j,--workers", bench_workers, "parallel runs (default: the config's)");

    std::string score_dir;
    auto* score_cmd = app.add_subcommand("score", "recompute scores.json and scores.md from run records");
    score_cmd->add_option("run_dir", score_dir, "run directory")->required()->check(CLI::ExistingDirectory);

    harness::WarehouseSpec spec;
    std::string gen_out = ".";
    auto* gen_cmd = app.add_subcommand("generate", "generate a warehouse task");
    gen_cmd->add_option("--width", spec.width)->capture_default_str();
    gen_cmd->add_option("--height", spec.height)->capture_default_str();
    gen_cmd->add_option("--agents", spec.agents)->capture_default_str();
    gen_cmd->add_option("--work", spec.work, "work locations, black ones included")->capture_default_str();
    gen_cmd->add_option("--black", spec.black, "locations needing a hammer")->capture_default_str();
    gen_cmd->add_option("--hammers", spec.hammers)->capture_default_str();
    gen_cmd->add_option("--seed", spec.seed)->capture_default_str();
    gen_cmd->add_option("-o,--out-dir", gen_out, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*assign_cmd)
            return cmd_assign(assign_args);
        if (*compile_cmd)
            return cmd_compile(compile_args);
        if (*eval_cmd)
            return cmd_evaluate(eval_args);
        if (*run_cmd)
            return cmd_run(run_args);
        if (*bench_cmd)
            return cmd_bench(bench_config, bench_out, bench_workers);
        if (*score_cmd)
            return cmd_score(score_dir);
        if (*gen_cmd)
            return cmd_generate(spec, gen_out);
    } catch (const Failure& f) {
        json err = f.extra;
        err["error"] = f.kind;
        err["message"] = f.message;
        std::cerr << err.dump() << "\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "failure"}, {"message", e.what()}}.dump() << "\n";
        return kSolver;
    }
    return kUsage;
}
