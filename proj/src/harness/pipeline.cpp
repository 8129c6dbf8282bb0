#include "fairplan/harness/pipeline.hpp"

#include "fairplan/assign/assignment_io.hpp"
#include "fairplan/assign/contract_net.hpp"
#include "fairplan/compile/compile.hpp"
#include "fairplan/ground/plan.hpp"
#include "fairplan/pddl/printer.hpp"

#include <chrono>
#include <filesystem>
#include <stdexcept>

namespace fairplan::harness {

namespace fs = std::filesystem;
using nlohmann::json;

std::string short_name(Scheme s) {
    switch (s) {
    case Scheme::GoalMaximin: return "g-maximin";
    case Scheme::GoalPropEq: return "g-propeq";
    case Scheme::WorkloadMaximin: return "w-maximin";
    case Scheme::WorkloadPropEq: return "w-propeq";
    }
    return "?";
}

std::string Approach::name() const {
    switch (kind) {
    case Kind::Passthrough: return "passthrough";
    case Kind::ContractNet: return "contract-net";
    case Kind::Milp: return "milp-" + short_name(*scheme);
    case Kind::Fpc: return "fpc-" + short_name(*scheme);
    }
    return "?";
}

Approach parse_approach(const std::string& name) {
    if (name == "passthrough")
        return {Approach::Kind::Passthrough, std::nullopt};
    if (name == "contract-net")
        return {Approach::Kind::ContractNet, std::nullopt};
    for (auto [prefix, kind] : {std::pair{"milp-", Approach::Kind::Milp}, std::pair{"fpc-", Approach::Kind::Fpc}}) {
        const std::string p = prefix;
        if (name.rfind(p, 0) != 0)
            continue;
        auto scheme = assign::parse_scheme(name.substr(p.size()));
        if (!scheme)
            break;
        if (kind == Approach::Kind::Fpc && !assign::is_goal_scheme(*scheme))
            throw std::invalid_argument("approach " + name + ": the fairness compilation supports goal schemes only");
        return {kind, scheme};
    }
    throw std::invalid_argument("unknown approach '" + name +
                                "' (passthrough, contract-net, milp-<scheme>, fpc-g-maximin, fpc-g-propeq)");
}

std::string to_string(RunStatus s) {
    switch (s) {
    case RunStatus::Solved: return "solved";
    case RunStatus::Unsolvable: return "unsolvable";
    case RunStatus::Timeout: return "timeout";
    case RunStatus::Failed: return "failed";
    case RunStatus::OutOfMemory: return "out-of-memory";
    case RunStatus::InvalidPlan: return "invalid-plan";
    case RunStatus::AssignmentFailed: return "assignment-failed";
    case RunStatus::CompileFailed: return "compile-failed";
    }
    return "?";
}

RunStatus parse_run_status(const std::string& s) {
    for (auto st : {RunStatus::Solved, RunStatus::Unsolvable, RunStatus::Timeout, RunStatus::Failed,
                    RunStatus::OutOfMemory, RunStatus::InvalidPlan, RunStatus::AssignmentFailed,
                    RunStatus::CompileFailed})
        if (to_string(st) == s)
            return st;
    throw std::invalid_argument("unknown run status '" + s + "'");
}

namespace {

template <class T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_field(const json& doc, const char* key) {
    if (!doc.contains(key) || doc.at(key).is_null())
        return std::nullopt;
    return doc.at(key).get<T>();
}

} // namespace

json to_json(const RunRecord& r) {
    json doc;
    doc["version"] = kRecordFormatVersion;
    doc["approach"] = r.approach;
    doc["task"] = r.task_id;
    doc["domain"] = r.domain;
    doc["agents"] = r.agents;
    doc["goals"] = r.goals;
    doc["status"] = to_string(r.status);
    doc["solved"] = r.solved();
    doc["raw_cost"] = optional_json(r.raw_cost);
    doc["cost"] = optional_json(r.cost);
    doc["time"] = r.time;
    doc["planner_time"] = r.planner_time;
    doc["report"] = r.report ? eval::to_json(*r.report) : json(nullptr);
    doc["assignment"] = r.assignment ? assign::to_json(*r.assignment) : json(nullptr);
    doc["partition"] = optional_json(r.partition);
    doc["message"] = r.message;
    return doc;
}

RunRecord record_from_json(const json& doc) {
    if (doc.value("version", 0) != kRecordFormatVersion)
        throw std::invalid_argument("unsupported run record version");
    RunRecord r;
    r.approach = doc.at("approach").get<std::string>();
    r.task_id = doc.at("task").get<std::string>();
    r.domain = doc.at("domain").get<std::string>();
    r.agents = doc.at("agents").get<std::size_t>();
    r.goals = doc.at("goals").get<std::size_t>();
    r.status = parse_run_status(doc.at("status").get<std::string>());
    r.raw_cost = optional_field<std::int64_t>(doc, "raw_cost");
    r.cost = optional_field<std::int64_t>(doc, "cost");
    r.time = doc.at("time").get<double>();
    r.planner_time = doc.value("planner_time", 0.0);
    if (!doc.at("report").is_null())
        r.report = eval::report_from_json(doc.at("report"));
    if (!doc.at("assignment").is_null())
        r.assignment = assign::assignment_from_json(doc.at("assignment"));
    r.partition = optional_field<std::vector<std::size_t>>(doc, "partition");
    r.message = doc.value("message", std::string());
    if (r.solved() && (!r.cost || !r.report))
        throw std::invalid_argument("solved record without cost or report");
    return r;
}

namespace {

using Clock = std::chrono::steady_clock;

RunStatus from_planner(PlannerStatus s) {
    switch (s) {
    case PlannerStatus::Solved: return RunStatus::Solved;
    case PlannerStatus::Unsolvable: return RunStatus::Unsolvable;
    case PlannerStatus::Timeout: return RunStatus::Timeout;
    case PlannerStatus::Failed: return RunStatus::Failed;
    case PlannerStatus::OutOfMemory: return RunStatus::OutOfMemory;
    }
    return RunStatus::Failed;
}

} // namespace

RunRecord run_approach(const Approach& approach, const pddl::Task& task, const std::string& task_id,
                       const std::string& domain, const PlannerAdapter& adapter, const RunOptions& options) {
    const auto t0 = Clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };
    RunRecord rec;
    rec.approach = approach.name();
    rec.task_id = task_id;
    rec.domain = domain;
    rec.agents = task.agents.size();
    rec.goals = task.goal.size();
    auto finish = [&](RunStatus status, std::string message) {
        rec.status = status;
        rec.message = std::move(message);
        if (rec.time == 0)
            rec.time = elapsed();
        return rec;
    };

    ground::GroundTask original;
    std::optional<compile::Compilation> compiled;
    try {
        original = ground::ground(task);
        switch (approach.kind) {
        case Approach::Kind::Passthrough: break;
        case Approach::Kind::ContractNet:
            rec.assignment = assign::contract_net_assign(original, options.priority);
            break;
        case Approach::Kind::Milp:
            rec.assignment = assign::solve(assign::build_model(original, *approach.scheme, options.priority));
            break;
        case Approach::Kind::Fpc: break;
        }
    } catch (const assign::UnassignableGoal& e) {
        return finish(RunStatus::AssignmentFailed, e.what());
    } catch (const std::exception& e) {
        return finish(RunStatus::Failed, e.what());
    }
    try {
        if (rec.assignment)
            compiled = compile::compile_labeled(task, *rec.assignment);
        else if (approach.kind == Approach::Kind::Fpc)
            compiled = compile::compile_fair(task, *approach.scheme, {options.priority});
    } catch (const std::exception& e) {
        return finish(RunStatus::CompileFailed, e.what());
    }
    const pddl::Task& planned = compiled ? compiled->task : task;

    fs::create_directories(options.task_dir);
    fs::create_directories(options.scratch_dir);
    TaskFiles files{(fs::path(options.task_dir) / "domain.pddl").string(),
                    (fs::path(options.task_dir) / "problem.pddl").string(),
                    (fs::path(options.scratch_dir) / (rec.approach + ".plan")).string()};
    pddl::write_task(planned, files.domain, files.problem);

    const double remaining = adapter.timeout - elapsed();
    if (remaining <= 0)
        return finish(RunStatus::Timeout, "assignment and compilation used the whole time budget");
    PlannerOutcome out = run_planner(adapter, files, remaining);
    rec.planner_time = out.seconds;
    rec.time = elapsed();
    if (out.status != PlannerStatus::Solved)
        return finish(from_planner(out.status), out.message);
    if (!options.plan_path.empty()) {
        fs::create_directories(fs::path(options.plan_path).parent_path());
        std::error_code ec;
        fs::copy_file(files.plan, options.plan_path, fs::copy_options::overwrite_existing, ec);
    }

    // validate on the planned task, then on the original one
    try {
        ground::GroundTask planned_ground = compiled ? ground::ground(planned) : original;
        ground::PlanTrace trace = ground::execute(planned_ground, ground::resolve_plan(out.steps, planned_ground));
        if (!trace.valid)
            return finish(RunStatus::InvalidPlan, "plan invalid on the planned task: " + trace.error);
        rec.raw_cost = trace.cost;
        std::int64_t stripped = trace.cost;
        if (compiled) {
            for (auto idx : trace.actions)
                if (compiled->is_reward(planned_ground.actions[idx].name))
                    stripped -= planned_ground.actions[idx].cost;
            rec.partition = compile::rewarded_partition(*compiled, out.steps);
        }
        auto projected = compiled ? compile::project_plan(*compiled, out.steps) : out.steps;
        ground::PlanTrace back = ground::execute(original, ground::resolve_plan(projected, original));
        if (!back.valid)
            return finish(RunStatus::InvalidPlan, "projected plan invalid on the original task: " + back.error);
        if (back.cost != stripped)
            return finish(RunStatus::InvalidPlan, "projected plan costs " + std::to_string(back.cost) + ", expected " +
                                                      std::to_string(stripped));
        rec.cost = stripped;
        rec.report = eval::fairness_report(original, back);
    } catch (const std::exception& e) {
        return finish(RunStatus::InvalidPlan, e.what());
    }
    return finish(RunStatus::Solved, "");
}

} // namespace fairplan::harness
