#include "fairplan/ground/plan.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

namespace fairplan::ground {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<PlanStep> parse_plan_steps(std::string_view text, std::optional<std::int64_t>* reported_cost) {
    static const std::regex cost_re(R"(;\s*cost\s*=\s*(\d+))", std::regex::icase);
    std::vector<PlanStep> steps;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (auto c = line.find(';'); c != std::string::npos) {
            std::smatch m;
            std::string comment = line.substr(c);
            if (reported_cost && std::regex_search(comment, m, cost_re))
                *reported_cost = std::stoll(m[1].str());
            line = trim(line.substr(0, c));
        }
        if (line.empty())
            continue;
        // Optional "12:" or "12.000:" step prefix, as emitted by temporal planners.
        if (auto colon = line.find(':'); colon != std::string::npos && line.front() != '(')
            line = trim(line.substr(colon + 1));
        if (auto bracket = line.rfind(']'); bracket != std::string::npos && line.back() == ']') {
            auto open = line.rfind('[');
            line = trim(line.substr(0, open));
        }
        if (line.size() < 2 || line.front() != '(' || line.back() != ')')
            throw PlanError("expected '(name args...)', found '" + line + "'", line_no);
        std::istringstream words(line.substr(1, line.size() - 2));
        PlanStep step;
        std::string w;
        while (words >> w) {
            if (w.find_first_of("()") != std::string::npos)
                throw PlanError("nested parentheses in plan step", line_no);
            if (step.name.empty())
                step.name = lower(w);
            else
                step.args.push_back(lower(w));
        }
        if (step.name.empty())
            throw PlanError("empty plan step", line_no);
        steps.push_back(std::move(step));
    }
    return steps;
}

Plan resolve_plan(const std::vector<PlanStep>& steps, const GroundTask& task) {
    Plan plan;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        auto idx = task.find_action(steps[i].name, steps[i].args);
        if (!idx) {
            std::string sig = "(" + steps[i].name;
            for (const auto& a : steps[i].args)
                sig += " " + a;
            sig += ")";
            auto schema = task.schema_arity.find(steps[i].name);
            if (schema == task.schema_arity.end())
                throw PlanError("unknown action '" + steps[i].name + "'", static_cast<int>(i + 1));
            if (schema->second != steps[i].args.size())
                throw PlanError("arity mismatch for '" + steps[i].name + "': expected " +
                                    std::to_string(schema->second) + " arguments, found " +
                                    std::to_string(steps[i].args.size()),
                                static_cast<int>(i + 1));
            throw PlanError("unknown ground action " + sig, static_cast<int>(i + 1));
        }
        plan.actions.push_back(*idx);
    }
    return plan;
}

Plan parse_plan(std::string_view text, const GroundTask& task) {
    std::optional<std::int64_t> cost;
    auto steps = parse_plan_steps(text, &cost);
    // Reports line numbers of plan steps, not of raw lines.
    Plan plan = resolve_plan(steps, task);
    plan.reported_cost = cost;
    return plan;
}

std::vector<PlanStep> plan_steps(const Plan& plan, const GroundTask& task) {
    std::vector<PlanStep> out;
    for (auto i : plan.actions)
        out.push_back({task.actions[i].name, task.actions[i].args});
    return out;
}

std::int64_t plan_cost(const Plan& plan, const GroundTask& task) {
    std::int64_t c = 0;
    for (auto i : plan.actions)
        c += task.actions[i].cost;
    return c;
}

std::string format_plan(const Plan& plan, const GroundTask& task) {
    std::string out;
    for (auto i : plan.actions)
        out += task.actions[i].signature() + "\n";
    out += "; cost = " + std::to_string(plan_cost(plan, task)) + " (general cost)\n";
    return out;
}

PlanTrace execute(const GroundTask& task, const Plan& plan) {
    PlanTrace trace;
    trace.states.push_back(task.initial_state());
    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
        const std::size_t idx = plan.actions[i];
        if (idx >= task.actions.size()) {
            trace.failed_step = i;
            trace.error = "step " + std::to_string(i + 1) + " does not name an action of the task";
            return trace;
        }
        const GroundAction& a = task.actions[idx];
        const State& s = trace.states.back();
        if (!applicable(s, a)) {
            trace.failed_step = i;
            for (FactId f : a.pre)
                if (!s.test(f))
                    trace.missing.push_back(f);
            for (FactId f : a.negated_pre)
                if (s.test(f))
                    trace.missing.push_back(f);
            trace.error = "step " + std::to_string(i + 1) + " " + a.signature() + " is not applicable";
            return trace;
        }
        std::vector<std::size_t> fired;
        State next = apply(s, a, fired);
        trace.states.push_back(std::move(next));
        trace.actions.push_back(idx);
        trace.fired.push_back(std::move(fired));
        trace.cost += a.cost;
    }
    for (FactId g : task.goals)
        if (!trace.final_state().test(g))
            trace.missing.push_back(g);
    if (!trace.missing.empty()) {
        trace.error = "plan does not reach the goal";
        return trace;
    }
    trace.valid = true;
    return trace;
}

} // namespace fairplan::ground
