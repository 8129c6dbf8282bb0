#include "fairplan/eval/fairness.hpp"

#include <algorithm>

namespace fairplan::eval {

std::vector<Achievement> first_achievers(const GroundTask& task, const PlanTrace& trace) {
    std::vector<Achievement> out;
    const auto& init = trace.states.front();
    for (FactId g : task.goals) {
        for (std::size_t i = 0; i < trace.actions.size(); ++i) {
            if (trace.states[i].test(g) || !trace.states[i + 1].test(g))
                continue;
            out.push_back({g, i, task.actions[trace.actions[i]].agent, init.test(g)});
            break;
        }
    }
    return out;
}

namespace {

std::pair<std::int64_t, std::int64_t> min_max(const std::vector<std::int64_t>& v) {
    if (v.empty())
        return {0, 0};
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return {*lo, *hi};
}

} // namespace

FairnessReport fairness_report(const GroundTask& task, const PlanTrace& trace) {
    FairnessReport r;
    r.agents = task.agents;
    r.goal_counts.assign(task.agents.size(), 0);
    r.workloads.assign(task.agents.size(), 0);
    for (auto idx : trace.actions) {
        const auto& a = task.actions[idx];
        r.cost += a.cost;
        if (a.agent)
            r.workloads[*a.agent] += a.cost;
    }
    r.steps = trace.actions.size();
    auto achieved = first_achievers(task, trace);
    for (FactId g : task.goals) {
        auto it = std::find_if(achieved.begin(), achieved.end(), [&](const Achievement& x) { return x.goal == g; });
        if (it == achieved.end()) {
            r.unattributed.push_back(task.fact_name(g));
            continue;
        }
        FairnessReport::Credit c{task.fact_name(g), std::nullopt, it->step, it->initially_true};
        if (it->agent) {
            c.agent = task.agents[*it->agent];
            r.goal_counts[*it->agent] += 1;
        }
        r.credits.push_back(std::move(c));
    }
    auto [gmin, gmax] = min_max(r.goal_counts);
    auto [wmin, wmax] = min_max(r.workloads);
    r.g_maximin = gmin;
    r.g_propeq = gmax - gmin;
    r.w_maximin = wmin;
    r.w_propeq = wmax - wmin;
    return r;
}

using nlohmann::json;

json to_json(const FairnessReport& r) {
    json doc;
    doc["version"] = kReportFormatVersion;
    json per_agent = json::object();
    for (std::size_t i = 0; i < r.agents.size(); ++i)
        per_agent[r.agents[i]] = {{"goals", r.goal_counts[i]}, {"workload", r.workloads[i]}};
    doc["agents"] = r.agents;
    doc["per_agent"] = per_agent;
    doc["g_maximin"] = r.g_maximin;
    doc["g_propeq"] = r.g_propeq;
    doc["w_maximin"] = r.w_maximin;
    doc["w_propeq"] = r.w_propeq;
    json credits = json::array();
    for (const auto& c : r.credits) {
        json e = {{"goal", c.goal}, {"step", c.step}, {"agent", c.agent ? json(*c.agent) : json(nullptr)}};
        if (c.reachieved_initial)
            e["note"] = "re-achieved non-assignable goal";
        credits.push_back(std::move(e));
    }
    doc["first_achievers"] = credits;
    doc["unattributed"] = r.unattributed;
    doc["cost"] = r.cost;
    doc["steps"] = r.steps;
    return doc;
}

FairnessReport report_from_json(const json& doc) {
    if (doc.value("version", 0) != kReportFormatVersion)
        throw std::invalid_argument("unsupported report version");
    FairnessReport r;
    r.agents = doc.at("agents").get<std::vector<std::string>>();
    for (const auto& a : r.agents) {
        r.goal_counts.push_back(doc.at("per_agent").at(a).at("goals").get<std::int64_t>());
        r.workloads.push_back(doc.at("per_agent").at(a).at("workload").get<std::int64_t>());
    }
    r.g_maximin = doc.at("g_maximin").get<std::int64_t>();
    r.g_propeq = doc.at("g_propeq").get<std::int64_t>();
    r.w_maximin = doc.at("w_maximin").get<std::int64_t>();
    r.w_propeq = doc.at("w_propeq").get<std::int64_t>();
    for (const auto& e : doc.at("first_achievers")) {
        FairnessReport::Credit c{e.at("goal").get<std::string>(), std::nullopt, e.at("step").get<std::size_t>(),
                                 e.contains("note")};
        if (e.at("agent").is_string())
            c.agent = e.at("agent").get<std::string>();
        r.credits.push_back(std::move(c));
    }
    r.unattributed = doc.at("unattributed").get<std::vector<std::string>>();
    r.cost = doc.at("cost").get<std::int64_t>();
    r.steps = doc.at("steps").get<std::size_t>();
    return r;
}

} // namespace fairplan::eval
