#include "fairplan/assign/assignment_io.hpp"

namespace fairplan::assign {

using nlohmann::json;

json to_json(const GoalAssignment& a) {
    json doc;
    doc["version"] = kAssignmentFormatVersion;
    doc["method"] = a.method;
    doc["scheme"] = a.scheme ? json(to_string(*a.scheme)) : json(nullptr);
    doc["priority"] = a.priority;
    doc["agents"] = a.agents;
    json entries = json::array();
    for (std::size_t g = 0; g < a.goals.size(); ++g)
        entries.push_back({{"goal", a.goals[g]}, {"agent", a.agents[a.agent_of[g]]}});
    doc["assignment"] = entries;
    json per_agent = json::object();
    for (std::size_t i = 0; i < a.agents.size(); ++i)
        per_agent[a.agents[i]] = {{"goals", a.goal_counts[i]}, {"workload", a.workloads[i]}};
    doc["per_agent"] = per_agent;
    doc["minG"] = a.min_goals;
    doc["maxG"] = a.max_goals;
    doc["minW"] = a.min_workload;
    doc["maxW"] = a.max_workload;
    doc["cost"] = a.cost;
    if (a.scheme)
        doc["fairness_value"] = a.fairness_value();
    return doc;
}

GoalAssignment assignment_from_json(const json& doc) {
    if (doc.value("version", 0) != kAssignmentFormatVersion)
        throw std::invalid_argument("unsupported assignment file version");
    GoalAssignment a;
    a.method = doc.value("method", "");
    if (doc.contains("scheme") && doc["scheme"].is_string()) {
        a.scheme = parse_scheme(doc["scheme"].get<std::string>());
        if (!a.scheme)
            throw std::invalid_argument("unknown scheme " + doc["scheme"].get<std::string>());
    }
    a.priority = doc.value("priority", kDefaultPriority);
    a.agents = doc.at("agents").get<std::vector<std::string>>();
    for (const auto& e : doc.at("assignment")) {
        std::string goal = e.at("goal").get<std::string>();
        std::string agent = e.at("agent").get<std::string>();
        auto it = std::find(a.agents.begin(), a.agents.end(), agent);
        if (it == a.agents.end())
            throw std::invalid_argument("assignment names unknown agent " + agent);
        a.goals.push_back(goal);
        a.agent_of.push_back(static_cast<std::size_t>(it - a.agents.begin()));
    }
    a.goal_counts.assign(a.agents.size(), 0);
    a.workloads.assign(a.agents.size(), 0);
    if (doc.contains("per_agent"))
        for (std::size_t i = 0; i < a.agents.size(); ++i)
            if (doc["per_agent"].contains(a.agents[i])) {
                a.goal_counts[i] = doc["per_agent"][a.agents[i]].value("goals", std::int64_t{0});
                a.workloads[i] = doc["per_agent"][a.agents[i]].value("workload", std::int64_t{0});
            }
    a.min_goals = doc.value("minG", std::int64_t{0});
    a.max_goals = doc.value("maxG", std::int64_t{0});
    a.min_workload = doc.value("minW", std::int64_t{0});
    a.max_workload = doc.value("maxW", std::int64_t{0});
    a.cost = doc.value("cost", std::int64_t{0});
    return a;
}

} // namespace fairplan::assign
