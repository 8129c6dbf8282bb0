#pragma once

#include "fairplan/ground/plan.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fairplan::eval {

using ground::FactId;
using ground::GroundTask;
using ground::PlanTrace;

struct Achievement {
    FactId goal;
    std::size_t step;                  // index of the achieving step
    std::optional<std::size_t> agent;  // none for agentless steps
    bool initially_true = false;       // true in I, deleted, then restored
};

// For every goal, the first step whose pre-state lacks it and whose
// post-state has it. Goals that hold throughout have no entry.
std::vector<Achievement> first_achievers(const GroundTask& task, const PlanTrace& trace);

struct FairnessReport {
    std::vector<std::string> agents;
    std::vector<std::int64_t> goal_counts;  // first-achieved goals per agent
    std::vector<std::int64_t> workloads;    // summed action cost per agent
    std::int64_t g_maximin = 0, g_propeq = 0;
    std::int64_t w_maximin = 0, w_propeq = 0;

    struct Credit {
        std::string goal;
        std::optional<std::string> agent;
        std::size_t step;
        bool reachieved_initial;
    };
    std::vector<Credit> credits;
    std::vector<std::string> unattributed;  // goals no step made true
    std::int64_t cost = 0;
    std::size_t steps = 0;
};

FairnessReport fairness_report(const GroundTask& task, const PlanTrace& trace);

inline constexpr int kReportFormatVersion = 1;
nlohmann::json to_json(const FairnessReport& r);
FairnessReport report_from_json(const nlohmann::json& doc);

} // namespace fairplan::eval
