#include "fairplan/harness/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fairplan::harness {

double time_score(double seconds) {
    if (seconds <= 1)
        return 1;
    if (seconds >= kTimeLimit)
        return 0;
    return std::max(0.0, 1 - std::log(seconds) / std::log(kTimeLimit));
}

double lower_is_better(double value, double best) {
    if (value == best)
        return 1;
    return best == 0 ? 0 : best / value;
}

double higher_is_better(double value, double best) {
    if (value == best)
        return 1;
    return best == 0 ? 0 : value / best;
}

namespace {

std::vector<std::string> approach_order(const std::vector<RunRecord>& records, std::vector<std::string> order) {
    if (records.empty())
        throw std::invalid_argument("no run records to score");
    std::set<std::string> present;
    for (const auto& r : records)
        present.insert(r.approach);
    if (order.empty()) {
        for (const auto& r : records)
            if (std::find(order.begin(), order.end(), r.approach) == order.end())
                order.push_back(r.approach);
    }
    for (const auto& a : present)
        if (std::find(order.begin(), order.end(), a) == order.end())
            throw std::invalid_argument("records mention approach " + a + " outside the configured set");
    return order;
}

// task id -> approach -> record
using Grid = std::map<std::string, std::map<std::string, const RunRecord*>>;

Grid grid_of(const std::vector<RunRecord>& records, const std::vector<std::string>& approaches) {
    Grid grid;
    for (const auto& r : records) {
        auto& slot = grid[r.task_id][r.approach];
        if (slot)
            throw std::invalid_argument("duplicate record for " + r.approach + " on " + r.task_id);
        slot = &r;
    }
    for (const auto& [task, row] : grid)
        for (const auto& a : approaches)
            if (!row.count(a))
                throw std::invalid_argument("approach " + a + " has no record for task " + task);
    return grid;
}

} // namespace

std::vector<TaskScore> task_scores(const std::vector<RunRecord>& records, std::vector<std::string> approaches) {
    approaches = approach_order(records, std::move(approaches));
    Grid grid = grid_of(records, approaches);
    std::vector<TaskScore> out;
    for (const auto& [task, row] : grid) {
        std::optional<double> cost, gmax, gpe, wmax, wpe;
        auto lower = [](std::optional<double>& best, double v) { best = best ? std::min(*best, v) : v; };
        auto higher = [](std::optional<double>& best, double v) { best = best ? std::max(*best, v) : v; };
        for (const auto& [_, r] : row) {
            if (!r->solved())
                continue;
            lower(cost, static_cast<double>(*r->cost));
            higher(gmax, static_cast<double>(r->report->g_maximin));
            lower(gpe, static_cast<double>(r->report->g_propeq));
            higher(wmax, static_cast<double>(r->report->w_maximin));
            lower(wpe, static_cast<double>(r->report->w_propeq));
        }
        for (const auto& a : approaches) {
            const RunRecord& r = *row.at(a);
            TaskScore s{task, r.domain, a};
            if (r.solved()) {
                s.solved = true;
                s.plan_cost = lower_is_better(static_cast<double>(*r.cost), *cost);
                s.g_maximin = higher_is_better(static_cast<double>(r.report->g_maximin), *gmax);
                s.g_propeq = lower_is_better(static_cast<double>(r.report->g_propeq), *gpe);
                s.w_maximin = higher_is_better(static_cast<double>(r.report->w_maximin), *wmax);
                s.w_propeq = lower_is_better(static_cast<double>(r.report->w_propeq), *wpe);
                s.time = time_score(r.time);
            }
            out.push_back(std::move(s));
        }
    }
    return out;
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
    if (v.empty())
        return {0, 0};
    double sum = 0;
    for (double x : v)
        sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double sq = 0;
    for (double x : v)
        sq += (x - mean) * (x - mean);
    return {mean, std::sqrt(sq / static_cast<double>(v.size()))};
}

ScoreBlock block(const std::string& name, const std::set<std::string>& tasks, const std::vector<TaskScore>& scores,
                 const Grid& grid, const std::vector<std::string>& approaches) {
    ScoreBlock b;
    b.name = name;
    b.tasks = tasks.size();
    std::vector<double> n, g;
    for (const auto& t : tasks) {
        const RunRecord* any = grid.at(t).begin()->second;
        n.push_back(static_cast<double>(any->agents));
        g.push_back(static_cast<double>(any->goals));
    }
    std::tie(b.agents_mean, b.agents_std) = mean_std(n);
    std::tie(b.goals_mean, b.goals_std) = mean_std(g);
    for (const auto& a : approaches) {
        ScoreRow row{a};
        for (const auto& s : scores) {
            if (s.approach != a || !tasks.count(s.task_id))
                continue;
            row.plan_cost += s.plan_cost;
            row.g_maximin += s.g_maximin;
            row.g_propeq += s.g_propeq;
            row.w_maximin += s.w_maximin;
            row.w_propeq += s.w_propeq;
            row.time += s.time;
            row.coverage += s.solved ? 1 : 0;
        }
        b.rows.push_back(row);
    }
    return b;
}

} // namespace

ScoreTable score_table(const std::vector<RunRecord>& records, std::vector<std::string> approaches) {
    ScoreTable t;
    t.approaches = approach_order(records, std::move(approaches));
    Grid grid = grid_of(records, t.approaches);
    auto scores = task_scores(records, t.approaches);
    std::map<std::string, std::set<std::string>> by_domain;
    std::set<std::string> all, common;
    for (const auto& [task, row] : grid) {
        by_domain[row.begin()->second->domain].insert(task);
        all.insert(task);
        if (std::all_of(row.begin(), row.end(), [](const auto& e) { return e.second->solved(); }))
            common.insert(task);
    }
    for (const auto& [domain, tasks] : by_domain)
        t.domains.push_back(block(domain, tasks, scores, grid, t.approaches));
    t.all = block("All Problems", all, scores, grid, t.approaches);
    t.common = block("Commonly Solved Problems", common, scores, grid, t.approaches);
    return t;
}

namespace {

nlohmann::json block_json(const ScoreBlock& b) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : b.rows)
        rows.push_back({{"approach", r.approach},
                        {"plan_cost", r.plan_cost},
                        {"g_maximin", r.g_maximin},
                        {"g_propeq", r.g_propeq},
                        {"w_maximin", r.w_maximin},
                        {"w_propeq", r.w_propeq},
                        {"total_time", r.time},
                        {"coverage", r.coverage}});
    return {{"name", b.name},
            {"tasks", b.tasks},
            {"agents", {{"mean", b.agents_mean}, {"std", b.agents_std}}},
            {"goals", {{"mean", b.goals_mean}, {"std", b.goals_std}}},
            {"rows", rows}};
}

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

} // namespace

nlohmann::json to_json(const ScoreTable& t) {
    nlohmann::json domains = nlohmann::json::array();
    for (const auto& d : t.domains)
        domains.push_back(block_json(d));
    return {{"version", kScoreFormatVersion},
            {"approaches", t.approaches},
            {"domains", domains},
            {"all", block_json(t.all)},
            {"common", block_json(t.common)}};
}

std::string to_markdown(const ScoreTable& t) {
    std::ostringstream out;
    out << "| Problems | \\|N\\| | \\|G\\| | Approach | Plan Cost | G-Maximin | G-Propeq | W-Maximin | W-Propeq | "
           "Total Time | Coverage |\n";
    out << "|---|---|---|---|---|---|---|---|---|---|---|\n";
    auto emit = [&](const ScoreBlock& b) {
        for (std::size_t i = 0; i < b.rows.size(); ++i) {
            const auto& r = b.rows[i];
            if (i == 0)
                out << "| " << b.name << " (" << b.tasks << ") | " << fixed(b.agents_mean, 1) << " ± "
                    << fixed(b.agents_std, 1) << " | " << fixed(b.goals_mean, 1) << " ± " << fixed(b.goals_std, 1)
                    << " ";
            else
                out << "| | | ";
            out << "| " << r.approach << " | " << fixed(r.plan_cost) << " | " << fixed(r.g_maximin) << " | "
                << fixed(r.g_propeq) << " | " << fixed(r.w_maximin) << " | " << fixed(r.w_propeq) << " | "
                << fixed(r.time) << " | " << r.coverage << " |\n";
        }
    };
    for (const auto& d : t.domains)
        emit(d);
    emit(t.all);
    emit(t.common);
    return out.str();
}

} // namespace fairplan::harness
