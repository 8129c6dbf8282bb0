#pragma once

#include "fairplan/harness/pipeline.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace fairplan::harness {

inline constexpr double kTimeLimit = 900;

// 1 up to a second, then 1 - log T / log 900, reaching 0 at the limit.
double time_score(double seconds);

// Ratio against the best solved value; equal to the best scores 1, and a
// best of 0 gives every other value 0.
double lower_is_better(double value, double best);
double higher_is_better(double value, double best);

struct TaskScore {
    std::string task_id;
    std::string domain;
    std::string approach;
    bool solved = false;
    double plan_cost = 0, g_maximin = 0, g_propeq = 0, w_maximin = 0, w_propeq = 0, time = 0;
};

struct ScoreRow {
    std::string approach;
    double plan_cost = 0, g_maximin = 0, g_propeq = 0, w_maximin = 0, w_propeq = 0, time = 0;
    std::size_t coverage = 0;
};

struct ScoreBlock {
    std::string name;  // domain, "All Problems" or "Commonly Solved Problems"
    std::size_t tasks = 0;
    double agents_mean = 0, agents_std = 0;
    double goals_mean = 0, goals_std = 0;
    std::vector<ScoreRow> rows;  // one per approach, in table order
};

struct ScoreTable {
    std::vector<std::string> approaches;
    std::vector<ScoreBlock> domains;  // sorted by domain name
    ScoreBlock all;
    ScoreBlock common;  // tasks every approach solved
};

// Per-task scores. Every approach must have exactly one record per task.
// `approaches` fixes the order; empty means order of first appearance.
std::vector<TaskScore> task_scores(const std::vector<RunRecord>& records, std::vector<std::string> approaches = {});

// Throws std::invalid_argument on an empty or incomplete record set.
ScoreTable score_table(const std::vector<RunRecord>& records, std::vector<std::string> approaches = {});

inline constexpr int kScoreFormatVersion = 1;
nlohmann::json to_json(const ScoreTable& t);
// Markdown table with one block per domain followed by the two aggregates.
std::string to_markdown(const ScoreTable& t);

} // namespace fairplan::harness
