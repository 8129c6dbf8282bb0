#pragma once

#include "fairplan/harness/pipeline.hpp"
#include "fairplan/harness/planner.hpp"
#include "fairplan/harness/scoring.hpp"
#include "fairplan/harness/warehouse.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fairplan::harness {

struct BenchTask {
    std::string id;
    std::string domain;  // table block the task belongs to
    pddl::Task task;
};

struct BenchConfig {
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::int64_t priority = assign::kDefaultPriority;
    std::vector<Approach> approaches;
    PlannerAdapter planner;
    std::vector<BenchTask> tasks;
};

// Config document:
//   {"seed": 1, "workers": 2, "priority": 1000,
//    "approaches": ["passthrough", "milp-g-maximin", "fpc-g-maximin"],
//    "planner": {"name": "bfs", "timeout": 60, "max_states": 1000000},
//    "tasks": [{"domain": "warehouse", "count": 3,
//               "warehouse": {"width": 3, "height": 3, "agents": 2, "work": 3, "black": 1, "hammers": 1}},
//              {"id": "dlog", "domain": "driverlog", "domain_file": "d.pddl",
//               "problem_file": "p.pddl", "agents_file": "agents.txt"}]}
// Generated task k (counted over the whole list) gets seed + k unless its
// entry sets "seed". Relative paths resolve against `base_dir`.
BenchConfig bench_config_from_json(const nlohmann::json& doc, const std::string& base_dir = ".");
BenchConfig load_bench_config(const std::string& path);

// Root for per-worker scratch directories: $FAIRPLAN_TMPDIR, else the system one.
std::string temp_root();

// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::string& path, const std::string& content);

struct BenchResult {
    std::vector<RunRecord> records;  // task-major, approaches in config order
    ScoreTable table;
};

// Layout under run_dir: run.json, tasks/<task>/{original,<approach>}/,
// plans/<task>__<approach>.plan, records/<task>__<approach>.json,
// scores.json, scores.md. Failures of single runs are recorded, not thrown.
BenchResult run_bench(const BenchConfig& config, const std::string& run_dir);

// Records of a finished run, sorted by file name, and the approach order
// stored in run.json.
std::vector<RunRecord> load_records(const std::string& run_dir);
std::vector<std::string> load_approach_order(const std::string& run_dir);

// scores.json and scores.md
void write_scores(const ScoreTable& table, const std::string& run_dir);

} // namespace fairplan::harness
