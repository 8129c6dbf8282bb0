#include "fairplan/harness/bench.hpp"

#include "fairplan/pddl/parser.hpp"
#include "fairplan/pddl/printer.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace fairplan::harness {

namespace fs = std::filesystem;
using nlohmann::json;

BenchConfig bench_config_from_json(const json& doc, const std::string& base_dir) {
    BenchConfig c;
    c.seed = doc.value("seed", std::uint64_t{1});
    c.workers = std::max<std::size_t>(1, doc.value("workers", std::size_t{1}));
    c.priority = doc.value("priority", assign::kDefaultPriority);
    if (!doc.contains("approaches") || doc.at("approaches").empty())
        throw std::invalid_argument("bench config lists no approaches");
    for (const auto& a : doc.at("approaches"))
        c.approaches.push_back(parse_approach(a.get<std::string>()));
    c.planner = adapter_from_json(doc.value("planner", json::object()));

    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (fs::path(base_dir) / p).string(); };
    std::uint64_t generated = 0;
    std::map<std::string, std::size_t> per_domain;
    for (const auto& e : doc.value("tasks", json::array())) {
        if (e.contains("warehouse")) {
            const std::string domain = e.value("domain", std::string("warehouse"));
            const auto& w = e.at("warehouse");
            for (std::size_t k = 0, n = e.value("count", std::size_t{1}); k < n; ++k, ++generated) {
                WarehouseSpec spec;
                spec.width = w.value("width", spec.width);
                spec.height = w.value("height", spec.height);
                spec.agents = w.value("agents", spec.agents);
                spec.work = w.value("work", spec.work);
                spec.black = w.value("black", spec.black);
                spec.hammers = w.value("hammers", spec.hammers);
                spec.seed = (e.contains("seed") ? e.at("seed").get<std::uint64_t>() + k : c.seed + generated);
                std::string id = domain + "-" + std::to_string(++per_domain[domain]);
                c.tasks.push_back({id, domain, generate_warehouse(spec)});
            }
        } else {
            if (!e.contains("domain_file") || !e.contains("problem_file"))
                throw std::invalid_argument("task entry needs \"warehouse\" or domain_file/problem_file");
            pddl::Task t = pddl::load_task(resolve(e.at("domain_file").get<std::string>()),
                                           resolve(e.at("problem_file").get<std::string>()),
                                           e.contains("agents_file") ? resolve(e.at("agents_file").get<std::string>())
                                                                     : std::string());
            const std::string domain = e.value("domain", t.domain_name);
            std::string id = e.value("id", domain + "-" + std::to_string(++per_domain[domain]));
            c.tasks.push_back({id, domain, std::move(t)});
        }
    }
    std::set<std::string> seen;
    for (const auto& t : c.tasks)
        if (!seen.insert(t.id).second)
            throw std::invalid_argument("duplicate task id " + t.id);
    if (c.tasks.empty())
        throw std::invalid_argument("bench config lists no tasks");
    return c;
}

BenchConfig load_bench_config(const std::string& path) {
    json doc;
    try {
        doc = json::parse(pddl::read_file(path));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return bench_config_from_json(doc, fs::path(path).parent_path().string().empty()
                                           ? "."
                                           : fs::path(path).parent_path().string());
}

std::string temp_root() {
    if (const char* env = std::getenv("FAIRPLAN_TMPDIR"); env && *env)
        return env;
    return fs::temp_directory_path().string();
}

void write_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());
    static std::atomic<std::uint64_t> counter{0};
    const fs::path tmp = target.string() + ".tmp." + std::to_string(getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream f(tmp, std::ios::binary);
        f << content;
        f.close();
        if (!f)
            throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, target);
}

namespace {

std::string job_name(const std::string& task, const std::string& approach) { return task + "__" + approach; }

} // namespace

BenchResult run_bench(const BenchConfig& config, const std::string& run_dir) {
    const fs::path root(run_dir);
    fs::create_directories(root / "records");
    fs::create_directories(root / "plans");
    json run{{"version", kRecordFormatVersion}, {"seed", config.seed}, {"priority", config.priority},
             {"planner", to_json(config.planner)}};
    std::vector<std::string> names;
    for (const auto& a : config.approaches)
        names.push_back(a.name());
    run["approaches"] = names;
    json tasks = json::array();
    for (const auto& t : config.tasks) {
        tasks.push_back({{"id", t.id}, {"domain", t.domain}});
        const fs::path dir = root / "tasks" / t.id / "original";
        fs::create_directories(dir);
        write_atomic((dir / "domain.pddl").string(), pddl::emit_domain(t.task));
        write_atomic((dir / "problem.pddl").string(), pddl::emit_problem(t.task));
        write_atomic((dir / "agents.txt").string(), pddl::emit_agents(t.task));
    }
    run["tasks"] = tasks;
    write_atomic((root / "run.json").string(), run.dump(2) + "\n");

    const std::size_t jobs = config.tasks.size() * config.approaches.size();
    std::vector<RunRecord> records(jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&](std::size_t w) {
        const fs::path scratch = fs::path(temp_root()) / ("fairplan-" + std::to_string(getpid()) + "-w" + std::to_string(w));
        for (std::size_t j = next++; j < jobs; j = next++) {
            const BenchTask& t = config.tasks[j / config.approaches.size()];
            const Approach& a = config.approaches[j % config.approaches.size()];
            const std::string name = job_name(t.id, a.name());
            RunOptions opts{config.priority, (root / "tasks" / t.id / a.name()).string(), scratch.string(),
                            (root / "plans" / (name + ".plan")).string()};
            RunRecord rec;
            try {
                rec = run_approach(a, t.task, t.id, t.domain, config.planner, opts);
            } catch (const std::exception& e) {
                rec.approach = a.name();
                rec.task_id = t.id;
                rec.domain = t.domain;
                rec.agents = t.task.agents.size();
                rec.goals = t.task.goal.size();
                rec.status = RunStatus::Failed;
                rec.message = e.what();
            }
            write_atomic((root / "records" / (name + ".json")).string(), to_json(rec).dump(2) + "\n");
            records[j] = std::move(rec);
        }
        std::error_code ec;
        fs::remove_all(scratch, ec);
    };
    std::vector<std::thread> pool;
    const std::size_t width = std::min(config.workers, std::max<std::size_t>(1, jobs));
    for (std::size_t w = 0; w < width; ++w)
        pool.emplace_back(worker, w);
    for (auto& th : pool)
        th.join();

    BenchResult out{std::move(records), {}};
    out.table = score_table(out.records, names);
    write_scores(out.table, run_dir);
    return out;
}

std::vector<RunRecord> load_records(const std::string& run_dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(fs::path(run_dir) / "records"))
        if (e.path().extension() == ".json")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<RunRecord> out;
    for (const auto& f : files) {
        try {
            out.push_back(record_from_json(json::parse(pddl::read_file(f.string()))));
        } catch (const std::exception& e) {
            throw std::invalid_argument(f.string() + ": " + e.what());
        }
    }
    return out;
}

std::vector<std::string> load_approach_order(const std::string& run_dir) {
    const fs::path p = fs::path(run_dir) / "run.json";
    if (!fs::exists(p))
        return {};
    return json::parse(pddl::read_file(p.string())).value("approaches", std::vector<std::string>{});
}

void write_scores(const ScoreTable& table, const std::string& run_dir) {
    write_atomic((fs::path(run_dir) / "scores.json").string(), to_json(table).dump(2) + "\n");
    write_atomic((fs::path(run_dir) / "scores.md").string(), to_markdown(table));
}

} // namespace fairplan::harness
