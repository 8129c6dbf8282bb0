#include "fairplan/harness/planner.hpp"

#include "fairplan/ground/plan.hpp"
#include "fairplan/harness/search.hpp"
#include "fairplan/pddl/parser.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <regex>
#include <stdexcept>
#include <thread>

namespace fairplan::harness {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

void PlannerAdapter::validate() const {
    if (name.empty())
        throw std::invalid_argument("planner adapter needs a name");
    if (!(timeout > 0))
        throw std::invalid_argument("planner timeout must be positive");
    if (kind == Kind::External)
        for (const char* p : {"{domain}", "{problem}", "{plan}"})
            if (command.find(p) == std::string::npos)
                throw std::invalid_argument("planner command for '" + name + "' lacks the " + p + " placeholder");
    try {
        std::regex re(cost_regex);
    } catch (const std::regex_error& e) {
        throw std::invalid_argument("bad cost regex: " + std::string(e.what()));
    }
}

PlannerAdapter PlannerAdapter::builtin(const std::string& name, double timeout, std::size_t max_states) {
    PlannerAdapter a;
    a.name = name;
    if (name == "bfs")
        a.kind = Kind::Bfs;
    else if (name == "ucs")
        a.kind = Kind::Ucs;
    else
        throw std::invalid_argument("unknown built-in planner '" + name + "' (bfs, ucs)");
    a.timeout = timeout;
    a.max_states = max_states;
    return a;
}

PlannerAdapter PlannerAdapter::external(std::string name, std::string command, double timeout) {
    PlannerAdapter a;
    a.name = std::move(name);
    a.kind = Kind::External;
    a.command = std::move(command);
    a.timeout = timeout;
    return a;
}

PlannerAdapter adapter_from_json(const nlohmann::json& doc) {
    const std::string name = doc.value("name", std::string("bfs"));
    const double timeout = doc.value("timeout", 900.0);
    PlannerAdapter a = doc.contains("command")
                           ? PlannerAdapter::external(name, doc.at("command").get<std::string>(), timeout)
                           : PlannerAdapter::builtin(name, timeout, doc.value("max_states", std::size_t{2'000'000}));
    if (doc.contains("cost_regex"))
        a.cost_regex = doc.at("cost_regex").get<std::string>();
    a.validate();
    return a;
}

nlohmann::json to_json(const PlannerAdapter& a) {
    nlohmann::json doc{{"name", a.name}, {"timeout", a.timeout}, {"cost_regex", a.cost_regex}};
    if (a.kind == PlannerAdapter::Kind::External)
        doc["command"] = a.command;
    else
        doc["max_states"] = a.max_states;
    return doc;
}

std::string to_string(PlannerStatus s) {
    switch (s) {
    case PlannerStatus::Solved: return "solved";
    case PlannerStatus::Unsolvable: return "unsolvable";
    case PlannerStatus::Timeout: return "timeout";
    case PlannerStatus::Failed: return "failed";
    case PlannerStatus::OutOfMemory: return "out-of-memory";
    }
    return "?";
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s)
        out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

namespace {

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void read_plan(const PlannerAdapter& adapter, const std::string& path, PlannerOutcome& out) {
    std::string text;
    try {
        text = pddl::read_file(path);
    } catch (const std::exception&) {
        out.status = PlannerStatus::Failed;
        out.message = "planner wrote no plan file";
        return;
    }
    try {
        out.steps = ground::parse_plan_steps(text);
    } catch (const std::exception& e) {
        out.status = PlannerStatus::Failed;
        out.message = std::string("unreadable plan: ") + e.what();
        return;
    }
    std::smatch m;
    if (std::regex_search(text, m, std::regex(adapter.cost_regex)) && m.size() > 1)
        out.reported_cost = std::stoll(m[1].str());
    out.status = PlannerStatus::Solved;
}

PlannerOutcome run_builtin(const PlannerAdapter& adapter, const TaskFiles& files, double timeout) {
    PlannerOutcome out;
    const auto t0 = Clock::now();
    try {
        pddl::Task dom = pddl::parse_domain(pddl::read_file(files.domain));
        pddl::Task task = pddl::parse_problem(pddl::read_file(files.problem), dom);
        ground::GroundTask g = ground::ground(task);
        SearchLimits limits{adapter.max_states, timeout};
        SearchResult r = adapter.kind == PlannerAdapter::Kind::Ucs ? ucs(g, limits) : bfs(g, limits);
        out.seconds = since(t0);
        switch (r.status) {
        case SearchStatus::Solved: {
            ground::Plan plan{r.plan, r.cost};
            std::ofstream f(files.plan);
            f << ground::format_plan(plan, g);
            f.close();
            if (!f)
                throw std::runtime_error("cannot write " + files.plan);
            out.steps = ground::plan_steps(plan, g);
            out.reported_cost = r.cost;
            out.status = PlannerStatus::Solved;
            break;
        }
        case SearchStatus::Unsolvable:
            out.status = PlannerStatus::Unsolvable;
            out.message = "search space exhausted after " + std::to_string(r.stored) + " states";
            break;
        case SearchStatus::Timeout: out.status = PlannerStatus::Timeout; break;
        case SearchStatus::LimitReached:
            out.status = PlannerStatus::OutOfMemory;
            out.message = "state limit of " + std::to_string(adapter.max_states) + " reached";
            break;
        }
    } catch (const std::bad_alloc&) {
        out.status = PlannerStatus::OutOfMemory;
        out.message = "out of memory";
    } catch (const std::exception& e) {
        out.status = PlannerStatus::Failed;
        out.message = e.what();
    }
    out.seconds = since(t0);
    return out;
}

std::string substitute(std::string cmd, const TaskFiles& files) {
    const std::pair<const char*, const std::string*> subs[] = {
        {"{domain}", &files.domain}, {"{problem}", &files.problem}, {"{plan}", &files.plan}};
    for (const auto& [key, value] : subs)
        for (auto pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos)) {
            const std::string q = shell_quote(*value);
            cmd.replace(pos, std::string(key).size(), q);
            pos += q.size();
        }
    return cmd;
}

PlannerOutcome run_external(const PlannerAdapter& adapter, const TaskFiles& files, double timeout) {
    PlannerOutcome out;
    std::error_code ec;
    fs::remove(files.plan, ec);
    const std::string cmd = substitute(adapter.command, files);
    const std::string log = files.plan + ".log";
    const auto t0 = Clock::now();
    pid_t pid = fork();
    if (pid < 0) {
        out.message = "fork failed";
        return out;
    }
    if (pid == 0) {
        setpgid(0, 0);
        int fd = open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (fd >= 0) {
            dup2(fd, STDOUT_FILENO);
            dup2(fd, STDERR_FILENO);
            close(fd);
        }
        execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    setpgid(pid, pid);
    int status = 0;
    for (;;) {
        pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid)
            break;
        if (r < 0) {
            out.message = "waitpid failed";
            out.seconds = since(t0);
            return out;
        }
        if (since(t0) >= timeout) {
            kill(-pid, SIGKILL);
            waitpid(pid, &status, 0);
            out.status = PlannerStatus::Timeout;
            out.seconds = since(t0);
            out.message = "killed after " + std::to_string(timeout) + " s";
            return out;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    out.seconds = since(t0);
    // stray children of the shell go too
    kill(-pid, SIGKILL);
    if (WIFSIGNALED(status)) {
        out.message = "planner killed by signal " + std::to_string(WTERMSIG(status));
        return out;
    }
    if (WEXITSTATUS(status) != 0 && !fs::exists(files.plan)) {
        out.message = "planner exited with status " + std::to_string(WEXITSTATUS(status));
        return out;
    }
    read_plan(adapter, files.plan, out);
    return out;
}

} // namespace

PlannerOutcome run_planner(const PlannerAdapter& adapter, const TaskFiles& files, double timeout) {
    adapter.validate();
    if (timeout < 0)
        timeout = adapter.timeout;
    if (adapter.kind == PlannerAdapter::Kind::External)
        return run_external(adapter, files, timeout);
    return run_builtin(adapter, files, timeout);
}

} // namespace fairplan::harness
