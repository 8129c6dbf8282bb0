#include "fairplan/assign/assignment.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace fairplan::assign {

std::string to_string(Scheme s) {
    switch (s) {
    case Scheme::GoalMaximin: return "goal-maximin";
    case Scheme::GoalPropEq: return "goal-propeq";
    case Scheme::WorkloadMaximin: return "workload-maximin";
    case Scheme::WorkloadPropEq: return "workload-propeq";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(const std::string& text) {
    static const std::map<std::string, Scheme> names = {
        {"goal-maximin", Scheme::GoalMaximin},         {"g-maximin", Scheme::GoalMaximin},
        {"goal-propeq", Scheme::GoalPropEq},           {"g-propeq", Scheme::GoalPropEq},
        {"workload-maximin", Scheme::WorkloadMaximin}, {"w-maximin", Scheme::WorkloadMaximin},
        {"workload-propeq", Scheme::WorkloadPropEq},   {"w-propeq", Scheme::WorkloadPropEq},
    };
    std::string key = text;
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    std::replace(key.begin(), key.end(), '_', '-');
    auto it = names.find(key);
    if (it == names.end())
        return std::nullopt;
    return it->second;
}

std::vector<FactId> assignable_goals(const GroundTask& task) {
    std::vector<FactId> out;
    for (FactId g : task.goals)
        if (!std::binary_search(task.init.begin(), task.init.end(), g))
            out.push_back(g);
    return out;
}

std::size_t AssignmentModel::variable_count() const {
    std::size_t n = 0;
    for (std::size_t a = 0; a < agents.size(); ++a)
        for (std::size_t g = 0; g < goals.size(); ++g)
            n += carries(a, g) ? 1 : 0;
    return n;
}

std::vector<int> AssignmentModel::constraint_families() const {
    switch (scheme) {
    case Scheme::GoalMaximin: return {5, 6};
    case Scheme::GoalPropEq: return {5, 6, 7};
    case Scheme::WorkloadMaximin: return {5, 8};
    case Scheme::WorkloadPropEq: return {5, 8, 9};
    }
    return {};
}

std::string AssignmentModel::lp_text() const {
    auto x = [](std::size_t a, std::size_t g) { return "x_" + std::to_string(a) + "_" + std::to_string(g); };
    const bool goal = is_goal_scheme(scheme);
    const std::string lo = goal ? "minG" : "minW";
    const std::string hi = goal ? "maxG" : "maxW";
    std::ostringstream out;
    out << "\\ " << to_string(scheme) << " assignment, K = " << priority << "\n";
    for (std::size_t a = 0; a < agents.size(); ++a)
        out << "\\ agent " << a << " = " << agents[a] << "\n";
    for (std::size_t g = 0; g < goals.size(); ++g)
        out << "\\ goal " << g << " = " << goals[g] << "\n";
    out << "Maximize\n obj: " << priority << " " << lo;
    if (is_propeq(scheme))
        out << " - " << priority << " " << hi;
    for (std::size_t a = 0; a < agents.size(); ++a)
        for (std::size_t g = 0; g < goals.size(); ++g)
            if (carries(a, g))
                out << " - " << h[a][g].value() << " " << x(a, g);
    out << "\nSubject To\n";
    for (std::size_t g = 0; g < goals.size(); ++g) {
        out << " c5_" << g << ":";
        bool first = true;
        for (std::size_t a = 0; a < agents.size(); ++a)
            if (carries(a, g)) {
                out << (first ? " " : " + ") << x(a, g);
                first = false;
            }
        out << " = 1\n";
    }
    auto per_agent = [&](const std::string& label, const std::string& var, const char* sense) {
        for (std::size_t a = 0; a < agents.size(); ++a) {
            out << " " << label << "_" << a << ": " << var;
            for (std::size_t g = 0; g < goals.size(); ++g)
                if (carries(a, g)) {
                    out << " - ";
                    if (!goal)
                        out << h[a][g].value() << " ";
                    out << x(a, g);
                }
            out << " " << sense << " 0\n";
        }
    };
    per_agent(goal ? "c6" : "c8", lo, "<=");
    if (is_propeq(scheme))
        per_agent(goal ? "c7" : "c9", hi, ">=");
    out << "Bounds\n " << lo << " >= 0\n";
    if (is_propeq(scheme))
        out << " " << hi << " >= 0\n";
    out << "Binary\n";
    for (std::size_t a = 0; a < agents.size(); ++a)
        for (std::size_t g = 0; g < goals.size(); ++g)
            if (carries(a, g))
                out << " " << x(a, g) << "\n";
    out << "General\n " << lo << "\n";
    if (is_propeq(scheme))
        out << " " << hi << "\n";
    out << "End\n";
    return out.str();
}

AssignmentModel make_model(std::vector<std::string> agents, std::vector<std::string> goals,
                           std::vector<std::vector<HeuristicValue>> h, Scheme scheme, std::int64_t priority) {
    if (h.size() != agents.size())
        throw std::invalid_argument("h must have one row per agent");
    for (const auto& row : h)
        if (row.size() != goals.size())
            throw std::invalid_argument("h must have one column per goal");
    for (std::size_t g = 0; g < goals.size(); ++g) {
        bool any = false;
        for (const auto& row : h)
            any = any || row[g].is_finite();
        if (!any)
            throw UnassignableGoal(goals[g]);
    }
    return {scheme, priority, std::move(agents), std::move(goals), std::move(h)};
}

AssignmentModel build_model(const GroundTask& task, Scheme scheme, std::int64_t priority) {
    auto goals = assignable_goals(task);
    auto table = heuristics::achievable(task, task.agents, goals);
    std::vector<std::string> names;
    for (FactId g : goals)
        names.push_back(task.fact_name(g));
    return make_model(task.agents, std::move(names), std::move(table.h), scheme, priority);
}

std::int64_t GoalAssignment::fairness_value(Scheme s) const {
    switch (s) {
    case Scheme::GoalMaximin: return min_goals;
    case Scheme::GoalPropEq: return min_goals - max_goals;
    case Scheme::WorkloadMaximin: return min_workload;
    case Scheme::WorkloadPropEq: return min_workload - max_workload;
    }
    return 0;
}

const std::string& GoalAssignment::agent_for(const std::string& goal) const {
    auto it = std::find(goals.begin(), goals.end(), goal);
    if (it == goals.end())
        throw std::out_of_range("goal " + goal + " is not assigned");
    return agents[agent_of[static_cast<std::size_t>(it - goals.begin())]];
}

GoalAssignment describe(const AssignmentModel& model, std::vector<std::size_t> agent_of, std::string method) {
    GoalAssignment out;
    out.method = std::move(method);
    out.scheme = model.scheme;
    out.priority = model.priority;
    out.agents = model.agents;
    out.goals = model.goals;
    out.agent_of = std::move(agent_of);
    out.goal_counts.assign(model.agents.size(), 0);
    out.workloads.assign(model.agents.size(), 0);
    for (std::size_t g = 0; g < out.agent_of.size(); ++g) {
        std::size_t a = out.agent_of[g];
        out.goal_counts[a] += 1;
        out.workloads[a] += model.h[a][g].value();
        out.cost += model.h[a][g].value();
    }
    if (!model.agents.empty()) {
        auto [gmin, gmax] = std::minmax_element(out.goal_counts.begin(), out.goal_counts.end());
        auto [wmin, wmax] = std::minmax_element(out.workloads.begin(), out.workloads.end());
        out.min_goals = *gmin;
        out.max_goals = *gmax;
        out.min_workload = *wmin;
        out.max_workload = *wmax;
    }
    return out;
}

namespace {

std::vector<std::size_t> name_order(const std::vector<std::string>& names) {
    std::vector<std::size_t> idx(names.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
    return idx;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

class BranchAndBound {
public:
    explicit BranchAndBound(const AssignmentModel& m) : m_(m), n_(static_cast<std::int64_t>(m.agents.size())) {
        goal_order_ = name_order(m.goals);
        auto agent_order = name_order(m.agents);
        const std::size_t depth = goal_order_.size();
        achievers_.resize(depth);
        rem_count_.assign(depth + 1, std::vector<std::int64_t>(m.agents.size(), 0));
        rem_work_.assign(depth + 1, std::vector<std::int64_t>(m.agents.size(), 0));
        rem_min_h_.assign(depth + 1, 0);
        for (std::size_t i = depth; i-- > 0;) {
            std::size_t g = goal_order_[i];
            std::int64_t best = std::numeric_limits<std::int64_t>::max();
            for (std::size_t a : agent_order)
                if (m.carries(a, g)) {
                    achievers_[i].push_back(a);
                    best = std::min(best, m.h[a][g].value());
                }
            rem_min_h_[i] = rem_min_h_[i + 1] + best;
            for (std::size_t a = 0; a < m.agents.size(); ++a) {
                rem_count_[i][a] = rem_count_[i + 1][a] + (m.carries(a, g) ? 1 : 0);
                rem_work_[i][a] = rem_work_[i + 1][a] + (m.carries(a, g) ? m.h[a][g].value() : 0);
            }
        }
        counts_.assign(m.agents.size(), 0);
        work_.assign(m.agents.size(), 0);
        current_.assign(m.goals.size(), 0);
    }

    std::vector<std::size_t> run() {
        dfs(0, 0);
        return best_;
    }

private:
    std::int64_t fairness_bound(std::size_t i) const {
        const std::int64_t total = static_cast<std::int64_t>(m_.goals.size());
        std::int64_t lo_count = std::numeric_limits<std::int64_t>::max();
        std::int64_t lo_work = std::numeric_limits<std::int64_t>::max();
        std::int64_t max_count = 0, max_work = 0, work_sum = 0;
        for (std::size_t a = 0; a < counts_.size(); ++a) {
            lo_count = std::min(lo_count, counts_[a] + rem_count_[i][a]);
            lo_work = std::min(lo_work, work_[a] + rem_work_[i][a]);
            max_count = std::max(max_count, counts_[a]);
            max_work = std::max(max_work, work_[a]);
            work_sum += work_[a];
        }
        switch (m_.scheme) {
        case Scheme::GoalMaximin: return std::min(lo_count, total / n_);
        case Scheme::GoalPropEq: {
            std::int64_t spread = std::max<std::int64_t>({0, max_count - lo_count, ceil_div(total, n_) - lo_count,
                                                          total % n_ ? 1 : 0});
            return -spread;
        }
        case Scheme::WorkloadMaximin: return lo_work;
        case Scheme::WorkloadPropEq: {
            std::int64_t spread = std::max<std::int64_t>(
                {0, max_work - lo_work, ceil_div(work_sum + rem_min_h_[i], n_) - lo_work});
            return -spread;
        }
        }
        return 0;
    }

    std::int64_t fairness_value() const {
        auto [cmin, cmax] = std::minmax_element(counts_.begin(), counts_.end());
        auto [wmin, wmax] = std::minmax_element(work_.begin(), work_.end());
        switch (m_.scheme) {
        case Scheme::GoalMaximin: return *cmin;
        case Scheme::GoalPropEq: return *cmin - *cmax;
        case Scheme::WorkloadMaximin: return *wmin;
        case Scheme::WorkloadPropEq: return *wmin - *wmax;
        }
        return 0;
    }

    void dfs(std::size_t i, std::int64_t cost) {
        if (have_best_) {
            std::int64_t ub = fairness_bound(i);
            std::int64_t lb = cost + rem_min_h_[i];
            if (ub < best_fair_ || (ub == best_fair_ && lb >= best_cost_))
                return;
        }
        if (i == goal_order_.size()) {
            std::int64_t f = fairness_value();
            if (!have_best_ || f > best_fair_ || (f == best_fair_ && cost < best_cost_)) {
                have_best_ = true;
                best_fair_ = f;
                best_cost_ = cost;
                best_ = current_;
            }
            return;
        }
        const std::size_t g = goal_order_[i];
        for (std::size_t a : achievers_[i]) {
            const std::int64_t h = m_.h[a][g].value();
            counts_[a] += 1;
            work_[a] += h;
            current_[g] = a;
            dfs(i + 1, cost + h);
            counts_[a] -= 1;
            work_[a] -= h;
        }
    }

    const AssignmentModel& m_;
    const std::int64_t n_;
    std::vector<std::size_t> goal_order_;
    std::vector<std::vector<std::size_t>> achievers_;  // per depth, agents in name order
    std::vector<std::vector<std::int64_t>> rem_count_;
    std::vector<std::vector<std::int64_t>> rem_work_;
    std::vector<std::int64_t> rem_min_h_;
    std::vector<std::int64_t> counts_, work_;
    std::vector<std::size_t> current_;

    bool have_best_ = false;
    std::int64_t best_fair_ = 0, best_cost_ = 0;
    std::vector<std::size_t> best_;
};

} // namespace

GoalAssignment solve(const AssignmentModel& model) {
    if (model.agents.empty()) {
        if (!model.goals.empty())
            throw UnassignableGoal(model.goals.front());
        return describe(model, {}, "milp");
    }
    return describe(model, BranchAndBound(model).run(), "milp");
}

GoalAssignment brute_force_assignment(const AssignmentModel& model, std::uint64_t bound) {
    const auto goal_order = name_order(model.goals);
    const auto agent_order = name_order(model.agents);
    std::vector<std::vector<std::size_t>> options(goal_order.size());
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < goal_order.size(); ++i) {
        for (std::size_t a : agent_order)
            if (model.carries(a, goal_order[i]))
                options[i].push_back(a);
        if (options[i].empty())
            throw UnassignableGoal(model.goals[goal_order[i]]);
        total *= options[i].size();
        if (total > bound)
            throw BoundExceeded("more than " + std::to_string(bound) + " assignments");
    }

    std::vector<std::size_t> digit(goal_order.size(), 0);
    std::optional<GoalAssignment> best;
    for (;;) {
        std::vector<std::size_t> agent_of(model.goals.size());
        for (std::size_t i = 0; i < goal_order.size(); ++i)
            agent_of[goal_order[i]] = options[i][digit[i]];
        GoalAssignment candidate = describe(model, std::move(agent_of), "brute-force");
        if (!best) {
            best = std::move(candidate);
        } else {
            auto f = candidate.fairness_value(model.scheme);
            auto bf = best->fairness_value(model.scheme);
            if (f > bf || (f == bf && candidate.cost < best->cost))
                best = std::move(candidate);
        }
        // Odometer: the last goal in name order varies fastest.
        std::size_t i = goal_order.size();
        while (i > 0) {
            --i;
            if (++digit[i] < options[i].size())
                break;
            digit[i] = 0;
            if (i == 0) {
                i = goal_order.size() + 1;
                break;
            }
        }
        if (goal_order.empty() || i == goal_order.size() + 1)
            break;
    }
    return *best;
}

GoalAssignment brute_force_assignment(const GroundTask& task, Scheme scheme, std::uint64_t bound) {
    return brute_force_assignment(build_model(task, scheme), bound);
}

} // namespace fairplan::assign
