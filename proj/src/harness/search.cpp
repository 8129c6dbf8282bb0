#include "fairplan/harness/search.hpp"

#include <algorithm>
#include <chrono>
#include <queue>
#include <unordered_map>

namespace fairplan::harness {

SuccessorGenerator::SuccessorGenerator(const GroundTask& task) : task_(&task), by_fact_(task.facts.size()) {
    for (std::size_t i = 0; i < task.actions.size(); ++i) {
        const auto& pre = task.actions[i].pre;
        if (pre.empty())
            unconditional_.push_back(i);
        else
            by_fact_[pre.front()].push_back(i);
    }
}

void SuccessorGenerator::applicable(const State& s, std::vector<std::size_t>& out) const {
    out.clear();
    for (auto i : unconditional_)
        if (ground::applicable(s, task_->actions[i]))
            out.push_back(i);
    s.for_each([&](FactId f) {
        for (auto i : by_fact_[f])
            if (ground::applicable(s, task_->actions[i]))
                out.push_back(i);
    });
    std::sort(out.begin(), out.end());
}

std::string to_string(SearchStatus s) {
    switch (s) {
    case SearchStatus::Solved: return "solved";
    case SearchStatus::Unsolvable: return "unsolvable";
    case SearchStatus::LimitReached: return "state-limit";
    case SearchStatus::Timeout: return "timeout";
    }
    return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

class Deadline {
public:
    explicit Deadline(double seconds)
        : active_(seconds > 0),
          at_(Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds))) {}
    // Only looks at the clock every 256 calls.
    bool passed() {
        if (!active_ || (++calls_ & 255) != 0)
            return false;
        return Clock::now() >= at_;
    }

private:
    bool active_;
    Clock::time_point at_;
    std::uint64_t calls_ = 0;
};

struct Graph {
    std::vector<State> states;
    std::vector<std::int64_t> parent;
    std::vector<std::size_t> via;
    std::vector<std::int64_t> g;
    std::unordered_map<State, std::size_t, ground::StateHash> index;

    // (id, inserted)
    std::pair<std::size_t, bool> add(State s, std::int64_t from, std::size_t action, std::int64_t cost) {
        auto [it, fresh] = index.emplace(s, states.size());
        if (!fresh)
            return {it->second, false};
        states.push_back(std::move(s));
        parent.push_back(from);
        via.push_back(action);
        g.push_back(cost);
        return {it->second, true};
    }

    std::vector<std::size_t> path(std::size_t id) const {
        std::vector<std::size_t> out;
        for (std::int64_t n = static_cast<std::int64_t>(id); parent[n] >= 0; n = parent[n])
            out.push_back(via[n]);
        std::reverse(out.begin(), out.end());
        return out;
    }
};

SearchResult solved(const Graph& graph, std::size_t id, std::size_t expanded) {
    SearchResult r;
    r.status = SearchStatus::Solved;
    r.plan = graph.path(id);
    r.cost = graph.g[id];
    r.expanded = expanded;
    r.stored = graph.states.size();
    return r;
}

SearchResult stopped(SearchStatus status, const Graph& graph, std::size_t expanded) {
    SearchResult r;
    r.status = status;
    r.expanded = expanded;
    r.stored = graph.states.size();
    return r;
}

} // namespace

SearchResult bfs(const GroundTask& task, const SearchLimits& limits) {
    SuccessorGenerator succ(task);
    Graph graph;
    Deadline deadline(limits.timeout);
    graph.add(task.initial_state(), -1, 0, 0);
    if (task.is_goal(graph.states[0]))
        return solved(graph, 0, 0);
    std::vector<std::size_t> ops;
    std::size_t expanded = 0;
    for (std::size_t head = 0; head < graph.states.size(); ++head) {
        if (deadline.passed())
            return stopped(SearchStatus::Timeout, graph, expanded);
        ++expanded;
        succ.applicable(graph.states[head], ops);
        for (auto op : ops) {
            const auto& a = task.actions[op];
            auto [id, fresh] = graph.add(ground::apply(graph.states[head], a), static_cast<std::int64_t>(head), op,
                                         graph.g[head] + a.cost);
            if (!fresh)
                continue;
            if (task.is_goal(graph.states[id]))
                return solved(graph, id, expanded);
            if (graph.states.size() > limits.max_states)
                return stopped(SearchStatus::LimitReached, graph, expanded);
        }
    }
    return stopped(SearchStatus::Unsolvable, graph, expanded);
}

SearchResult ucs(const GroundTask& task, const SearchLimits& limits) {
    SuccessorGenerator succ(task);
    Graph graph;
    Deadline deadline(limits.timeout);
    graph.add(task.initial_state(), -1, 0, 0);
    using Item = std::pair<std::int64_t, std::size_t>;  // (g, id); ids break ties FIFO
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    open.push({0, 0});
    std::vector<bool> closed;
    std::vector<std::size_t> ops;
    std::size_t expanded = 0;
    while (!open.empty()) {
        auto [g, id] = open.top();
        open.pop();
        if (closed.size() < graph.states.size())
            closed.resize(graph.states.size(), false);
        if (closed[id] || g > graph.g[id])
            continue;
        closed[id] = true;
        if (task.is_goal(graph.states[id]))
            return solved(graph, id, expanded);
        if (deadline.passed())
            return stopped(SearchStatus::Timeout, graph, expanded);
        ++expanded;
        succ.applicable(graph.states[id], ops);
        for (auto op : ops) {
            const auto& a = task.actions[op];
            const std::int64_t cost = g + a.cost;
            auto [next, fresh] = graph.add(ground::apply(graph.states[id], a), static_cast<std::int64_t>(id), op, cost);
            if (!fresh) {
                if (next < closed.size() && closed[next])
                    continue;
                if (cost >= graph.g[next])
                    continue;
                graph.g[next] = cost;
                graph.parent[next] = static_cast<std::int64_t>(id);
                graph.via[next] = op;
            }
            open.push({cost, next});
            if (graph.states.size() > limits.max_states)
                return stopped(SearchStatus::LimitReached, graph, expanded);
        }
    }
    return stopped(SearchStatus::Unsolvable, graph, expanded);
}

namespace {

struct AugKey {
    State state;
    std::uint64_t credited = 0;        // bit i: goal i has its first achiever
    std::vector<std::int64_t> tally;   // per-agent counts or workloads

    bool operator==(const AugKey&) const = default;
};

struct AugHash {
    std::size_t operator()(const AugKey& k) const {
        std::size_t h = k.state.hash() ^ (k.credited * 0x9e3779b97f4a7c15ULL);
        for (auto v : k.tally)
            h = (h ^ static_cast<std::size_t>(v)) * 0x100000001b3ULL;
        return h;
    }
};

struct Node {
    AugKey key;
    std::int64_t cost;
    std::int64_t parent;
    std::size_t action;
    std::size_t depth;
};

std::int64_t scheme_value(assign::Scheme s, const std::vector<std::int64_t>& v) {
    if (v.empty())
        return 0;
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return assign::is_propeq(s) ? *hi - *lo : *lo;
}

} // namespace

std::optional<BrutePlan> brute_force_plan(const GroundTask& task, std::size_t horizon,
                                          const PlanObjective& objective, std::size_t bound) {
    const bool goal_tally = objective.scheme && assign::is_goal_scheme(*objective.scheme);
    const bool work_tally = objective.scheme && !goal_tally;
    if (goal_tally && task.goals.size() > 64)
        throw assign::BoundExceeded("brute-force planning tracks at most 64 goals");
    std::vector<std::int64_t> goal_slot(task.facts.size(), -1);
    for (std::size_t i = 0; i < task.goals.size(); ++i)
        if (goal_slot[task.goals[i]] < 0)
            goal_slot[task.goals[i]] = static_cast<std::int64_t>(i);

    SuccessorGenerator succ(task);
    std::vector<Node> nodes;
    std::unordered_map<AugKey, std::int64_t, AugHash> best;
    AugKey root{task.initial_state(), 0, {}};
    if (objective.scheme)
        root.tally.assign(task.agents.size(), 0);
    best.emplace(root, 0);
    nodes.push_back({root, 0, -1, 0, 0});
    std::vector<std::size_t> layer{0}, ops;

    // lower is better: (scheme key, cost, steps); discovery order settles the rest
    auto rank = [&](const Node& n) {
        std::int64_t key = 0;
        if (objective.scheme) {
            std::int64_t v = scheme_value(*objective.scheme, n.key.tally);
            key = assign::is_propeq(*objective.scheme) ? v : -v;
        }
        return std::make_tuple(key, n.cost, n.depth);
    };
    std::optional<std::size_t> winner;
    auto consider = [&](std::size_t id) {
        if (!task.is_goal(nodes[id].key.state))
            return;
        if (!winner || rank(nodes[id]) < rank(nodes[*winner]))
            winner = id;
    };
    consider(0);

    for (std::size_t depth = 0; depth < horizon && !layer.empty(); ++depth) {
        std::unordered_map<AugKey, std::size_t, AugHash> next_index;
        std::vector<std::size_t> next;
        for (auto id : layer) {
            succ.applicable(nodes[id].key.state, ops);
            for (auto op : ops) {
                const auto& a = task.actions[op];
                const AugKey& from = nodes[id].key;
                AugKey key{ground::apply(from.state, a), from.credited, from.tally};
                if (goal_tally && a.agent) {
                    for (FactId g : task.goals) {
                        const auto slot = static_cast<std::uint64_t>(goal_slot[g]);
                        if (from.state.test(g) || !key.state.test(g) || ((key.credited >> slot) & 1U))
                            continue;
                        key.credited |= std::uint64_t{1} << slot;
                        key.tally[*a.agent] += 1;
                    }
                } else if (goal_tally) {
                    // an agentless step still spends the goal's first achievement
                    for (FactId g : task.goals)
                        if (!from.state.test(g) && key.state.test(g))
                            key.credited |= std::uint64_t{1} << static_cast<std::uint64_t>(goal_slot[g]);
                }
                if (work_tally && a.agent)
                    key.tally[*a.agent] += a.cost;
                const std::int64_t cost = nodes[id].cost + a.cost;
                auto seen = best.find(key);
                if (seen != best.end() && seen->second <= cost)
                    continue;
                best[key] = cost;
                auto pending = next_index.find(key);
                if (pending != next_index.end()) {
                    Node& n = nodes[pending->second];
                    n.cost = cost;
                    n.parent = static_cast<std::int64_t>(id);
                    n.action = op;
                    continue;
                }
                if (nodes.size() >= bound)
                    throw assign::BoundExceeded("brute-force planning exceeded " + std::to_string(bound) +
                                                " search nodes");
                next_index.emplace(key, nodes.size());
                next.push_back(nodes.size());
                nodes.push_back({std::move(key), cost, static_cast<std::int64_t>(id), op, depth + 1});
            }
        }
        for (auto id : next)
            consider(id);
        layer = std::move(next);
    }
    if (!winner)
        return std::nullopt;

    BrutePlan out;
    for (std::int64_t n = static_cast<std::int64_t>(*winner); nodes[n].parent >= 0; n = nodes[n].parent)
        out.actions.push_back(nodes[n].action);
    std::reverse(out.actions.begin(), out.actions.end());
    out.cost = nodes[*winner].cost;
    // recompute both tallies from the plan itself
    out.goal_counts.assign(task.agents.size(), 0);
    out.workloads.assign(task.agents.size(), 0);
    State s = task.initial_state();
    std::vector<bool> credited(task.goals.size(), false);
    for (auto op : out.actions) {
        const auto& a = task.actions[op];
        State t = ground::apply(s, a);
        for (FactId g : task.goals) {
            const auto slot = static_cast<std::size_t>(goal_slot[g]);
            if (s.test(g) || !t.test(g) || credited[slot])
                continue;
            credited[slot] = true;
            if (a.agent)
                out.goal_counts[*a.agent] += 1;
        }
        if (a.agent)
            out.workloads[*a.agent] += a.cost;
        s = std::move(t);
    }
    if (objective.scheme)
        out.fairness = scheme_value(*objective.scheme,
                                    assign::is_goal_scheme(*objective.scheme) ? out.goal_counts : out.workloads);
    return out;
}

} // namespace fairplan::harness
