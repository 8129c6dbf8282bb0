#include "fairplan/heuristics/relaxed.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

namespace fairplan::heuristics {

GroundTask restrict_to_agent(const GroundTask& task, const std::string& agent) {
    auto idx = task.agent_index(agent);
    if (!idx)
        throw std::invalid_argument("unknown agent '" + agent + "'");
    GroundTask out;
    out.facts = task.facts;
    out.init = task.init;
    out.goals = task.goals;
    out.agents = task.agents;
    out.metric = task.metric;
    out.schema_arity = task.schema_arity;
    for (const auto& a : task.actions)
        if (!a.agent || *a.agent == *idx)
            out.actions.push_back(a);
    out.reindex();
    return out;
}

RelaxedAnalysis::RelaxedAnalysis(const GroundTask& task) : task_(&task) {
    const std::size_t n_facts = task.facts.size();
    for (std::size_t i = 0; i < task.actions.size(); ++i) {
        const auto& a = task.actions[i];
        if (!a.add.empty())
            pieces_.push_back({i, 0, a.pre, a.add, a.cost});
        for (std::size_t c = 0; c < a.conditional.size(); ++c) {
            const auto& ce = a.conditional[c];
            if (ce.add.empty())
                continue;
            std::vector<FactId> pre = a.pre;
            pre.insert(pre.end(), ce.condition.begin(), ce.condition.end());
            std::sort(pre.begin(), pre.end());
            pre.erase(std::unique(pre.begin(), pre.end()), pre.end());
            pieces_.push_back({i, c + 1, std::move(pre), ce.add, a.cost});
        }
    }
    achievers_.assign(n_facts, {});
    std::vector<std::vector<std::size_t>> consumers(n_facts);
    for (std::size_t p = 0; p < pieces_.size(); ++p) {
        for (FactId f : pieces_[p].add)
            achievers_[f].push_back(p);
        for (FactId f : pieces_[p].pre)
            consumers[f].push_back(p);
        piece_name_.push_back(task.actions[pieces_[p].action].signature() + "#" + std::to_string(pieces_[p].part));
    }

    // Relaxed planning graph layers.
    std::vector<int> fact_layer(n_facts, -1);
    piece_layer_.assign(pieces_.size(), -1);
    for (FactId f : task.init)
        fact_layer[f] = 0;
    for (int layer = 1;; ++layer) {
        std::vector<std::size_t> fresh;
        for (std::size_t p = 0; p < pieces_.size(); ++p) {
            if (piece_layer_[p] >= 0)
                continue;
            bool ready = std::all_of(pieces_[p].pre.begin(), pieces_[p].pre.end(),
                                     [&](FactId f) { return fact_layer[f] >= 0 && fact_layer[f] < layer; });
            if (ready)
                fresh.push_back(p);
        }
        if (fresh.empty())
            break;
        for (auto p : fresh) {
            piece_layer_[p] = layer;
            for (FactId f : pieces_[p].add)
                if (fact_layer[f] < 0)
                    fact_layer[f] = layer;
        }
    }

    // h_add by generalised Dijkstra.
    h_add_.assign(n_facts, kUnreached);
    pop_order_.assign(n_facts, std::numeric_limits<std::size_t>::max());
    ready_order_.assign(pieces_.size(), std::numeric_limits<std::size_t>::max());
    std::vector<std::size_t> unsatisfied(pieces_.size());
    std::vector<std::int64_t> piece_cost(pieces_.size());
    using Entry = std::pair<std::int64_t, FactId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    std::size_t order = 0;
    std::size_t ready_counter = 0;

    auto relax_piece = [&](std::size_t p) {
        ready_order_[p] = ready_counter++;
        for (FactId f : pieces_[p].add)
            if (piece_cost[p] < h_add_[f]) {
                h_add_[f] = piece_cost[p];
                queue.push({piece_cost[p], f});
            }
    };
    for (FactId f : task.init) {
        h_add_[f] = 0;
        queue.push({0, f});
    }
    for (std::size_t p = 0; p < pieces_.size(); ++p) {
        unsatisfied[p] = pieces_[p].pre.size();
        piece_cost[p] = pieces_[p].cost;
    }
    for (std::size_t p = 0; p < pieces_.size(); ++p)
        if (unsatisfied[p] == 0)
            relax_piece(p);
    while (!queue.empty()) {
        auto [v, f] = queue.top();
        queue.pop();
        if (pop_order_[f] != std::numeric_limits<std::size_t>::max() || v > h_add_[f])
            continue;
        pop_order_[f] = order++;
        for (auto p : consumers[f]) {
            piece_cost[p] += v;
            if (--unsatisfied[p] == 0)
                relax_piece(p);
        }
    }
}

HeuristicValue RelaxedAnalysis::h_add(FactId f) const {
    return h_add_[f] == kUnreached ? HeuristicValue::infinity() : HeuristicValue(h_add_[f]);
}

std::optional<std::size_t> RelaxedAnalysis::best_supporter(FactId f) const {
    std::optional<std::size_t> best;
    std::tuple<std::int64_t, int, std::string, std::size_t> best_key;
    for (auto p : achievers_[f]) {
        const auto& piece = pieces_[p];
        bool earlier = true;
        std::int64_t value = piece.cost;
        for (FactId q : piece.pre) {
            if (h_add_[q] == kUnreached || pop_order_[q] >= pop_order_[f]) {
                earlier = false;
                break;
            }
            value += h_add_[q];
        }
        if (!earlier)
            continue;
        auto key = std::make_tuple(value, piece_layer_[p], piece_name_[p], p);
        if (!best || key < best_key) {
            best = p;
            best_key = std::move(key);
        }
    }
    return best;
}

std::optional<std::vector<std::size_t>> RelaxedAnalysis::relaxed_plan(const std::vector<FactId>& goals) const {
    std::vector<char> in_init(task_->facts.size(), 0);
    for (FactId f : task_->init)
        in_init[f] = 1;
    std::vector<char> marked(task_->facts.size(), 0);
    std::set<std::size_t> chosen;
    std::vector<FactId> open;
    for (FactId g : goals) {
        if (h_add_[g] == kUnreached)
            return std::nullopt;
        if (!in_init[g] && !marked[g]) {
            marked[g] = 1;
            open.push_back(g);
        }
    }
    while (!open.empty()) {
        FactId f = open.back();
        open.pop_back();
        auto p = best_supporter(f);
        if (!p)
            throw std::logic_error("reachable fact without supporter");
        if (!chosen.insert(*p).second)
            continue;
        for (FactId q : pieces_[*p].pre)
            if (!in_init[q] && !marked[q]) {
                marked[q] = 1;
                open.push_back(q);
            }
    }
    std::vector<std::size_t> plan(chosen.begin(), chosen.end());
    std::sort(plan.begin(), plan.end(), [&](std::size_t a, std::size_t b) { return ready_order_[a] < ready_order_[b]; });
    return plan;
}

HeuristicValue RelaxedAnalysis::h_ff(const std::vector<FactId>& goals) const {
    auto plan = relaxed_plan(goals);
    if (!plan)
        return HeuristicValue::infinity();
    std::int64_t total = 0;
    for (auto p : *plan)
        total += pieces_[p].cost;
    return HeuristicValue(total);
}

HeuristicValue h_ff(const GroundTask& task, const std::vector<FactId>& goals) {
    return RelaxedAnalysis(task).h_ff(goals);
}

AgentHeuristics::AgentHeuristics(const GroundTask& task) : agents_(task.agents) {
    for (const auto& a : agents_) {
        restricted_.push_back(std::make_unique<GroundTask>(restrict_to_agent(task, a)));
        analyses_.push_back(std::make_unique<RelaxedAnalysis>(*restricted_.back()));
    }
}

HeuristicValue AgentHeuristics::h_ff(std::size_t agent, const std::vector<FactId>& goals) const {
    return analyses_.at(agent)->h_ff(goals);
}

std::vector<std::pair<std::size_t, std::size_t>> AchievabilityTable::pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t a = 0; a < agents.size(); ++a)
        for (std::size_t g = 0; g < goals.size(); ++g)
            if (achievable(a, g))
                out.emplace_back(a, g);
    return out;
}

AchievabilityTable achievable(const GroundTask& task, const std::vector<std::string>& agents,
                              const std::vector<FactId>& goals) {
    AchievabilityTable table;
    table.agents = agents;
    table.goals = goals;
    for (const auto& agent : agents) {
        GroundTask restricted = restrict_to_agent(task, agent);
        RelaxedAnalysis analysis(restricted);
        std::vector<HeuristicValue> row;
        for (FactId g : goals)
            row.push_back(analysis.h_ff({g}));
        table.h.push_back(std::move(row));
    }
    return table;
}

} // namespace fairplan::heuristics
