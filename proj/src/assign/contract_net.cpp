#include "fairplan/assign/contract_net.hpp"

#include <tuple>

namespace fairplan::assign {

ContractNetResult contract_net(const GroundTask& task, std::int64_t priority) {
    const auto goals = assignable_goals(task);
    heuristics::AgentHeuristics heuristics(task);

    BidLedger ledger;
    ledger.agents = task.agents;
    ledger.won.assign(task.agents.size(), {});
    ledger.bundle_cost.assign(task.agents.size(), HeuristicValue(0));

    std::vector<std::size_t> agent_of;
    for (FactId g : goals) {
        Bid round;
        round.goal = task.fact_name(g);
        std::optional<std::size_t> winner;
        for (std::size_t a = 0; a < task.agents.size(); ++a) {
            auto bundle = ledger.won[a];
            bundle.push_back(g);
            HeuristicValue bid = heuristics.h_ff(a, bundle);
            round.bids.push_back(bid);
            if (bid.is_infinite())
                continue;
            auto key = [&](std::size_t x) {
                return std::make_tuple(round.bids[x], ledger.won[x].size(), task.agents[x]);
            };
            if (!winner || key(a) < key(*winner))
                winner = a;
        }
        if (!winner)
            throw UnassignableGoal(round.goal);
        round.winner = *winner;
        ledger.won[*winner].push_back(g);
        ledger.bundle_cost[*winner] = round.bids[*winner];
        ledger.rounds.push_back(std::move(round));
        agent_of.push_back(*winner);
    }

    // Report statistics against single-goal estimates, like the MILP does.
    std::vector<std::string> names;
    std::vector<std::vector<HeuristicValue>> h(task.agents.size());
    for (FactId g : goals) {
        names.push_back(task.fact_name(g));
        for (std::size_t a = 0; a < task.agents.size(); ++a)
            h[a].push_back(heuristics.h_ff(a, {g}));
    }
    AssignmentModel model{Scheme::GoalMaximin, priority, task.agents, std::move(names), std::move(h)};
    GoalAssignment assignment = describe(model, std::move(agent_of), "contract-net");
    assignment.scheme.reset();
    return {std::move(assignment), std::move(ledger)};
}

GoalAssignment contract_net_assign(const GroundTask& task, std::int64_t priority) {
    return contract_net(task, priority).assignment;
}

} // namespace fairplan::assign
