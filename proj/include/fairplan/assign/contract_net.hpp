#pragma once

#include "fairplan/assign/assignment.hpp"

namespace fairplan::assign {

struct Bid {
    std::string goal;
    std::vector<HeuristicValue> bids;  // per agent
    std::size_t winner = 0;
};

struct BidLedger {
    std::vector<std::string> agents;
    std::vector<std::vector<FactId>> won;             // per agent, in award order
    std::vector<HeuristicValue> bundle_cost;          // h_FF({a}, won(a))
    std::vector<Bid> rounds;                          // one per auctioned goal
};

struct ContractNetResult {
    GoalAssignment assignment;
    BidLedger ledger;
};

// Auctions the assignable goals in declaration order. An agent bids the
// relaxed-plan cost of its won bundle plus the goal; the cheapest finite bid
// wins, ties going to the agent with fewer goals, then the smaller name.
// Goals are never re-auctioned.
ContractNetResult contract_net(const GroundTask& task, std::int64_t priority = kDefaultPriority);
GoalAssignment contract_net_assign(const GroundTask& task, std::int64_t priority = kDefaultPriority);

} // namespace fairplan::assign
