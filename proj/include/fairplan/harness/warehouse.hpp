#pragma once

#include "fairplan/pddl/task.hpp"

#include <cstdint>
#include <string>

namespace fairplan::harness {

// Robots on a grid doing works at some cells; works at black cells need a
// hammer in hand. Moving costs 1, picking up and working are free.
struct WarehouseSpec {
    std::size_t width = 3;
    std::size_t height = 3;
    std::size_t agents = 2;
    std::size_t work = 2;    // work locations, black ones included
    std::size_t black = 0;   // of those, how many need a hammer
    std::size_t hammers = 0;
    std::uint64_t seed = 1;
};

const std::string& warehouse_domain();

// Deterministic in the spec. Throws std::invalid_argument when the
// requested placement does not fit the grid.
pddl::Task generate_warehouse(const WarehouseSpec& spec);

// "c<x>-<y>", 1-based, x along the width.
std::string warehouse_cell(std::size_t x, std::size_t y);

} // namespace fairplan::harness
