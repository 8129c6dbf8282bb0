#include "fairplan/harness/warehouse.hpp"

#include "fairplan/pddl/parser.hpp"

#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fairplan::harness {

const std::string& warehouse_domain() {
    static const std::string text = R"((define (domain warehouse)
  (:requirements :typing :action-costs)
  (:types agent hammer location - object
          floor white_location black_location - location)
  (:predicates (at ?a - agent ?l - location)
               (adjacent ?from ?to - location)
               (hammer-at ?h - hammer ?l - location)
               (holding ?a - agent ?h - hammer)
               (hand-free ?a - agent)
               (work-performed ?l - location))
  (:functions (total-cost) - number)
  (:action move
    :parameters (?a - agent ?from ?to - location)
    :precondition (and (at ?a ?from) (adjacent ?from ?to))
    :effect (and (not (at ?a ?from)) (at ?a ?to) (increase (total-cost) 1)))
  (:action pick-up
    :parameters (?a - agent ?h - hammer ?l - location)
    :precondition (and (at ?a ?l) (hammer-at ?h ?l) (hand-free ?a))
    :effect (and (holding ?a ?h) (not (hammer-at ?h ?l)) (not (hand-free ?a)) (increase (total-cost) 0)))
  (:action perform-work
    :parameters (?a - agent ?l - white_location)
    :precondition (at ?a ?l)
    :effect (and (work-performed ?l) (increase (total-cost) 0)))
  (:action perform-work-black-location
    :parameters (?a - agent ?l - black_location ?h - hammer)
    :precondition (and (at ?a ?l) (holding ?a ?h))
    :effect (and (work-performed ?l) (increase (total-cost) 0))))
)";
    return text;
}

std::string warehouse_cell(std::size_t x, std::size_t y) { return "c" + std::to_string(x) + "-" + std::to_string(y); }

namespace {

// Fisher-Yates with a plain modulus so the result does not depend on the
// standard library's distribution implementations.
template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng() % i]);
}

} // namespace

pddl::Task generate_warehouse(const WarehouseSpec& spec) {
    const std::size_t cells = spec.width * spec.height;
    if (spec.width == 0 || spec.height == 0)
        throw std::invalid_argument("warehouse grid must be at least 1x1");
    if (spec.agents == 0)
        throw std::invalid_argument("warehouse needs at least one robot");
    if (spec.black > spec.work)
        throw std::invalid_argument("more black locations than work locations");
    if (spec.work > cells)
        throw std::invalid_argument("more work locations than cells");
    if (spec.hammers > cells - spec.work || spec.agents > cells - spec.work)
        throw std::invalid_argument("robots and hammers must start off the work locations");

    std::mt19937_64 rng(spec.seed);
    std::vector<std::size_t> order(cells);
    for (std::size_t i = 0; i < cells; ++i)
        order[i] = i;
    shuffle(order, rng);
    std::vector<int> role(cells, 0);  // 0 floor, 1 white, 2 black
    for (std::size_t i = 0; i < spec.work; ++i)
        role[order[i]] = i < spec.black ? 2 : 1;
    std::vector<std::size_t> free(order.begin() + static_cast<std::ptrdiff_t>(spec.work), order.end());
    std::vector<std::size_t> hammer_cells(free.begin(), free.begin() + static_cast<std::ptrdiff_t>(spec.hammers));
    shuffle(free, rng);
    std::vector<std::size_t> robot_cells(free.begin(), free.begin() + static_cast<std::ptrdiff_t>(spec.agents));

    auto cell_name = [&](std::size_t i) { return warehouse_cell(i % spec.width + 1, i / spec.width + 1); };
    std::ostringstream p;
    p << "(define (problem warehouse-" << spec.width << "x" << spec.height << "-" << spec.agents << "-" << spec.work
      << "-" << spec.black << "-" << spec.hammers << "-s" << spec.seed << ")\n(:domain warehouse)\n(:objects";
    std::vector<std::string> robots;
    for (std::size_t a = 1; a <= spec.agents; ++a) {
        robots.push_back("robot" + std::to_string(a));
        p << " " << robots.back();
    }
    p << " - agent";
    if (spec.hammers) {
        for (std::size_t h = 1; h <= spec.hammers; ++h)
            p << " hammer" << h;
        p << " - hammer";
    }
    static const char* kRoleType[] = {"floor", "white_location", "black_location"};
    for (std::size_t i = 0; i < cells; ++i)
        p << "\n  " << cell_name(i) << " - " << kRoleType[role[i]];
    p << ")\n(:init\n  (= (total-cost) 0)";
    for (std::size_t a = 0; a < spec.agents; ++a)
        p << "\n  (at " << robots[a] << " " << cell_name(robot_cells[a]) << ") (hand-free " << robots[a] << ")";
    for (std::size_t h = 0; h < spec.hammers; ++h)
        p << "\n  (hammer-at hammer" << h + 1 << " " << cell_name(hammer_cells[h]) << ")";
    for (std::size_t i = 0; i < cells; ++i) {
        const std::size_t x = i % spec.width, y = i / spec.width;
        if (x + 1 < spec.width)
            p << "\n  (adjacent " << cell_name(i) << " " << cell_name(i + 1) << ") (adjacent " << cell_name(i + 1)
              << " " << cell_name(i) << ")";
        if (y + 1 < spec.height)
            p << "\n  (adjacent " << cell_name(i) << " " << cell_name(i + spec.width) << ") (adjacent "
              << cell_name(i + spec.width) << " " << cell_name(i) << ")";
    }
    p << ")\n(:goal (and";
    for (std::size_t i = 0; i < cells; ++i)
        if (role[i])
            p << "\n  (work-performed " << cell_name(i) << ")";
    p << "))\n(:metric minimize (total-cost)))\n";

    pddl::Task task = pddl::parse_problem(p.str(), pddl::parse_domain(warehouse_domain()));
    pddl::set_agents(task, robots);
    return task;
}

} // namespace fairplan::harness
