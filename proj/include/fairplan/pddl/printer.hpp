#pragma once

#include "fairplan/pddl/task.hpp"

#include <string>

namespace fairplan::pddl {

std::string emit_domain(const Task& task);
std::string emit_problem(const Task& task);
std::string emit_agents(const Task& task);

struct PddlText {
    std::string domain;
    std::string problem;
};

inline PddlText emit_pddl(const Task& task) { return {emit_domain(task), emit_problem(task)}; }

void write_task(const Task& task, const std::string& domain_path, const std::string& problem_path,
                const std::string& agents_path = "");

} // namespace fairplan::pddl
