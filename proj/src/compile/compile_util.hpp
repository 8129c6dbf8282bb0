#pragma once

#include "fairplan/pddl/task.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fairplan::compile::detail {

// `base`, or `base-1`, `base-2`, ... whichever is not taken.
std::string fresh(const std::string& base, const std::function<bool(const std::string&)>& taken);

// (= ?v obj) for every variable argument of `lifted`, against the ground goal.
std::vector<pddl::Literal> equality_pins(const pddl::Atom& lifted, const pddl::Atom& goal);

void add_requirements(pddl::Task& task, const std::vector<std::string>& flags);

bool has_predicate(const pddl::Task& t, const std::string& name);

} // namespace fairplan::compile::detail
