#pragma once

#include "fairplan/pddl/task.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fairplan::pddl {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, int line, int column);

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Requirement flags accepted by the parser. Anything else is rejected.
const std::vector<std::string>& supported_requirements();

// Parses the domain half. Identifiers are case-folded to lower case.
Task parse_domain(std::string_view text);

// Completes `domain` with objects, init, goal and metric, type-checking
// every ground atom and every constant referenced by the schemas.
Task parse_problem(std::string_view text, const Task& domain);

// Agent side file: one object name per line, '#' or ';' starts a comment.
std::vector<std::string> parse_agents(std::string_view text);

// Assigns objects of the first-parameter type shared by every schema when
// no agent list is given. Throws std::invalid_argument when there is none.
std::vector<std::string> infer_agents(const Task& task);

// Sets task.agents after checking every name is a declared object.
void set_agents(Task& task, std::vector<std::string> agents);

Task load_task(const std::string& domain_path, const std::string& problem_path,
               const std::string& agents_path = "");

std::string read_file(const std::string& path);

} // namespace fairplan::pddl
