#include "fairplan/pddl/printer.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fairplan::pddl {

namespace {

void typed(std::ostream& out, const std::vector<TypedName>& names) {
    for (const auto& n : names)
        out << " " << n.name << " - " << n.type;
}

std::string literal(const Literal& l) {
    return l.negated ? "(not " + l.atom.str() + ")" : l.atom.str();
}

void conjunction(std::ostream& out, const std::vector<Literal>& lits, const char* indent) {
    out << "(and\n";
    for (const auto& l : lits)
        out << indent << literal(l) << "\n";
    out << ")\n";
}

void action(std::ostream& out, const ActionSchema& a) {
    out << "(:action " << a.name << "\n:parameters (";
    typed(out, a.params);
    out << ")\n";
    out << ":precondition ";
    conjunction(out, a.precondition, "");
    out << ":effect (and\n";
    for (const auto& l : a.effect)
        out << literal(l) << "\n";
    for (const auto& c : a.conditional) {
        out << "(when\n(and";
        for (const auto& l : c.condition)
            out << " " << literal(l);
        out << ")\n(and";
        for (const auto& l : c.effect)
            out << " " << literal(l);
        out << ")\n)\n";
    }
    if (a.cost) {
        out << "(increase (total-cost) ";
        if (a.cost->function)
            out << a.cost->function->str();
        else
            out << a.cost->constant;
        out << ")\n";
    }
    out << ")\n)\n";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

} // namespace

std::string emit_domain(const Task& task) {
    std::ostringstream out;
    out << "(define (domain " << task.domain_name << ")\n";
    if (!task.requirements.empty()) {
        out << "(:requirements";
        for (const auto& r : task.requirements)
            out << " " << r;
        out << ")\n";
    }
    out << "(:types\n";
    for (const auto& t : task.types.types())
        for (const auto& p : task.types.parents(t))
            out << " " << t << " - " << p << "\n";
    out << ")\n";
    if (!task.constants.empty()) {
        out << "(:constants\n";
        for (const auto& c : task.constants)
            out << " " << c.name << " - " << c.type << "\n";
        out << ")\n";
    }
    out << "\n(:predicates\n";
    for (const auto& p : task.predicates) {
        out << "(" << p.name;
        typed(out, p.params);
        out << ")\n";
    }
    out << ")\n\n(:functions\n";
    for (const auto& f : task.functions) {
        out << "(" << f.name;
        typed(out, f.params);
        out << ")\n";
    }
    out << ")\n";
    for (const auto& a : task.actions) {
        out << "\n";
        action(out, a);
    }
    out << ")\n";
    return out.str();
}

std::string emit_problem(const Task& task) {
    std::ostringstream out;
    out << "(define (problem " << task.problem_name << ")\n(:domain " << task.domain_name << ")\n(:objects\n";
    for (const auto& o : task.objects)
        out << o.name << " - " << o.type << "\n";
    out << ")\n\n(:init\n";
    auto init = task.init;
    std::sort(init.begin(), init.end());
    for (const auto& a : init)
        out << a.str() << "\n";
    auto numeric = task.numeric_init;
    std::sort(numeric.begin(), numeric.end());
    for (const auto& n : numeric)
        out << "(= " << n.term.str() << " " << n.value << ")\n";
    if (task.metric == Metric::MinimizeTotalCost)
        out << "(= (total-cost) 0)\n";
    out << ")\n\n(:goal (and\n";
    for (const auto& g : task.goal)
        out << g.str() << "\n";
    out << "))\n";
    if (task.metric == Metric::MinimizeTotalCost)
        out << "(:metric minimize (total-cost))\n";
    out << ")\n";
    return out.str();
}

std::string emit_agents(const Task& task) {
    std::string out;
    for (const auto& a : task.agents)
        out += a + "\n";
    return out;
}

void write_task(const Task& task, const std::string& domain_path, const std::string& problem_path,
                const std::string& agents_path) {
    write_text(domain_path, emit_domain(task));
    write_text(problem_path, emit_problem(task));
    if (!agents_path.empty())
        write_text(agents_path, emit_agents(task));
}

} // namespace fairplan::pddl
