#pragma once

#include "fairplan/pddl/type_tree.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fairplan::pddl {

inline bool is_variable(const std::string& term) { return !term.empty() && term.front() == '?'; }

struct TypedName {
    std::string name;  // variables keep their leading '?'
    std::string type = kRootType;

    auto operator<=>(const TypedName&) const = default;
};

// Lifted or ground atom; equality literals use the predicate "=".
struct Atom {
    std::string predicate;
    std::vector<std::string> args;

    bool is_equality() const { return predicate == "="; }
    std::string str() const;

    auto operator<=>(const Atom&) const = default;
};

struct Literal {
    Atom atom;
    bool negated = false;

    auto operator<=>(const Literal&) const = default;
};

struct Predicate {
    std::string name;
    std::vector<TypedName> params;

    std::size_t arity() const { return params.size(); }
    auto operator<=>(const Predicate&) const = default;
};

struct FunctionDecl {
    std::string name;
    std::vector<TypedName> params;

    auto operator<=>(const FunctionDecl&) const = default;
};

// Amount added to total-cost: a constant or a numeric function term.
struct CostExpr {
    std::int64_t constant = 0;
    std::optional<Atom> function;

    auto operator<=>(const CostExpr&) const = default;
};

struct ConditionalEffect {
    std::vector<Literal> condition;
    std::vector<Literal> effect;  // positive = add, negated = delete

    auto operator<=>(const ConditionalEffect&) const = default;
};

struct ActionSchema {
    std::string name;
    std::vector<TypedName> params;
    std::vector<Literal> precondition;
    std::vector<Literal> effect;  // unconditional adds and deletes
    std::vector<ConditionalEffect> conditional;
    std::optional<CostExpr> cost;  // absent: no total-cost increase

    std::vector<Atom> adds() const;
    std::vector<Atom> deletes() const;
    const TypedName* param(const std::string& var) const;

    auto operator<=>(const ActionSchema&) const = default;
};

struct NumericInit {
    Atom term;
    std::int64_t value = 0;

    auto operator<=>(const NumericInit&) const = default;
};

enum class Metric { None, MinimizeTotalCost };

struct Task {
    std::string domain_name;
    std::string problem_name;
    std::vector<std::string> requirements;
    TypeTree types;
    std::vector<Predicate> predicates;
    std::vector<FunctionDecl> functions;
    std::vector<TypedName> constants;
    std::vector<ActionSchema> actions;

    std::vector<TypedName> objects;
    std::vector<Atom> init;
    std::vector<NumericInit> numeric_init;
    std::vector<Atom> goal;  // declaration order is preserved
    Metric metric = Metric::None;

    // Agent object names; not part of the PDDL text.
    std::vector<std::string> agents;

    const Predicate* predicate(const std::string& name) const;
    const ActionSchema* action(const std::string& name) const;
    const FunctionDecl* function(const std::string& name) const;
    // Type of a problem object or domain constant, if declared.
    std::optional<std::string> object_type(const std::string& name) const;
    // Objects and constants whose type is a subtype of `type`.
    std::vector<std::string> objects_of(const std::string& type) const;
    bool is_agent(const std::string& object) const;

    // True when some schema increases total-cost; otherwise unit costs apply.
    bool has_cost_model() const;
    // Most specific type covering every agent object.
    std::string agent_type() const;
};

// Sets compared as sets; declaration order of types, schemas, objects,
// atoms, and agents does not matter. Goal order is ignored too.
bool semantically_equal(const Task& a, const Task& b);

// Returns a copy with every order-insensitive collection sorted.
Task canonical(const Task& task);

} // namespace fairplan::pddl
