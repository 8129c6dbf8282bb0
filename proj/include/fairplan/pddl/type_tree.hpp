#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace fairplan::pddl {

inline constexpr const char* kRootType = "object";

// Type hierarchy rooted at "object". A type normally has one parent; a type
// may keep several parents when the declarations name incomparable ancestors
// (e.g. `driver - locatable` together with `driver - agent`).
class TypeTree {
public:
    TypeTree();

    // Records `child - parent`. Parent sets are minimized by normalize().
    void declare(const std::string& child, const std::string& parent = kRootType);

    // Drops parents that are ancestors of other parents of the same type.
    // Throws std::invalid_argument on cycles or undeclared parents.
    void normalize();

    bool contains(const std::string& type) const { return parents_.count(type) != 0; }
    bool is_subtype(const std::string& type, const std::string& ancestor) const;
    // True when one type is a subtype of the other.
    bool compatible(const std::string& a, const std::string& b) const;

    const std::set<std::string>& parents(const std::string& type) const;
    // Declaration order, excluding the root.
    const std::vector<std::string>& types() const { return order_; }

    // Most specific type that is an ancestor-or-self of every input.
    std::string common_ancestor(const std::vector<std::string>& types) const;

    bool operator==(const TypeTree& other) const { return parents_ == other.parents_; }

private:
    std::set<std::string> ancestors(const std::string& type) const;

    std::map<std::string, std::set<std::string>> parents_;
    std::vector<std::string> order_;
};

} // namespace fairplan::pddl
