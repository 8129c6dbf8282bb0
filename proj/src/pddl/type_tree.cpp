#include "fairplan/pddl/type_tree.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace fairplan::pddl {

TypeTree::TypeTree() { parents_[kRootType]; }

void TypeTree::declare(const std::string& child, const std::string& parent) {
    if (child == kRootType) {
        if (parent != kRootType)
            throw std::invalid_argument("type 'object' cannot have a parent");
        return;
    }
    if (!parents_.count(child))
        order_.push_back(child);
    auto& set = parents_[child];
    set.insert(parent);
    if (!parents_.count(parent)) {
        parents_[parent];
        if (parent != kRootType)
            order_.push_back(parent);
    }
}

std::set<std::string> TypeTree::ancestors(const std::string& type) const {
    std::set<std::string> seen;
    std::vector<std::string> stack{type};
    while (!stack.empty()) {
        auto t = stack.back();
        stack.pop_back();
        auto it = parents_.find(t);
        if (it == parents_.end())
            continue;
        for (const auto& p : it->second)
            if (seen.insert(p).second)
                stack.push_back(p);
    }
    return seen;
}

void TypeTree::normalize() {
    // Undeclared parents are implicitly children of the root.
    for (auto& [type, parents] : parents_)
        if (type != kRootType && parents.empty())
            parents.insert(kRootType);

    // Cycle detection: depth-first search with colours.
    std::map<std::string, int> colour;
    std::function<void(const std::string&)> visit = [&](const std::string& t) {
        colour[t] = 1;
        for (const auto& p : parents_.at(t)) {
            if (colour[p] == 1)
                throw std::invalid_argument("cyclic type declaration involving '" + t + "'");
            if (colour[p] == 0)
                visit(p);
        }
        colour[t] = 2;
    };
    for (const auto& [t, _] : parents_)
        if (colour[t] == 0)
            visit(t);

    for (auto& [type, parents] : parents_) {
        if (parents.size() < 2)
            continue;
        std::set<std::string> minimal;
        for (const auto& p : parents) {
            bool redundant = false;
            for (const auto& q : parents)
                if (q != p && ancestors(q).count(p))
                    redundant = true;
            if (!redundant)
                minimal.insert(p);
        }
        parents = std::move(minimal);
    }
}

bool TypeTree::is_subtype(const std::string& type, const std::string& ancestor) const {
    if (type == ancestor || ancestor == kRootType)
        return true;
    return ancestors(type).count(ancestor) != 0;
}

bool TypeTree::compatible(const std::string& a, const std::string& b) const {
    return is_subtype(a, b) || is_subtype(b, a);
}

const std::set<std::string>& TypeTree::parents(const std::string& type) const {
    auto it = parents_.find(type);
    if (it == parents_.end())
        throw std::invalid_argument("unknown type '" + type + "'");
    return it->second;
}

std::string TypeTree::common_ancestor(const std::vector<std::string>& types) const {
    if (types.empty())
        return kRootType;
    auto candidates = ancestors(types.front());
    candidates.insert(types.front());
    for (std::size_t i = 1; i < types.size(); ++i) {
        auto other = ancestors(types[i]);
        other.insert(types[i]);
        std::set<std::string> both;
        std::set_intersection(candidates.begin(), candidates.end(), other.begin(), other.end(),
                              std::inserter(both, both.begin()));
        candidates = std::move(both);
    }
    // Pick the candidate with no other candidate below it; ties by name.
    for (const auto& c : candidates) {
        bool most_specific = true;
        for (const auto& d : candidates)
            if (d != c && is_subtype(d, c))
                most_specific = false;
        if (most_specific)
            return c;
    }
    return kRootType;
}

} // namespace fairplan::pddl
