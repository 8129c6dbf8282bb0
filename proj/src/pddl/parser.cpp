#include "fairplan/pddl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fairplan::pddl {

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line), column_(column) {}

const std::vector<std::string>& supported_requirements() {
    static const std::vector<std::string> flags = {
        ":strips",           ":typing",          ":equality", ":negative-preconditions",
        ":conditional-effects", ":action-costs",
    };
    return flags;
}

namespace {

struct Node {
    bool list = false;
    std::string symbol;
    std::vector<Node> items;
    int line = 1;
    int column = 1;

    bool is(const char* s) const { return !list && symbol == s; }
    [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line, column); }
    const Node& at(std::size_t i) const {
        if (!list || i >= items.size())
            fail("malformed expression");
        return items[i];
    }
    const std::string& sym() const {
        if (list)
            fail("expected a name, found a list");
        return symbol;
    }
};

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    Node read_document() {
        skip();
        if (pos_ >= text_.size())
            throw ParseError("empty input", line_, col_);
        Node n = read();
        skip();
        if (pos_ < text_.size())
            throw ParseError("trailing content after definition", line_, col_);
        return n;
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    Node read() {
        skip();
        if (pos_ >= text_.size())
            throw ParseError("unexpected end of input", line_, col_);
        Node n;
        n.line = line_;
        n.column = col_;
        char c = text_[pos_];
        if (c == ')')
            throw ParseError("unbalanced ')'", line_, col_);
        if (c == '(') {
            n.list = true;
            advance();
            for (;;) {
                skip();
                if (pos_ >= text_.size())
                    throw ParseError("missing ')' for list opened here", n.line, n.column);
                if (text_[pos_] == ')') {
                    advance();
                    break;
                }
                n.items.push_back(read());
            }
            return n;
        }
        while (pos_ < text_.size()) {
            char d = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';')
                break;
            n.symbol.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(d))));
            advance();
        }
        return n;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// name list with optional "- type" groups
std::vector<TypedName> typed_list(const Node& list, std::size_t from, bool variables) {
    std::vector<TypedName> out;
    std::vector<std::string> pending;
    for (std::size_t i = from; i < list.items.size(); ++i) {
        const Node& n = list.items[i];
        if (n.is("-")) {
            if (i + 1 >= list.items.size())
                n.fail("missing type after '-'");
            const Node& t = list.items[i + 1];
            if (t.list)
                t.fail("'either' types are not supported");
            if (pending.empty())
                n.fail("type annotation without names");
            for (auto& p : pending)
                out.push_back({p, t.symbol});
            pending.clear();
            ++i;
            continue;
        }
        const std::string& s = n.sym();
        if (variables != is_variable(s))
            n.fail(variables ? "expected a variable, found '" + s + "'" : "unexpected variable '" + s + "'");
        pending.push_back(s);
    }
    for (auto& p : pending)
        out.push_back({p, kRootType});
    return out;
}

std::int64_t parse_integer(const Node& n) {
    const std::string& s = n.sym();
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size() || v < 0 || std::floor(v) != v)
            n.fail("expected a nonnegative integer, found '" + s + "'");
        return static_cast<std::int64_t>(v);
    } catch (const std::logic_error&) {
        n.fail("expected a number, found '" + s + "'");
    }
}

Atom read_atom(const Node& n) {
    if (!n.list || n.items.empty())
        n.fail("expected an atom");
    Atom a;
    a.predicate = n.at(0).sym();
    for (std::size_t i = 1; i < n.items.size(); ++i)
        a.args.push_back(n.items[i].sym());
    return a;
}

bool is_unsupported_connective(const std::string& s) {
    return s == "or" || s == "imply" || s == "forall" || s == "exists" || s == "either" || s == "preference";
}

Literal read_literal(const Node& n) {
    if (!n.list || n.items.empty())
        n.fail("expected a literal");
    const std::string& head = n.at(0).sym();
    if (is_unsupported_connective(head))
        n.fail("unsupported condition '" + head + "'");
    if (head == "not") {
        if (n.items.size() != 2)
            n.fail("'not' takes exactly one argument");
        Literal l = read_literal(n.items[1]);
        if (l.negated)
            n.fail("nested negation is not supported");
        l.negated = true;
        return l;
    }
    if (head == "and" || head == "when" || head == "increase")
        n.fail("unexpected '" + head + "' inside a condition literal");
    Literal l{read_atom(n), false};
    if (l.atom.is_equality() && l.atom.args.size() != 2)
        n.fail("equality takes exactly two terms");
    return l;
}

std::vector<Literal> read_condition(const Node& n) {
    if (!n.list)
        n.fail("expected a condition");
    if (n.items.empty())
        return {};
    if (n.at(0).is("and")) {
        std::vector<Literal> out;
        for (std::size_t i = 1; i < n.items.size(); ++i) {
            const Node& c = n.items[i];
            if (c.list && !c.items.empty() && c.items[0].is("and")) {
                auto inner = read_condition(c);
                out.insert(out.end(), inner.begin(), inner.end());
            } else {
                out.push_back(read_literal(c));
            }
        }
        return out;
    }
    return {read_literal(n)};
}

class DomainBuilder {
public:
    Task build(const Node& root) {
        if (!root.list || root.items.size() < 2 || !root.at(0).is("define"))
            root.fail("expected (define (domain ...) ...)");
        const Node& head = root.at(1);
        if (!head.list || head.items.size() != 2 || !head.at(0).is("domain"))
            head.fail("expected (domain <name>)");
        task_.domain_name = head.at(1).sym();

        std::map<std::string, const Node*> sections;
        std::vector<const Node*> actions;
        for (std::size_t i = 2; i < root.items.size(); ++i) {
            const Node& s = root.items[i];
            if (!s.list || s.items.empty())
                s.fail("expected a domain section");
            const std::string& key = s.at(0).sym();
            if (key == ":action") {
                actions.push_back(&s);
                continue;
            }
            static const std::set<std::string> known = {":requirements", ":types", ":constants", ":predicates",
                                                        ":functions"};
            if (!known.count(key))
                s.at(0).fail("unsupported domain section '" + key + "'");
            if (sections.count(key))
                s.fail("duplicate section '" + key + "'");
            sections[key] = &s;
        }
        if (auto it = sections.find(":requirements"); it != sections.end())
            requirements(*it->second);
        if (auto it = sections.find(":types"); it != sections.end())
            types(*it->second);
        try {
            task_.types.normalize();
        } catch (const std::invalid_argument& e) {
            root.fail(e.what());
        }
        if (auto it = sections.find(":constants"); it != sections.end())
            constants(*it->second);
        if (auto it = sections.find(":predicates"); it != sections.end())
            predicates(*it->second);
        if (auto it = sections.find(":functions"); it != sections.end())
            functions(*it->second);
        for (const Node* a : actions)
            action(*a);
        return std::move(task_);
    }

private:
    void requirements(const Node& s) {
        const auto& ok = supported_requirements();
        for (std::size_t i = 1; i < s.items.size(); ++i) {
            const std::string& r = s.items[i].sym();
            if (std::find(ok.begin(), ok.end(), r) == ok.end())
                s.items[i].fail("unsupported requirement '" + r + "'");
            task_.requirements.push_back(r);
        }
    }

    void types(const Node& s) {
        for (const auto& t : typed_list(s, 1, false)) {
            if (t.name == kRootType)
                continue;
            task_.types.declare(t.name, t.type);
        }
    }

    void require_type(const Node& where, const std::string& type) const {
        if (!task_.types.contains(type))
            where.fail("unknown type '" + type + "'");
    }

    void constants(const Node& s) {
        for (auto& c : typed_list(s, 1, false)) {
            require_type(s, c.type);
            task_.constants.push_back(c);
        }
    }

    void predicates(const Node& s) {
        for (std::size_t i = 1; i < s.items.size(); ++i) {
            const Node& p = s.items[i];
            if (!p.list || p.items.empty())
                p.fail("expected a predicate declaration");
            Predicate pred{p.at(0).sym(), typed_list(p, 1, true)};
            std::set<std::string> names;
            for (const auto& param : pred.params) {
                require_type(p, param.type);
                if (!names.insert(param.name).second)
                    p.fail("duplicate parameter '" + param.name + "' in predicate '" + pred.name + "'");
            }
            if (task_.predicate(pred.name))
                p.fail("duplicate predicate '" + pred.name + "'");
            task_.predicates.push_back(std::move(pred));
        }
    }

    void functions(const Node& s) {
        for (std::size_t i = 1; i < s.items.size(); ++i) {
            const Node& f = s.items[i];
            if (f.is("-")) {
                if (i + 1 >= s.items.size() || !s.items[i + 1].is("number"))
                    f.fail("only numeric functions are supported");
                ++i;
                continue;
            }
            if (!f.list || f.items.empty())
                f.fail("expected a function declaration");
            FunctionDecl decl{f.at(0).sym(), typed_list(f, 1, true)};
            for (const auto& param : decl.params)
                require_type(f, param.type);
            if (decl.name != "total-cost")
                task_.functions.push_back(std::move(decl));
        }
    }

    void check_atom(const Node& where, const Atom& atom, const ActionSchema& schema, bool allow_equality) const {
        if (atom.is_equality()) {
            if (!allow_equality)
                where.fail("equality is only allowed in conditions");
            for (const auto& t : atom.args)
                check_term(where, t, schema);
            return;
        }
        const Predicate* pred = task_.predicate(atom.predicate);
        if (!pred)
            where.fail("undeclared predicate '" + atom.predicate + "'");
        if (pred->arity() != atom.args.size())
            where.fail("arity mismatch for '" + atom.predicate + "': expected " + std::to_string(pred->arity()) +
                       ", found " + std::to_string(atom.args.size()));
        for (std::size_t i = 0; i < atom.args.size(); ++i) {
            const std::string& t = atom.args[i];
            check_term(where, t, schema);
            if (is_variable(t)) {
                const TypedName* p = schema.param(t);
                if (!task_.types.compatible(p->type, pred->params[i].type))
                    where.fail("variable " + t + " of type '" + p->type + "' does not fit parameter " +
                               std::to_string(i + 1) + " of '" + pred->name + "' (type '" +
                               pred->params[i].type + "')");
            }
        }
    }

    void check_term(const Node& where, const std::string& term, const ActionSchema& schema) const {
        if (is_variable(term) && !schema.param(term))
            where.fail("variable " + term + " is not a parameter of '" + schema.name + "'");
    }

    void read_effect_item(const Node& n, ActionSchema& schema) {
        if (!n.list || n.items.empty())
            n.fail("expected an effect");
        const std::string& head = n.at(0).sym();
        if (head == "when") {
            if (n.items.size() != 3)
                n.fail("'when' takes a condition and an effect");
            ConditionalEffect ce;
            ce.condition = read_condition(n.items[1]);
            for (const auto& l : ce.condition)
                check_atom(n.items[1], l.atom, schema, true);
            const Node& body = n.items[2];
            if (body.list && !body.items.empty() && body.items[0].is("and")) {
                for (std::size_t i = 1; i < body.items.size(); ++i)
                    ce.effect.push_back(effect_literal(body.items[i], schema));
            } else {
                ce.effect.push_back(effect_literal(body, schema));
            }
            if (ce.effect.empty())
                body.fail("empty effect");
            schema.conditional.push_back(std::move(ce));
            return;
        }
        if (head == "increase") {
            if (n.items.size() != 3)
                n.fail("'increase' takes a target and an amount");
            const Node& target = n.items[1];
            if (!target.list || target.items.size() != 1 || !target.at(0).is("total-cost"))
                target.fail("only (total-cost) can be increased");
            if (schema.cost)
                n.fail("duplicate total-cost increase");
            CostExpr cost;
            const Node& amount = n.items[2];
            if (amount.list) {
                Atom f = read_atom(amount);
                const FunctionDecl* decl = task_.function(f.predicate);
                if (!decl)
                    amount.fail("undeclared function '" + f.predicate + "'");
                if (decl->params.size() != f.args.size())
                    amount.fail("arity mismatch for function '" + f.predicate + "'");
                for (const auto& t : f.args)
                    check_term(amount, t, schema);
                cost.function = std::move(f);
            } else {
                cost.constant = parse_integer(amount);
            }
            schema.cost = std::move(cost);
            return;
        }
        if (head == "decrease" || head == "assign" || head == "scale-up" || head == "scale-down")
            n.fail("unsupported numeric effect '" + head + "'");
        if (head == "forall")
            n.fail("unsupported effect 'forall'");
        schema.effect.push_back(effect_literal(n, schema));
    }

    Literal effect_literal(const Node& n, const ActionSchema& schema) {
        if (n.list && !n.items.empty() && (n.items[0].is("when") || n.items[0].is("and")))
            n.fail("nested '" + n.items[0].symbol + "' effects are not supported");
        Literal l = read_literal(n);
        check_atom(n, l.atom, schema, false);
        return l;
    }

    void action(const Node& s) {
        ActionSchema schema;
        schema.name = s.at(1).sym();
        if (task_.action(schema.name))
            s.fail("duplicate action '" + schema.name + "'");
        bool has_effect = false;
        for (std::size_t i = 2; i < s.items.size(); i += 2) {
            const std::string& key = s.items[i].sym();
            if (i + 1 >= s.items.size())
                s.items[i].fail("missing value for '" + key + "'");
            const Node& value = s.items[i + 1];
            if (key == ":parameters") {
                if (!value.list)
                    value.fail("expected a parameter list");
                schema.params = typed_list(value, 0, true);
                std::set<std::string> names;
                for (const auto& p : schema.params) {
                    require_type(value, p.type);
                    if (!names.insert(p.name).second)
                        value.fail("duplicate parameter '" + p.name + "'");
                }
            } else if (key == ":precondition") {
                schema.precondition = read_condition(value);
                for (const auto& l : schema.precondition)
                    check_atom(value, l.atom, schema, true);
            } else if (key == ":effect") {
                has_effect = true;
                if (!value.list || value.items.empty())
                    value.fail("empty effect");
                if (value.at(0).is("and")) {
                    if (value.items.size() == 1)
                        value.fail("empty effect");
                    for (std::size_t j = 1; j < value.items.size(); ++j)
                        read_effect_item(value.items[j], schema);
                } else {
                    read_effect_item(value, schema);
                }
                if (schema.effect.empty() && schema.conditional.empty())
                    value.fail("empty effect");
            } else {
                s.items[i].fail("unsupported action key '" + key + "'");
            }
        }
        if (!has_effect)
            s.fail("empty effect");
        task_.actions.push_back(std::move(schema));
    }

    Task task_;
};

class ProblemBuilder {
public:
    explicit ProblemBuilder(const Task& domain) : task_(domain) {}

    Task build(const Node& root) {
        if (!root.list || root.items.size() < 2 || !root.at(0).is("define"))
            root.fail("expected (define (problem ...) ...)");
        const Node& head = root.at(1);
        if (!head.list || head.items.size() != 2 || !head.at(0).is("problem"))
            head.fail("expected (problem <name>)");
        task_.problem_name = head.at(1).sym();
        bool have_goal = false;
        for (std::size_t i = 2; i < root.items.size(); ++i) {
            const Node& s = root.items[i];
            if (!s.list || s.items.empty())
                s.fail("expected a problem section");
            const std::string& key = s.at(0).sym();
            if (key == ":domain") {
                if (s.at(1).sym() != task_.domain_name)
                    s.at(1).fail("problem is for domain '" + s.at(1).symbol + "', not '" + task_.domain_name + "'");
            } else if (key == ":requirements") {
                continue;
            } else if (key == ":objects") {
                objects(s);
            } else if (key == ":init") {
                init(s);
            } else if (key == ":goal") {
                if (s.items.size() != 2)
                    s.fail("':goal' takes one condition");
                goal(s.items[1]);
                have_goal = true;
            } else if (key == ":metric") {
                metric(s);
            } else {
                s.at(0).fail("unsupported problem section '" + key + "'");
            }
        }
        if (!have_goal)
            root.fail("problem has no goal");
        check_schema_constants(root);
        return std::move(task_);
    }

private:
    void objects(const Node& s) {
        std::set<std::string> seen;
        for (const auto& c : task_.constants)
            seen.insert(c.name);
        for (auto& o : typed_list(s, 1, false)) {
            if (!task_.types.contains(o.type))
                s.fail("unknown type '" + o.type + "' for object '" + o.name + "'");
            if (!seen.insert(o.name).second)
                s.fail("duplicate object '" + o.name + "'");
            task_.objects.push_back(o);
        }
    }

    void check_ground(const Node& where, const Atom& atom) const {
        const Predicate* pred = task_.predicate(atom.predicate);
        if (!pred)
            where.fail("undeclared predicate '" + atom.predicate + "'");
        if (pred->arity() != atom.args.size())
            where.fail("arity mismatch for '" + atom.predicate + "'");
        for (std::size_t i = 0; i < atom.args.size(); ++i) {
            auto type = task_.object_type(atom.args[i]);
            if (!type)
                where.fail("undeclared object '" + atom.args[i] + "'");
            if (!task_.types.is_subtype(*type, pred->params[i].type))
                where.fail("ill-typed atom " + atom.str() + ": '" + atom.args[i] + "' is not a " +
                           pred->params[i].type);
        }
    }

    void init(const Node& s) {
        for (std::size_t i = 1; i < s.items.size(); ++i) {
            const Node& n = s.items[i];
            if (n.list && !n.items.empty() && n.items[0].is("=")) {
                if (n.items.size() != 3)
                    n.fail("numeric initialisation takes a term and a value");
                Atom term = read_atom(n.items[1]);
                if (term.predicate == "total-cost" && term.args.empty()) {
                    if (parse_integer(n.items[2]) != 0)
                        n.fail("total-cost must start at 0");
                    continue;
                }
                const FunctionDecl* f = task_.function(term.predicate);
                if (!f)
                    n.fail("undeclared function '" + term.predicate + "'");
                if (f->params.size() != term.args.size())
                    n.fail("arity mismatch for function '" + term.predicate + "'");
                for (const auto& a : term.args)
                    if (!task_.object_type(a))
                        n.fail("undeclared object '" + a + "'");
                task_.numeric_init.push_back({std::move(term), parse_integer(n.items[2])});
                continue;
            }
            if (n.list && !n.items.empty() && n.items[0].is("not"))
                n.fail("negative literals are not allowed in the initial state");
            Atom a = read_atom(n);
            check_ground(n, a);
            task_.init.push_back(std::move(a));
        }
    }

    void goal(const Node& n) {
        for (auto& l : read_condition(n)) {
            if (l.negated || l.atom.is_equality())
                n.fail("only positive goal atoms are supported");
            check_ground(n, l.atom);
            task_.goal.push_back(std::move(l.atom));
        }
    }

    void metric(const Node& s) {
        if (s.items.size() != 3 || !s.items[1].is("minimize") || !s.items[2].list || s.items[2].items.size() != 1 ||
            !s.items[2].items[0].is("total-cost"))
            s.fail("only (:metric minimize (total-cost)) is supported");
        task_.metric = Metric::MinimizeTotalCost;
    }

    void check_constant(const Node& where, const std::string& term, const std::string& expected) const {
        if (is_variable(term))
            return;
        auto type = task_.object_type(term);
        if (!type)
            where.fail("schema refers to undeclared object '" + term + "'");
        if (!expected.empty() && !task_.types.is_subtype(*type, expected))
            where.fail("schema constant '" + term + "' is not a " + expected);
    }

    void check_literal_constants(const Node& where, const Atom& atom) const {
        const Predicate* p = atom.is_equality() ? nullptr : task_.predicate(atom.predicate);
        for (std::size_t i = 0; i < atom.args.size(); ++i)
            check_constant(where, atom.args[i], p ? p->params[i].type : "");
    }

    void check_schema_constants(const Node& where) const {
        for (const auto& a : task_.actions) {
            for (const auto& l : a.precondition)
                check_literal_constants(where, l.atom);
            for (const auto& l : a.effect)
                check_literal_constants(where, l.atom);
            for (const auto& c : a.conditional) {
                for (const auto& l : c.condition)
                    check_literal_constants(where, l.atom);
                for (const auto& l : c.effect)
                    check_literal_constants(where, l.atom);
            }
            if (a.cost && a.cost->function)
                for (const auto& t : a.cost->function->args)
                    check_constant(where, t, "");
        }
    }

    Task task_;
};

} // namespace

Task parse_domain(std::string_view text) {
    Reader reader(text);
    return DomainBuilder().build(reader.read_document());
}

Task parse_problem(std::string_view text, const Task& domain) {
    Reader reader(text);
    return ProblemBuilder(domain).build(reader.read_document());
}

std::vector<std::string> parse_agents(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        auto cut = line.find_first_of("#;");
        if (cut != std::string::npos)
            line.erase(cut);
        std::istringstream words(line);
        std::string w;
        while (words >> w) {
            std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::tolower(c); });
            out.push_back(w);
        }
    }
    return out;
}

std::vector<std::string> infer_agents(const Task& task) {
    std::optional<std::string> type;
    for (const auto& a : task.actions) {
        if (a.name.rfind("__", 0) == 0)
            continue;
        if (a.params.empty())
            throw std::invalid_argument("cannot infer agents: action '" + a.name + "' has no parameters");
        if (type && *type != a.params.front().type)
            throw std::invalid_argument("cannot infer agents: actions disagree on the first parameter type");
        type = a.params.front().type;
    }
    if (!type)
        throw std::invalid_argument("cannot infer agents: domain has no actions");
    auto agents = task.objects_of(*type);
    if (agents.empty())
        throw std::invalid_argument("cannot infer agents: no objects of type '" + *type + "'");
    return agents;
}

void set_agents(Task& task, std::vector<std::string> agents) {
    if (agents.empty())
        throw std::invalid_argument("agent list is empty");
    std::set<std::string> seen;
    for (const auto& a : agents) {
        if (!task.object_type(a))
            throw std::invalid_argument("agent '" + a + "' is not a declared object");
        if (!seen.insert(a).second)
            throw std::invalid_argument("agent '" + a + "' listed twice");
    }
    task.agents = std::move(agents);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Task load_task(const std::string& domain_path, const std::string& problem_path, const std::string& agents_path) {
    Task domain = parse_domain(read_file(domain_path));
    Task task = parse_problem(read_file(problem_path), domain);
    if (!agents_path.empty())
        set_agents(task, parse_agents(read_file(agents_path)));
    else
        set_agents(task, infer_agents(task));
    return task;
}

} // namespace fairplan::pddl
