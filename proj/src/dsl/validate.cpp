#include "rulopt/dsl/validate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace rulopt::dsl {

namespace {

enum class Type { Number, Boolean };

struct Checker {
    const std::vector<std::string>& catalog;
    std::vector<Diagnostic>& out;
    std::map<std::string, Type, std::less<>> defs; // name -> type, in declaration order

    bool in_catalog(const std::string& name) const {
        return std::find(catalog.begin(), catalog.end(), name) != catalog.end();
    }

    void report(std::string message, SourcePos pos) { out.push_back(Diagnostic{std::move(message), pos}); }

    // Returns nullopt after reporting, so follow-up errors do not cascade.
    std::optional<Type> infer(const Expr& e) {
        if (const auto* lit = std::get_if<Expr::Literal>(&e.node)) {
            if (!std::isfinite(lit->value)) {
                report("literal must be finite", e.pos);
                return std::nullopt;
            }
            return Type::Number;
        }
        if (const auto* id = std::get_if<Expr::Ident>(&e.node)) {
            if (in_catalog(id->name))
                return Type::Number;
            if (auto it = defs.find(id->name); it != defs.end())
                return it->second;
            report("unknown variable " + id->name, e.pos);
            return std::nullopt;
        }
        if (const auto* u = std::get_if<Expr::Unary>(&e.node)) {
            auto t = infer(*u->operand);
            if (!t)
                return std::nullopt;
            if (u->op == UnaryOp::Neg) {
                if (*t != Type::Number) {
                    report("operand of '-' must be numeric", e.pos);
                    return std::nullopt;
                }
                return Type::Number;
            }
            if (*t != Type::Boolean) {
                report("operand of '!' must be boolean", e.pos);
                return std::nullopt;
            }
            return Type::Boolean;
        }
        if (const auto* b = std::get_if<Expr::Binary>(&e.node)) {
            auto lt = infer(*b->lhs);
            auto rt = infer(*b->rhs);
            if (!lt || !rt)
                return std::nullopt;
            switch (b->op) {
            case BinaryOp::Add:
            case BinaryOp::Sub:
            case BinaryOp::Mul:
            case BinaryOp::Div:
                if (*lt != Type::Number || *rt != Type::Number) {
                    report(std::string("operands of '") + std::string(binary_op_token(b->op)) +
                               "' must be numeric",
                           e.pos);
                    return std::nullopt;
                }
                return Type::Number;
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge:
            case BinaryOp::Eq:
            case BinaryOp::Ne:
                if (*lt != Type::Number || *rt != Type::Number) {
                    report(std::string("operands of '") + std::string(binary_op_token(b->op)) +
                               "' must be numeric",
                           e.pos);
                    return std::nullopt;
                }
                return Type::Boolean;
            case BinaryOp::And:
            case BinaryOp::Or:
                if (*lt != Type::Boolean || *rt != Type::Boolean) {
                    report(std::string("operands of '") + std::string(binary_op_token(b->op)) +
                               "' must be boolean",
                           e.pos);
                    return std::nullopt;
                }
                return Type::Boolean;
            }
            return std::nullopt;
        }
        const auto& call = std::get<Expr::Call>(e.node);
        bool ok = true;
        for (const auto& arg : call.args) {
            auto t = infer(*arg);
            if (!t) {
                ok = false;
            } else if (*t != Type::Number) {
                report(std::string(builtin_name(call.fn)) + " arguments must be numeric", arg->pos);
                ok = false;
            }
        }
        if (call.fn == Builtin::Abs && call.args.size() != 1) {
            report("abs takes exactly one argument", e.pos);
            ok = false;
        }
        if ((call.fn == Builtin::Min || call.fn == Builtin::Max) && call.args.size() < 2) {
            report(std::string(builtin_name(call.fn)) + " needs at least two arguments", e.pos);
            ok = false;
        }
        return ok ? std::optional<Type>(Type::Number) : std::nullopt;
    }
};

} // namespace

std::string to_string(const Diagnostic& d) {
    return std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) + ": " + d.message;
}

std::string join_diagnostics(const std::vector<Diagnostic>& ds) {
    std::string out;
    for (const auto& d : ds) {
        if (!out.empty())
            out += "\n";
        out += to_string(d);
    }
    return out;
}

std::vector<Diagnostic> validate(const RuleSet& rs, const std::vector<std::string>& catalog) {
    std::vector<Diagnostic> out;
    Checker checker{catalog, out, {}};

    for (const auto& def : rs.defs) {
        if (checker.defs.count(def.name) > 0)
            checker.report("duplicate definition " + def.name, def.pos);
        if (checker.in_catalog(def.name))
            checker.report("definition " + def.name + " shadows a catalog variable", def.pos);
        auto t = checker.infer(*def.value);
        // Unresolved defs default to numeric so one bad def does not flag
        // every later reference.
        checker.defs.emplace(def.name, t.value_or(Type::Number));
    }

    if (rs.rules.empty())
        checker.report("ruleset has no rules", SourcePos{1, 1});

    for (std::size_t i = 0; i < rs.rules.size(); ++i) {
        const Rule& rule = rs.rules[i];
        auto t = checker.infer(*rule.condition);
        if (t && *t != Type::Boolean)
            checker.report("condition must be boolean in rule " + std::to_string(i + 1), rule.pos);
        for (const auto& action : rule.actions) {
            auto at = checker.infer(*action.argument);
            if (at && *at != Type::Number)
                checker.report(std::string(action_name(action.kind)) + " argument must be numeric", action.pos);
        }
    }
    return out;
}

namespace {

void collect_idents(const Expr& e, std::set<std::string>& out) {
    if (const auto* id = std::get_if<Expr::Ident>(&e.node)) {
        out.insert(id->name);
        return;
    }
    if (const auto* u = std::get_if<Expr::Unary>(&e.node)) {
        collect_idents(*u->operand, out);
        return;
    }
    if (const auto* b = std::get_if<Expr::Binary>(&e.node)) {
        collect_idents(*b->lhs, out);
        collect_idents(*b->rhs, out);
        return;
    }
    if (const auto* c = std::get_if<Expr::Call>(&e.node)) {
        for (const auto& a : c->args)
            collect_idents(*a, out);
    }
}

} // namespace

std::set<std::string> condition_variables(const RuleSet& rs, const std::vector<std::string>& catalog) {
    std::map<std::string, std::set<std::string>> def_deps;
    for (const auto& def : rs.defs) {
        std::set<std::string> idents;
        collect_idents(*def.value, idents);
        std::set<std::string> resolved;
        for (const auto& name : idents) {
            if (auto it = def_deps.find(name); it != def_deps.end())
                resolved.insert(it->second.begin(), it->second.end());
            else
                resolved.insert(name);
        }
        def_deps[def.name] = std::move(resolved);
    }

    std::set<std::string> raw;
    for (const auto& rule : rs.rules) {
        std::set<std::string> idents;
        collect_idents(*rule.condition, idents);
        for (const auto& name : idents) {
            if (auto it = def_deps.find(name); it != def_deps.end())
                raw.insert(it->second.begin(), it->second.end());
            else
                raw.insert(name);
        }
    }

    std::set<std::string> out;
    for (const auto& name : raw)
        if (std::find(catalog.begin(), catalog.end(), name) != catalog.end())
            out.insert(name);
    return out;
}

} // namespace rulopt::dsl
