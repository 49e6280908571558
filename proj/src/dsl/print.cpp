#include "rulopt/dsl/print.hpp"

#include "rulopt/text.hpp"

namespace rulopt::dsl {

namespace {

// Grammar levels, loosest binding first.
enum Level : int { LvlOr = 1, LvlAnd, LvlCmp, LvlAdd, LvlMul, LvlUnary, LvlPrimary };

int level_of(const Expr& e) {
    if (std::holds_alternative<Expr::Unary>(e.node))
        return LvlUnary;
    if (const auto* b = std::get_if<Expr::Binary>(&e.node)) {
        switch (b->op) {
        case BinaryOp::Or:
            return LvlOr;
        case BinaryOp::And:
            return LvlAnd;
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge:
        case BinaryOp::Eq:
        case BinaryOp::Ne:
            return LvlCmp;
        case BinaryOp::Add:
        case BinaryOp::Sub:
            return LvlAdd;
        case BinaryOp::Mul:
        case BinaryOp::Div:
            return LvlMul;
        }
    }
    return LvlPrimary;
}

void print_into(const Expr& e, std::string& out);

void print_child(const Expr& child, int parent_level, bool is_right, std::string& out) {
    int child_level = level_of(child);
    // Left-associative parsing reconstructs equal-level left children as-is;
    // equal-level right children need parentheses to survive the round trip.
    bool parens = child_level < parent_level || (child_level == parent_level && is_right);
    if (parens)
        out.push_back('(');
    print_into(child, out);
    if (parens)
        out.push_back(')');
}

void print_into(const Expr& e, std::string& out) {
    if (const auto* lit = std::get_if<Expr::Literal>(&e.node)) {
        out += format_double(lit->value);
        return;
    }
    if (const auto* id = std::get_if<Expr::Ident>(&e.node)) {
        out += id->name;
        return;
    }
    if (const auto* u = std::get_if<Expr::Unary>(&e.node)) {
        out.push_back(u->op == UnaryOp::Neg ? '-' : '!');
        int operand_level = level_of(*u->operand);
        bool parens = operand_level < LvlUnary;
        if (parens)
            out.push_back('(');
        print_into(*u->operand, out);
        if (parens)
            out.push_back(')');
        return;
    }
    if (const auto* b = std::get_if<Expr::Binary>(&e.node)) {
        int lvl = level_of(e);
        print_child(*b->lhs, lvl, false, out);
        out.push_back(' ');
        out += binary_op_token(b->op);
        out.push_back(' ');
        print_child(*b->rhs, lvl, true, out);
        return;
    }
    const auto& call = std::get<Expr::Call>(e.node);
    out += builtin_name(call.fn);
    out.push_back('(');
    for (std::size_t i = 0; i < call.args.size(); ++i) {
        if (i > 0)
            out += ", ";
        print_into(*call.args[i], out);
    }
    out.push_back(')');
}

} // namespace

std::string print_expr(const Expr& expr) {
    std::string out;
    print_into(expr, out);
    return out;
}

std::string print_ruleset(const RuleSet& rs) {
    std::string out;
    for (const auto& def : rs.defs) {
        out += "let ";
        out += def.name;
        out += " = ";
        print_into(*def.value, out);
        out += ";\n";
    }
    for (const auto& rule : rs.rules) {
        out += "when ";
        print_into(*rule.condition, out);
        out += " then ";
        for (std::size_t i = 0; i < rule.actions.size(); ++i) {
            if (i > 0)
                out += ", ";
            out += action_name(rule.actions[i].kind);
            out.push_back('(');
            print_into(*rule.actions[i].argument, out);
            out.push_back(')');
        }
        out += ";\n";
    }
    return out;
}

} // namespace rulopt::dsl
