#include "rulopt/dsl/ast.hpp"

#include <cstring>

namespace rulopt::dsl {

ExprPtr make_literal(double value, SourcePos pos) {
    auto e = std::make_unique<Expr>();
    e->node = Expr::Literal{value};
    e->pos = pos;
    return e;
}

ExprPtr make_ident(std::string name, SourcePos pos) {
    auto e = std::make_unique<Expr>();
    e->node = Expr::Ident{std::move(name)};
    e->pos = pos;
    return e;
}

ExprPtr make_unary(UnaryOp op, ExprPtr operand, SourcePos pos) {
    auto e = std::make_unique<Expr>();
    e->node = Expr::Unary{op, std::move(operand)};
    e->pos = pos;
    return e;
}

ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourcePos pos) {
    auto e = std::make_unique<Expr>();
    e->node = Expr::Binary{op, std::move(lhs), std::move(rhs)};
    e->pos = pos;
    return e;
}

ExprPtr make_call(Builtin fn, std::vector<ExprPtr> args, SourcePos pos) {
    auto e = std::make_unique<Expr>();
    e->node = Expr::Call{fn, std::move(args)};
    e->pos = pos;
    return e;
}

ExprPtr clone(const Expr& expr) {
    auto out = std::make_unique<Expr>();
    out->pos = expr.pos;
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::Literal>) {
                out->node = node;
            } else if constexpr (std::is_same_v<T, Expr::Ident>) {
                out->node = node;
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                out->node = Expr::Unary{node.op, clone(*node.operand)};
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                out->node = Expr::Binary{node.op, clone(*node.lhs), clone(*node.rhs)};
            } else {
                std::vector<ExprPtr> args;
                args.reserve(node.args.size());
                for (const auto& a : node.args)
                    args.push_back(clone(*a));
                out->node = Expr::Call{node.fn, std::move(args)};
            }
        },
        expr.node);
    return out;
}

RuleSet clone(const RuleSet& rs) {
    RuleSet out;
    out.defs.reserve(rs.defs.size());
    for (const auto& d : rs.defs)
        out.defs.push_back(Def{d.name, clone(*d.value), d.pos});
    out.rules.reserve(rs.rules.size());
    for (const auto& r : rs.rules) {
        Rule rule;
        rule.condition = clone(*r.condition);
        rule.pos = r.pos;
        for (const auto& a : r.actions)
            rule.actions.push_back(Action{a.kind, clone(*a.argument), a.pos});
        out.rules.push_back(std::move(rule));
    }
    return out;
}

namespace {

bool bits_equal(double a, double b) {
    std::uint64_t ua = 0, ub = 0;
    std::memcpy(&ua, &a, sizeof(a));
    std::memcpy(&ub, &b, sizeof(b));
    return ua == ub;
}

} // namespace

bool equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index())
        return false;
    if (const auto* la = std::get_if<Expr::Literal>(&a.node))
        return bits_equal(la->value, std::get<Expr::Literal>(b.node).value);
    if (const auto* ia = std::get_if<Expr::Ident>(&a.node))
        return ia->name == std::get<Expr::Ident>(b.node).name;
    if (const auto* ua = std::get_if<Expr::Unary>(&a.node)) {
        const auto& ub = std::get<Expr::Unary>(b.node);
        return ua->op == ub.op && equal(*ua->operand, *ub.operand);
    }
    if (const auto* ba = std::get_if<Expr::Binary>(&a.node)) {
        const auto& bb = std::get<Expr::Binary>(b.node);
        return ba->op == bb.op && equal(*ba->lhs, *bb.lhs) && equal(*ba->rhs, *bb.rhs);
    }
    const auto& ca = std::get<Expr::Call>(a.node);
    const auto& cb = std::get<Expr::Call>(b.node);
    if (ca.fn != cb.fn || ca.args.size() != cb.args.size())
        return false;
    for (std::size_t i = 0; i < ca.args.size(); ++i)
        if (!equal(*ca.args[i], *cb.args[i]))
            return false;
    return true;
}

bool equal(const RuleSet& a, const RuleSet& b) {
    if (a.defs.size() != b.defs.size() || a.rules.size() != b.rules.size())
        return false;
    for (std::size_t i = 0; i < a.defs.size(); ++i)
        if (a.defs[i].name != b.defs[i].name || !equal(*a.defs[i].value, *b.defs[i].value))
            return false;
    for (std::size_t i = 0; i < a.rules.size(); ++i) {
        const Rule& ra = a.rules[i];
        const Rule& rb = b.rules[i];
        if (!equal(*ra.condition, *rb.condition) || ra.actions.size() != rb.actions.size())
            return false;
        for (std::size_t j = 0; j < ra.actions.size(); ++j)
            if (ra.actions[j].kind != rb.actions[j].kind || !equal(*ra.actions[j].argument, *rb.actions[j].argument))
                return false;
    }
    return true;
}

std::string_view action_name(ActionKind kind) {
    switch (kind) {
    case ActionKind::SetServers:
        return "set_servers";
    case ActionKind::AddServers:
        return "add_servers";
    case ActionKind::SetDimmer:
        return "set_dimmer";
    case ActionKind::AddDimmer:
        return "add_dimmer";
    }
    return "?";
}

std::string_view builtin_name(Builtin fn) {
    switch (fn) {
    case Builtin::Min:
        return "min";
    case Builtin::Max:
        return "max";
    case Builtin::Abs:
        return "abs";
    }
    return "?";
}

std::string_view binary_op_token(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add:
        return "+";
    case BinaryOp::Sub:
        return "-";
    case BinaryOp::Mul:
        return "*";
    case BinaryOp::Div:
        return "/";
    case BinaryOp::Lt:
        return "<";
    case BinaryOp::Le:
        return "<=";
    case BinaryOp::Gt:
        return ">";
    case BinaryOp::Ge:
        return ">=";
    case BinaryOp::Eq:
        return "==";
    case BinaryOp::Ne:
        return "!=";
    case BinaryOp::And:
        return "&&";
    case BinaryOp::Or:
        return "||";
    }
    return "?";
}

} // namespace rulopt::dsl
