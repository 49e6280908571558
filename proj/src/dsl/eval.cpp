#include "rulopt/dsl/eval.hpp"

#include <cmath>
#include <map>
#include <variant>

namespace rulopt::dsl {

namespace {

struct EvalError {
    std::string message;
};

using Value = std::variant<double, bool>;

struct Evaluator {
    const sim::MetricsSnapshot& snapshot;
    std::map<std::string, Value, std::less<>> defs;
    std::string where; // "def x" or "rule 3", for diagnostics

    double check_finite(double v) const {
        if (!std::isfinite(v))
            throw EvalError{"non-finite value in " + where};
        return v;
    }

    double num(const Expr& e) {
        Value v = eval(e);
        return std::get<double>(v);
    }

    bool boolean(const Expr& e) {
        Value v = eval(e);
        return std::get<bool>(v);
    }

    Value eval(const Expr& e) {
        if (const auto* lit = std::get_if<Expr::Literal>(&e.node))
            return lit->value;
        if (const auto* id = std::get_if<Expr::Ident>(&e.node)) {
            if (auto v = snapshot.value_of(id->name))
                return *v;
            auto it = defs.find(id->name);
            if (it == defs.end())
                throw EvalError{"unknown variable " + id->name + " in " + where};
            return it->second;
        }
        if (const auto* u = std::get_if<Expr::Unary>(&e.node)) {
            if (u->op == UnaryOp::Neg)
                return check_finite(-num(*u->operand));
            return !boolean(*u->operand);
        }
        if (const auto* b = std::get_if<Expr::Binary>(&e.node)) {
            switch (b->op) {
            case BinaryOp::Add:
                return check_finite(num(*b->lhs) + num(*b->rhs));
            case BinaryOp::Sub:
                return check_finite(num(*b->lhs) - num(*b->rhs));
            case BinaryOp::Mul:
                return check_finite(num(*b->lhs) * num(*b->rhs));
            case BinaryOp::Div: {
                double lhs = num(*b->lhs);
                double rhs = num(*b->rhs);
                if (rhs == 0.0)
                    throw EvalError{"division by zero in " + where};
                return check_finite(lhs / rhs);
            }
            case BinaryOp::Lt:
                return num(*b->lhs) < num(*b->rhs);
            case BinaryOp::Le:
                return num(*b->lhs) <= num(*b->rhs);
            case BinaryOp::Gt:
                return num(*b->lhs) > num(*b->rhs);
            case BinaryOp::Ge:
                return num(*b->lhs) >= num(*b->rhs);
            case BinaryOp::Eq:
                return num(*b->lhs) == num(*b->rhs);
            case BinaryOp::Ne:
                return num(*b->lhs) != num(*b->rhs);
            case BinaryOp::And:
                return boolean(*b->lhs) && boolean(*b->rhs);
            case BinaryOp::Or:
                return boolean(*b->lhs) || boolean(*b->rhs);
            }
            throw EvalError{"unhandled operator in " + where};
        }
        const auto& call = std::get<Expr::Call>(e.node);
        if (call.fn == Builtin::Abs)
            return check_finite(std::fabs(num(*call.args[0])));
        double acc = num(*call.args[0]);
        for (std::size_t i = 1; i < call.args.size(); ++i) {
            double v = num(*call.args[i]);
            acc = call.fn == Builtin::Min ? std::min(acc, v) : std::max(acc, v);
        }
        return check_finite(acc);
    }
};

} // namespace

ActionSet evaluate(const RuleSet& rs, const sim::MetricsSnapshot& snapshot) {
    ActionSet out;
    Evaluator ev{snapshot, {}, ""};

    // Pending targets accumulate in doubles; the server value is rounded
    // once at the end.
    std::optional<double> pending_servers;
    std::optional<double> pending_dimmer;

    try {
        for (const auto& def : rs.defs) {
            ev.where = "def " + def.name;
            ev.defs.insert_or_assign(def.name, ev.eval(*def.value));
        }
        for (std::size_t i = 0; i < rs.rules.size(); ++i) {
            const Rule& rule = rs.rules[i];
            ev.where = "rule " + std::to_string(i + 1);
            if (!ev.boolean(*rule.condition))
                continue;
            for (const auto& action : rule.actions) {
                double arg = ev.num(*action.argument);
                switch (action.kind) {
                case ActionKind::SetServers:
                    pending_servers = arg;
                    break;
                case ActionKind::AddServers:
                    pending_servers = pending_servers.value_or(snapshot.servers) + arg;
                    break;
                case ActionKind::SetDimmer:
                    pending_dimmer = arg;
                    break;
                case ActionKind::AddDimmer:
                    pending_dimmer = pending_dimmer.value_or(snapshot.dimmer) + arg;
                    break;
                }
            }
        }
    } catch (const EvalError& err) {
        return ActionSet{std::nullopt, std::nullopt, err.message};
    }

    if (pending_servers) {
        double v = *pending_servers;
        if (!std::isfinite(v))
            return ActionSet{std::nullopt, std::nullopt, "non-finite server target"};
        long target = std::lround(v);
        out.server_target = std::max(0L, target);
    }
    if (pending_dimmer) {
        if (!std::isfinite(*pending_dimmer))
            return ActionSet{std::nullopt, std::nullopt, "non-finite dimmer target"};
        out.dimmer_target = *pending_dimmer;
    }
    return out;
}

} // namespace rulopt::dsl
