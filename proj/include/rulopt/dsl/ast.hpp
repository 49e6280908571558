#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace rulopt::dsl {

struct SourcePos {
    int line = 0;
    int column = 0;
};

enum class BinaryOp { Add, Sub, Mul, Div, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnaryOp { Neg, Not };
enum class Builtin { Min, Max, Abs };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    struct Literal {
        double value = 0.0;
    };
    struct Ident {
        std::string name;
    };
    struct Unary {
        UnaryOp op;
        ExprPtr operand;
    };
    struct Binary {
        BinaryOp op;
        ExprPtr lhs;
        ExprPtr rhs;
    };
    struct Call {
        Builtin fn;
        std::vector<ExprPtr> args;
    };

    std::variant<Literal, Ident, Unary, Binary, Call> node;
    SourcePos pos;
};

ExprPtr make_literal(double value, SourcePos pos = {});
ExprPtr make_ident(std::string name, SourcePos pos = {});
ExprPtr make_unary(UnaryOp op, ExprPtr operand, SourcePos pos = {});
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourcePos pos = {});
ExprPtr make_call(Builtin fn, std::vector<ExprPtr> args, SourcePos pos = {});
ExprPtr clone(const Expr& expr);

enum class ActionKind { SetServers, AddServers, SetDimmer, AddDimmer };

struct Action {
    ActionKind kind = ActionKind::SetServers;
    ExprPtr argument;
    SourcePos pos;
};

struct Rule {
    ExprPtr condition;
    std::vector<Action> actions;
    SourcePos pos;
};

struct Def {
    std::string name;
    ExprPtr value;
    SourcePos pos;
};

struct RuleSet {
    std::vector<Def> defs;
    std::vector<Rule> rules;
};

RuleSet clone(const RuleSet& rs);

// Structural equality; source positions are ignored and literal values are
// compared bit-for-bit.
bool equal(const Expr& a, const Expr& b);
bool equal(const RuleSet& a, const RuleSet& b);

std::string_view action_name(ActionKind kind);
std::string_view builtin_name(Builtin fn);
std::string_view binary_op_token(BinaryOp op);

} // namespace rulopt::dsl
