#include "rulopt/dsl/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

namespace rulopt::dsl {

namespace {

enum class Tok {
    Number,
    Ident,
    KwLet,
    KwWhen,
    KwThen,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    AndAnd,
    OrOr,
    Not,
    Assign,
    LParen,
    RParen,
    Comma,
    Semicolon,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    SourcePos pos;
};

std::string describe(const Token& t) {
    if (t.kind == Tok::End)
        return "end of input";
    return "'" + t.text + "'";
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_ws_and_comments();
            Token t = next_token();
            bool end = t.kind == Tok::End;
            out.push_back(std::move(t));
            if (end)
                break;
        }
        return out;
    }

private:
    SourcePos here() const { return SourcePos{line_, column_}; }

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip_ws_and_comments() {
        for (;;) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (peek() != '\0' && peek() != '\n')
                    advance();
            } else {
                break;
            }
        }
    }

    Token next_token() {
        SourcePos pos = here();
        char c = peek();
        if (c == '\0')
            return Token{Tok::End, "", 0.0, pos};

        if (std::isdigit(static_cast<unsigned char>(c)))
            return lex_number(pos);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return lex_ident(pos);

        advance();
        switch (c) {
        case '+':
            return Token{Tok::Plus, "+", 0.0, pos};
        case '-':
            return Token{Tok::Minus, "-", 0.0, pos};
        case '*':
            return Token{Tok::Star, "*", 0.0, pos};
        case '/':
            return Token{Tok::Slash, "/", 0.0, pos};
        case '(':
            return Token{Tok::LParen, "(", 0.0, pos};
        case ')':
            return Token{Tok::RParen, ")", 0.0, pos};
        case ',':
            return Token{Tok::Comma, ",", 0.0, pos};
        case ';':
            return Token{Tok::Semicolon, ";", 0.0, pos};
        case '<':
            if (peek() == '=') {
                advance();
                return Token{Tok::Le, "<=", 0.0, pos};
            }
            return Token{Tok::Lt, "<", 0.0, pos};
        case '>':
            if (peek() == '=') {
                advance();
                return Token{Tok::Ge, ">=", 0.0, pos};
            }
            return Token{Tok::Gt, ">", 0.0, pos};
        case '=':
            if (peek() == '=') {
                advance();
                return Token{Tok::EqEq, "==", 0.0, pos};
            }
            return Token{Tok::Assign, "=", 0.0, pos};
        case '!':
            if (peek() == '=') {
                advance();
                return Token{Tok::Ne, "!=", 0.0, pos};
            }
            return Token{Tok::Not, "!", 0.0, pos};
        case '&':
            if (peek() == '&') {
                advance();
                return Token{Tok::AndAnd, "&&", 0.0, pos};
            }
            throw ParseError(position_prefix(pos) + "stray '&' (use '&&')", pos);
        case '|':
            if (peek() == '|') {
                advance();
                return Token{Tok::OrOr, "||", 0.0, pos};
            }
            throw ParseError(position_prefix(pos) + "stray '|' (use '||')", pos);
        default:
            throw ParseError(position_prefix(pos) + "unexpected character '" + std::string(1, c) + "'", pos);
        }
    }

    Token lex_number(SourcePos pos) {
        std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek())))
            advance();
        if (peek() == '.') {
            if (!std::isdigit(static_cast<unsigned char>(peek(1))))
                throw ParseError(position_prefix(pos) + "digit expected after decimal point", pos);
            advance();
            while (std::isdigit(static_cast<unsigned char>(peek())))
                advance();
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t exp_mark = pos_;
            advance();
            if (peek() == '+' || peek() == '-')
                advance();
            if (!std::isdigit(static_cast<unsigned char>(peek()))) {
                // Not an exponent after all (e.g. `2e` would be `2` then ident `e`);
                // reject outright, identifiers may not start with a digit anyway.
                (void)exp_mark;
                throw ParseError(position_prefix(pos) + "malformed number literal", pos);
            }
            while (std::isdigit(static_cast<unsigned char>(peek())))
                advance();
        }
        std::string text(text_.substr(start, pos_ - start));
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec == std::errc::result_out_of_range || !std::isfinite(value))
            throw ParseError(position_prefix(pos) + "number literal out of range: '" + text + "'", pos);
        if (ec != std::errc{} || ptr != text.data() + text.size())
            throw ParseError(position_prefix(pos) + "malformed number literal: '" + text + "'", pos);
        return Token{Tok::Number, std::move(text), value, pos};
    }

    Token lex_ident(SourcePos pos) {
        std::size_t start = pos_;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
            advance();
        std::string text(text_.substr(start, pos_ - start));
        if (text == "let")
            return Token{Tok::KwLet, std::move(text), 0.0, pos};
        if (text == "when")
            return Token{Tok::KwWhen, std::move(text), 0.0, pos};
        if (text == "then")
            return Token{Tok::KwThen, std::move(text), 0.0, pos};
        return Token{Tok::Ident, std::move(text), 0.0, pos};
    }

    static std::string position_prefix(SourcePos pos) {
        return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": ";
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    RuleSet run() {
        RuleSet rs;
        while (at(Tok::KwLet))
            rs.defs.push_back(parse_def());
        while (at(Tok::KwWhen))
            rs.rules.push_back(parse_rule());
        if (!at(Tok::End))
            fail("expected 'let', 'when' or end of input");
        return rs;
    }

private:
    const Token& cur() const { return tokens_[index_]; }
    bool at(Tok k) const { return cur().kind == k; }

    Token take() { return tokens_[index_++]; }

    Token expect(Tok k, const char* what) {
        if (!at(k))
            fail(std::string("expected ") + what);
        return take();
    }

    [[noreturn]] void fail(const std::string& what) const {
        const Token& t = cur();
        throw ParseError(std::to_string(t.pos.line) + ":" + std::to_string(t.pos.column) + ": " + what +
                             ", found " + describe(t),
                         t.pos);
    }

    Def parse_def() {
        Token let = expect(Tok::KwLet, "'let'");
        Token name = expect(Tok::Ident, "identifier");
        expect(Tok::Assign, "'='");
        ExprPtr value = parse_expr();
        expect(Tok::Semicolon, "';'");
        return Def{name.text, std::move(value), let.pos};
    }

    Rule parse_rule() {
        Token when = expect(Tok::KwWhen, "'when'");
        Rule rule;
        rule.pos = when.pos;
        rule.condition = parse_expr();
        expect(Tok::KwThen, "'then'");
        rule.actions.push_back(parse_action());
        while (at(Tok::Comma)) {
            take();
            rule.actions.push_back(parse_action());
        }
        expect(Tok::Semicolon, "';'");
        return rule;
    }

    Action parse_action() {
        if (!at(Tok::Ident))
            fail("expected action (set_servers, add_servers, set_dimmer or add_dimmer)");
        Token name = take();
        ActionKind kind;
        if (name.text == "set_servers")
            kind = ActionKind::SetServers;
        else if (name.text == "add_servers")
            kind = ActionKind::AddServers;
        else if (name.text == "set_dimmer")
            kind = ActionKind::SetDimmer;
        else if (name.text == "add_dimmer")
            kind = ActionKind::AddDimmer;
        else
            throw ParseError(std::to_string(name.pos.line) + ":" + std::to_string(name.pos.column) +
                                 ": unknown action '" + name.text + "'",
                             name.pos);
        expect(Tok::LParen, "'('");
        ExprPtr arg = parse_expr();
        expect(Tok::RParen, "')'");
        return Action{kind, std::move(arg), name.pos};
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at(Tok::OrOr)) {
            Token op = take();
            lhs = make_binary(BinaryOp::Or, std::move(lhs), parse_and(), op.pos);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_cmp();
        while (at(Tok::AndAnd)) {
            Token op = take();
            lhs = make_binary(BinaryOp::And, std::move(lhs), parse_cmp(), op.pos);
        }
        return lhs;
    }

    ExprPtr parse_cmp() {
        ExprPtr lhs = parse_add();
        BinaryOp op;
        switch (cur().kind) {
        case Tok::Lt:
            op = BinaryOp::Lt;
            break;
        case Tok::Le:
            op = BinaryOp::Le;
            break;
        case Tok::Gt:
            op = BinaryOp::Gt;
            break;
        case Tok::Ge:
            op = BinaryOp::Ge;
            break;
        case Tok::EqEq:
            op = BinaryOp::Eq;
            break;
        case Tok::Ne:
            op = BinaryOp::Ne;
            break;
        default:
            return lhs;
        }
        Token tok = take();
        // Comparisons do not chain; `a < b < c` fails at the second `<`.
        return make_binary(op, std::move(lhs), parse_add(), tok.pos);
    }

    ExprPtr parse_add() {
        ExprPtr lhs = parse_mul();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            Token op = take();
            lhs = make_binary(op.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub, std::move(lhs), parse_mul(),
                              op.pos);
        }
        return lhs;
    }

    ExprPtr parse_mul() {
        ExprPtr lhs = parse_unary();
        while (at(Tok::Star) || at(Tok::Slash)) {
            Token op = take();
            lhs = make_binary(op.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div, std::move(lhs), parse_unary(),
                              op.pos);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (at(Tok::Minus)) {
            Token op = take();
            return make_unary(UnaryOp::Neg, parse_unary(), op.pos);
        }
        if (at(Tok::Not)) {
            Token op = take();
            return make_unary(UnaryOp::Not, parse_unary(), op.pos);
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        if (at(Tok::Number)) {
            Token t = take();
            return make_literal(t.number, t.pos);
        }
        if (at(Tok::Ident)) {
            Token t = take();
            std::optional<Builtin> fn;
            if (t.text == "min")
                fn = Builtin::Min;
            else if (t.text == "max")
                fn = Builtin::Max;
            else if (t.text == "abs")
                fn = Builtin::Abs;
            if (fn && at(Tok::LParen)) {
                take();
                std::vector<ExprPtr> args;
                args.push_back(parse_expr());
                while (at(Tok::Comma)) {
                    take();
                    args.push_back(parse_expr());
                }
                expect(Tok::RParen, "')'");
                return make_call(*fn, std::move(args), t.pos);
            }
            return make_ident(t.text, t.pos);
        }
        if (at(Tok::LParen)) {
            take();
            ExprPtr inner = parse_expr();
            expect(Tok::RParen, "')'");
            return inner;
        }
        fail("expected expression");
    }

    std::vector<Token> tokens_;
    std::size_t index_ = 0;
};

} // namespace

RuleSet parse_ruleset(std::string_view text) {
    Lexer lexer(text);
    Parser parser(lexer.run());
    return parser.run();
}

const char* const kGrammarReference = R"(ruleset = { def } { rule } ;
def     = "let" ident "=" expr ";" ;
rule    = "when" expr "then" action { "," action } ";" ;
action  = ( "set_servers" | "add_servers" | "set_dimmer" | "add_dimmer" )
          "(" expr ")" ;
expr    = or ;
or      = and { "||" and } ;
and     = cmp { "&&" cmp } ;
cmp     = sum [ ( "<" | "<=" | ">" | ">=" | "==" | "!=" ) sum ] ;
sum     = term { ( "+" | "-" ) term } ;
term    = factor { ( "*" | "/" ) factor } ;
factor  = ( "-" | "!" ) factor | primary ;
primary = number | ident | call | "(" expr ")" ;
call    = ( "min" | "max" | "abs" ) "(" expr { "," expr } ")" ;
number  = digits [ "." digits ] [ ( "e" | "E" ) [ "+" | "-" ] digits ] ;
ident   = ( letter | "_" ) { letter | digit | "_" } ;

Notes:
- `#` starts a comment that runs to the end of the line.
- Conditions must be boolean; action arguments must be numeric. Boolean and
  numeric operands never mix: `&&`, `||`, `!` take booleans; arithmetic and
  comparisons take numbers.
- `let` definitions are evaluated top to bottom each interval and may use
  catalog variables and earlier definitions. Definition names must not
  shadow catalog variables.
- Rules are evaluated top to bottom. Every firing rule's actions apply in
  order; for each control variable the last write wins. `add_servers` /
  `add_dimmer` accumulate onto the pending target (starting from the
  current observed value); `set_servers` / `set_dimmer` replace it.
- Server targets are rounded to the nearest integer and clamped to
  [1, max_servers]; dimmer targets are clamped to [0, 1].
- `abs` takes one argument; `min` and `max` take two or more.
- Division by zero or a non-finite intermediate value aborts the whole
  evaluation for that interval; the interval then applies no actions and
  the error is recorded.
- `==`/`!=` compare numbers with exact floating-point semantics; avoid them
  on computed values.
)";

} // namespace rulopt::dsl
