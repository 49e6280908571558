#pragma once

#include "rulopt/dsl/ast.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace rulopt::dsl {

// Lexical or syntax error. The message already embeds line:column and the
// offending token; it is fed back verbatim to the planner on retry.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, SourcePos pos)
        : std::runtime_error(std::move(message)), pos_(pos) {}

    SourcePos pos() const { return pos_; }
    int line() const { return pos_.line; }
    int column() const { return pos_.column; }

private:
    SourcePos pos_;
};

// Grammar:
//   ruleset = { def } { rule }
//   def     = "let" IDENT "=" expr ";"
//   rule    = "when" expr "then" action { "," action } ";"
//   action  = ("set_servers"|"add_servers"|"set_dimmer"|"add_dimmer") "(" expr ")"
// `#` comments run to end of line. Operator precedence, loosest first:
// || < && < comparisons < additive < multiplicative < unary.
RuleSet parse_ruleset(std::string_view text);

// EBNF grammar plus evaluation notes; embedded in the planner prompt and
// mirrored in docs/rule-language.md.
extern const char* const kGrammarReference;

} // namespace rulopt::dsl
