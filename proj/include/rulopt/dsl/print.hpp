#pragma once

#include "rulopt/dsl/ast.hpp"

#include <string>

namespace rulopt::dsl {

// Canonical text form: one def or rule per line, minimal parentheses.
// parse_ruleset(print_ruleset(rs)) is structurally equal to rs for any
// valid AST.
std::string print_ruleset(const RuleSet& rs);
std::string print_expr(const Expr& expr);

} // namespace rulopt::dsl
