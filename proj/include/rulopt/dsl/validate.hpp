#pragma once

#include "rulopt/dsl/ast.hpp"

#include <set>
#include <string>
#include <vector>

namespace rulopt::dsl {

struct Diagnostic {
    std::string message;
    SourcePos pos;
};

std::string to_string(const Diagnostic& d);
std::string join_diagnostics(const std::vector<Diagnostic>& ds);

// Static checks against a variable catalog (the observable snapshot fields):
// identifiers resolve to a catalog variable or an earlier def, def names are
// unique and do not shadow the catalog, boolean/numeric operands never mix,
// conditions are boolean, action arguments numeric, at least one rule.
// Returns an empty vector when the ruleset is valid.
std::vector<Diagnostic> validate(const RuleSet& rs, const std::vector<std::string>& catalog);

// Catalog variables referenced by rule conditions, following def references
// transitively.
std::set<std::string> condition_variables(const RuleSet& rs, const std::vector<std::string>& catalog);

} // namespace rulopt::dsl
