#pragma once

#include "rulopt/dsl/ast.hpp"
#include "rulopt/sim/model.hpp"
#include "rulopt/workload/trace.hpp"

#include <random>
#include <string>
#include <vector>

namespace rulopt::testing {

// Well-typed random expression: boolean or numeric, identifiers drawn from
// `variables`. Literal values are non-negative and finite so they survive
// the print/parse round trip.
dsl::ExprPtr random_expr(std::mt19937_64& rng, int depth, bool want_bool,
                         const std::vector<std::string>& variables);

// Valid-by-construction ruleset against the given catalog: 0-3 defs,
// 1-5 rules, 1-3 actions each.
dsl::RuleSet random_ruleset(std::mt19937_64& rng, const std::vector<std::string>& catalog);

sim::ScenarioConfig random_scenario(std::mt19937_64& rng);
workload::Trace random_trace(std::mt19937_64& rng, double interval_seconds);

} // namespace rulopt::testing
