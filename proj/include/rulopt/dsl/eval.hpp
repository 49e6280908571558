#pragma once

#include "rulopt/dsl/ast.hpp"
#include "rulopt/sim/model.hpp"

#include <optional>
#include <string>

namespace rulopt::dsl {

// Resolved control targets for one interval. On an evaluation error both
// targets are empty and `error` holds the diagnostic; the interval becomes
// a no-op.
struct ActionSet {
    std::optional<long> server_target; // integer >= 0, pre-clamp
    std::optional<double> dimmer_target;
    std::optional<std::string> error;

    bool empty() const { return !server_target && !dimmer_target; }
};

// Pure evaluation of a validated ruleset against one snapshot. Defs are
// evaluated in order first; rules fire top-down; actions apply in order
// with last-writer-wins per control variable (add_* accumulates onto the
// pending target, seeded from the snapshot's current value). Division by
// zero or a non-finite intermediate anywhere aborts evaluation: the
// returned ActionSet is empty and carries the diagnostic.
ActionSet evaluate(const RuleSet& rs, const sim::MetricsSnapshot& snapshot);

} // namespace rulopt::dsl
