#pragma once

#include "rulopt/dsl/ast.hpp"
#include "rulopt/sim/model.hpp"
#include "rulopt/workload/trace.hpp"

#include <string>
#include <vector>

namespace rulopt::sim {

struct SimResult {
    std::vector<IntervalRecord> records;
    double total_utility = 0.0;
    int eval_error_count = 0;
};

// Advances the simulation by one interval:
//   1. snapshot the previous interval's observations (rules never see the
//      current interval's outcome),
//   2. evaluate the ruleset; evaluation errors make the interval a no-op,
//   3. apply actions (server target clamped to [1, max], additions enter
//      the boot pipeline, removals are immediate, dimmer clamped to [0,1]),
//   4. age the boot pipeline that existed before this interval's additions
//      and promote finished servers,
//   5. score the interval with active servers only; booting servers are
//      charged but serve no load,
//   6. fold the interval into the EWMAs and the cumulative utility.
IntervalRecord step(SimState& state, double arrival_rate, const dsl::RuleSet& rules,
                    const ScenarioConfig& scenario);

// Deterministic: identical inputs give bit-identical records. Per-interval
// rule evaluation failures are recorded, not fatal.
SimResult run_simulation(const ScenarioConfig& scenario, const dsl::RuleSet& rules,
                         const workload::Trace& trace);

// CSV with header
// interval,arrival_rate,servers,booting,dimmer,utilization,response_time,violated,utility,actions,error
std::string to_csv(const SimResult& result);
void write_csv(const SimResult& result, const std::string& path);

} // namespace rulopt::sim
