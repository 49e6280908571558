#include "rulopt/sim/simulator.hpp"

#include "rulopt/dsl/eval.hpp"
#include "rulopt/sim/queueing.hpp"
#include "rulopt/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace rulopt::sim {

IntervalRecord step(SimState& state, double arrival_rate, const dsl::RuleSet& rules,
                    const ScenarioConfig& scenario) {
    if (arrival_rate < 0.0 || !std::isfinite(arrival_rate))
        throw std::invalid_argument("step: arrival rate must be finite and >= 0");

    IntervalRecord record;
    record.interval_index = state.interval_index;
    record.arrival_rate = arrival_rate;

    // 1-2. Observe last interval, evaluate rules.
    MetricsSnapshot snapshot = snapshot_from(state, scenario);
    dsl::ActionSet actions = dsl::evaluate(rules, snapshot);
    if (actions.error)
        record.eval_error = actions.error;

    // 3. Apply actions. Entries appended this interval must survive until
    // the next interval's aging pass, so remember the pre-existing prefix.
    std::size_t aged_prefix = state.boot_pipeline.size();
    std::string applied;
    bool server_change = false;
    if (actions.server_target) {
        int target = static_cast<int>(std::clamp<long>(*actions.server_target, 1, scenario.max_servers));
        int committed = state.active_servers + static_cast<int>(state.boot_pipeline.size());
        if (target > committed) {
            int additions = target - committed;
            if (scenario.boot_delay_intervals == 0) {
                state.active_servers += additions;
            } else {
                for (int i = 0; i < additions; ++i)
                    state.boot_pipeline.push_back(scenario.boot_delay_intervals);
            }
            server_change = true;
        } else if (target < committed) {
            int removals = committed - target;
            // Cancel booting servers first (newest first), then drop active.
            while (removals > 0 && !state.boot_pipeline.empty()) {
                state.boot_pipeline.pop_back();
                --removals;
            }
            state.active_servers = std::max(1, state.active_servers - removals);
            server_change = true;
        }
        aged_prefix = std::min(aged_prefix, state.boot_pipeline.size());
        applied += "servers->" + std::to_string(target);
    }
    if (actions.dimmer_target) {
        state.dimmer = std::clamp(*actions.dimmer_target, 0.0, 1.0);
        if (!applied.empty())
            applied += "; ";
        applied += "dimmer->" + format_double(state.dimmer);
    }
    record.applied_actions = applied.empty() ? "none" : applied;

    // 4. Age the pre-existing pipeline; promote finished servers.
    int promoted = 0;
    std::size_t write = 0;
    for (std::size_t i = 0; i < state.boot_pipeline.size(); ++i) {
        int remaining = state.boot_pipeline[i] - (i < aged_prefix ? 1 : 0);
        if (remaining <= 0)
            ++promoted;
        else
            state.boot_pipeline[write++] = remaining;
    }
    state.boot_pipeline.resize(write);
    state.active_servers += promoted;

    // 5. Score the interval.
    double mu = service_rate(state.dimmer, scenario.service);
    ResponseTime rt = interval_response_time(arrival_rate, mu, state.active_servers, scenario.interval_seconds);
    double capacity = static_cast<double>(state.active_servers) * mu;
    double utility = interval_utility(arrival_rate, mu, state.active_servers,
                                      static_cast<int>(state.boot_pipeline.size()), state.dimmer, rt.seconds,
                                      rt.saturated, scenario.economics, scenario.interval_seconds);

    record.active_servers = state.active_servers;
    record.booting_servers = static_cast<int>(state.boot_pipeline.size());
    record.dimmer = state.dimmer;
    record.service_rate = mu;
    record.utilization = capacity > 0.0 ? arrival_rate / capacity : 0.0;
    record.response_time = rt.seconds;
    record.violated = rt.saturated || rt.seconds > scenario.economics.rt_threshold;
    record.interval_utility = utility;

    // 6. Fold into state.
    double alpha = scenario.ewma_alpha;
    state.ewma_arrival = alpha * arrival_rate + (1.0 - alpha) * state.ewma_arrival;
    state.ewma_response = alpha * rt.seconds + (1.0 - alpha) * state.ewma_response;
    state.cumulative_utility += utility;
    state.intervals_since_server_change = server_change ? 0 : state.intervals_since_server_change + 1;
    state.last = LastObservation{arrival_rate, rt.seconds, record.utilization,
                                 std::min(arrival_rate, capacity), utility};
    state.interval_index += 1;
    return record;
}

SimResult run_simulation(const ScenarioConfig& scenario, const dsl::RuleSet& rules,
                         const workload::Trace& trace) {
    scenario.validate();
    if (trace.rates.empty())
        throw std::invalid_argument("run_simulation: trace is empty");
    if (trace.interval_seconds > 0.0 && trace.interval_seconds != scenario.interval_seconds)
        throw std::invalid_argument("run_simulation: trace interval (" + format_double(trace.interval_seconds) +
                                    "s) does not match scenario interval (" +
                                    format_double(scenario.interval_seconds) + "s)");

    SimResult result;
    result.records.reserve(trace.rates.size());
    SimState state = initial_state(scenario);
    for (double lambda : trace.rates) {
        result.records.push_back(step(state, lambda, rules, scenario));
        if (result.records.back().eval_error)
            ++result.eval_error_count;
    }
    result.total_utility = state.cumulative_utility;
    return result;
}

std::string to_csv(const SimResult& result) {
    std::string out = "interval,arrival_rate,servers,booting,dimmer,utilization,response_time,violated,utility,"
                      "actions,error\n";
    for (const auto& r : result.records) {
        out += std::to_string(r.interval_index);
        out += ',';
        out += format_double(r.arrival_rate);
        out += ',';
        out += std::to_string(r.active_servers);
        out += ',';
        out += std::to_string(r.booting_servers);
        out += ',';
        out += format_double(r.dimmer);
        out += ',';
        out += format_double(r.utilization);
        out += ',';
        out += format_double(r.response_time);
        out += ',';
        out += r.violated ? "1" : "0";
        out += ',';
        out += format_double(r.interval_utility);
        out += ',';
        out += csv_field(r.applied_actions);
        out += ',';
        out += csv_field(r.eval_error.value_or(""));
        out += '\n';
    }
    return out;
}

void write_csv(const SimResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << to_csv(result);
}

} // namespace rulopt::sim
