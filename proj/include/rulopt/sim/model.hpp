#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rulopt {
class KeyValueConfig;
}

namespace rulopt::sim {

// Mean service times (seconds) for a mandatory-only response and for a
// response carrying the optional content.
struct ServiceModel {
    double time_mandatory = 0.04;
    double time_optional = 0.10;
};

struct EconomicModel {
    double revenue_mandatory = 1.0;   // money per mandatory-only request
    double revenue_optional = 1.5;    // money per optional-content request
    double rt_threshold = 0.75;       // response-time goal (seconds)
    double server_cost = 0.05;        // money per server per second
    double penalty = 0.25;            // latency penalty multiplier
};

struct ScenarioConfig {
    double interval_seconds = 60.0;
    int max_servers = 10;
    int boot_delay_intervals = 2;
    int initial_servers = 2;
    double initial_dimmer = 0.5;
    double ewma_alpha = 0.3;
    ServiceModel service;
    EconomicModel economics;
    std::string trace_id;
    std::uint64_t seed = 42;

    // Throws std::invalid_argument when an invariant is broken.
    void validate() const;
};

// Parses a scenario `key = value` file; unknown keys are errors.
ScenarioConfig scenario_from_config(const KeyValueConfig& cfg);

// Last finished interval's observations, carried so rules can see them.
struct LastObservation {
    double arrival_rate = 0.0;
    double response_time = 0.0;
    double utilization = 0.0;
    double throughput = 0.0;
    double utility = 0.0;
};

struct SimState {
    long interval_index = 0;
    int active_servers = 1;
    std::vector<int> boot_pipeline; // remaining intervals per booting server, each >= 1
    double dimmer = 0.0;
    double ewma_arrival = 0.0;
    double ewma_response = 0.0;
    long intervals_since_server_change = 0;
    double cumulative_utility = 0.0;
    LastObservation last;
};

SimState initial_state(const ScenarioConfig& scenario);

struct IntervalRecord {
    long interval_index = 0;
    double arrival_rate = 0.0;
    int active_servers = 0;
    int booting_servers = 0;
    double dimmer = 0.0;
    double service_rate = 0.0; // per server
    double utilization = 0.0;
    double response_time = 0.0;
    bool violated = false;
    double interval_utility = 0.0;
    std::string applied_actions = "none";
    std::optional<std::string> eval_error;
};

// Observable-variable vector exposed to rules. The field set is the
// authoritative variable catalog; every value is finite.
struct MetricsSnapshot {
    double arrival_rate = 0.0;
    double arrival_rate_ewma = 0.0;
    double response_time = 0.0;
    double response_time_ewma = 0.0;
    double utilization = 0.0;
    double servers = 1.0;
    double booting_servers = 0.0;
    double max_servers = 1.0;
    double dimmer = 0.0;
    double throughput = 0.0;
    double intervals_since_server_change = 0.0;
    double interval_index = 0.0;
    double last_interval_utility = 0.0;

    static constexpr std::array<std::string_view, 13> field_names = {
        "arrival_rate",
        "arrival_rate_ewma",
        "response_time",
        "response_time_ewma",
        "utilization",
        "servers",
        "booting_servers",
        "max_servers",
        "dimmer",
        "throughput",
        "intervals_since_server_change",
        "interval_index",
        "last_interval_utility",
    };

    std::optional<double> value_of(std::string_view name) const;
};

MetricsSnapshot snapshot_from(const SimState& state, const ScenarioConfig& scenario);

} // namespace rulopt::sim
