#include "rulopt/sim/model.hpp"

#include "rulopt/config.hpp"

#include <stdexcept>

namespace rulopt::sim {

void ScenarioConfig::validate() const {
    if (interval_seconds <= 0.0)
        throw std::invalid_argument("scenario: interval_seconds must be > 0");
    if (max_servers < 1)
        throw std::invalid_argument("scenario: max_servers must be >= 1");
    if (initial_servers < 1 || initial_servers > max_servers)
        throw std::invalid_argument("scenario: initial_servers must be in [1, max_servers]");
    if (boot_delay_intervals < 0)
        throw std::invalid_argument("scenario: boot_delay_intervals must be >= 0");
    if (initial_dimmer < 0.0 || initial_dimmer > 1.0)
        throw std::invalid_argument("scenario: initial_dimmer must be in [0,1]");
    if (ewma_alpha <= 0.0 || ewma_alpha > 1.0)
        throw std::invalid_argument("scenario: ewma_alpha must be in (0,1]");
    if (service.time_mandatory <= 0.0 || service.time_mandatory > service.time_optional)
        throw std::invalid_argument("scenario: need 0 < service_time_mandatory <= service_time_optional");
    if (economics.revenue_mandatory < 0.0 || economics.revenue_mandatory > economics.revenue_optional)
        throw std::invalid_argument("scenario: need 0 <= revenue_mandatory <= revenue_optional");
    if (economics.rt_threshold <= 0.0)
        throw std::invalid_argument("scenario: response_time_threshold must be > 0");
    if (economics.server_cost < 0.0)
        throw std::invalid_argument("scenario: server_cost_per_s must be >= 0");
    if (economics.penalty < 0.0)
        throw std::invalid_argument("scenario: latency_penalty must be >= 0");
}

ScenarioConfig scenario_from_config(const KeyValueConfig& cfg) {
    ScenarioConfig sc;
    sc.interval_seconds = cfg.get_double("interval_seconds", sc.interval_seconds);
    sc.max_servers = cfg.get_int("max_servers", sc.max_servers);
    sc.boot_delay_intervals = cfg.get_int("boot_delay_intervals", sc.boot_delay_intervals);
    sc.initial_servers = cfg.get_int("initial_servers", sc.initial_servers);
    sc.initial_dimmer = cfg.get_double("initial_dimmer", sc.initial_dimmer);
    sc.ewma_alpha = cfg.get_double("ewma_alpha", sc.ewma_alpha);
    sc.service.time_mandatory = cfg.get_double("service_time_mandatory", sc.service.time_mandatory);
    sc.service.time_optional = cfg.get_double("service_time_optional", sc.service.time_optional);
    sc.economics.revenue_mandatory = cfg.get_double("revenue_mandatory", sc.economics.revenue_mandatory);
    sc.economics.revenue_optional = cfg.get_double("revenue_optional", sc.economics.revenue_optional);
    sc.economics.rt_threshold = cfg.get_double("response_time_threshold", sc.economics.rt_threshold);
    sc.economics.server_cost = cfg.get_double("server_cost_per_s", sc.economics.server_cost);
    sc.economics.penalty = cfg.get_double("latency_penalty", sc.economics.penalty);
    sc.trace_id = cfg.get_string("trace_id", sc.trace_id);
    sc.seed = cfg.get_uint64("seed", sc.seed);
    cfg.reject_unknown();
    sc.validate();
    return sc;
}

SimState initial_state(const ScenarioConfig& scenario) {
    scenario.validate();
    SimState state;
    state.active_servers = scenario.initial_servers;
    state.dimmer = scenario.initial_dimmer;
    return state;
}

std::optional<double> MetricsSnapshot::value_of(std::string_view name) const {
    if (name == "arrival_rate")
        return arrival_rate;
    if (name == "arrival_rate_ewma")
        return arrival_rate_ewma;
    if (name == "response_time")
        return response_time;
    if (name == "response_time_ewma")
        return response_time_ewma;
    if (name == "utilization")
        return utilization;
    if (name == "servers")
        return servers;
    if (name == "booting_servers")
        return booting_servers;
    if (name == "max_servers")
        return max_servers;
    if (name == "dimmer")
        return dimmer;
    if (name == "throughput")
        return throughput;
    if (name == "intervals_since_server_change")
        return intervals_since_server_change;
    if (name == "interval_index")
        return interval_index;
    if (name == "last_interval_utility")
        return last_interval_utility;
    return std::nullopt;
}

MetricsSnapshot snapshot_from(const SimState& state, const ScenarioConfig& scenario) {
    MetricsSnapshot snap;
    snap.arrival_rate = state.last.arrival_rate;
    snap.arrival_rate_ewma = state.ewma_arrival;
    snap.response_time = state.last.response_time;
    snap.response_time_ewma = state.ewma_response;
    snap.utilization = state.last.utilization;
    snap.servers = static_cast<double>(state.active_servers);
    snap.booting_servers = static_cast<double>(state.boot_pipeline.size());
    snap.max_servers = static_cast<double>(scenario.max_servers);
    snap.dimmer = state.dimmer;
    snap.throughput = state.last.throughput;
    snap.intervals_since_server_change = static_cast<double>(state.intervals_since_server_change);
    snap.interval_index = static_cast<double>(state.interval_index);
    snap.last_interval_utility = state.last.utility;
    return snap;
}

} // namespace rulopt::sim
