#include "rulopt/sim/queueing.hpp"

#include "rulopt/text.hpp"

#include <algorithm>
#include <cmath>

namespace rulopt::sim {

double service_rate(double dimmer, const ServiceModel& model) {
    double d = std::clamp(dimmer, 0.0, 1.0);
    return 1.0 / (d * model.time_optional + (1.0 - d) * model.time_mandatory);
}

double erlang_c(int servers, double offered_load) {
    if (servers < 1)
        throw std::invalid_argument("erlang_c: server count must be >= 1");
    if (offered_load < 0.0)
        throw std::invalid_argument("erlang_c: offered load must be >= 0");
    if (offered_load >= static_cast<double>(servers))
        throw SaturationError("erlang_c: offered load " + format_double(offered_load) +
                              " saturates " + std::to_string(servers) + " servers");
    if (offered_load == 0.0)
        return 0.0;

    // Erlang-B recurrence: B(0) = 1, B(k) = a*B(k-1) / (k + a*B(k-1)).
    double b = 1.0;
    for (int k = 1; k <= servers; ++k)
        b = offered_load * b / (static_cast<double>(k) + offered_load * b);
    double rho = offered_load / static_cast<double>(servers);
    return b / (1.0 - rho + rho * b);
}

ResponseTime interval_response_time(double lambda, double mu, int servers, double interval_seconds) {
    if (mu <= 0.0)
        throw std::invalid_argument("interval_response_time: service rate must be > 0");
    if (servers < 1)
        throw std::invalid_argument("interval_response_time: server count must be >= 1");
    if (lambda < 0.0)
        throw std::invalid_argument("interval_response_time: arrival rate must be >= 0");

    double capacity = static_cast<double>(servers) * mu;
    double rho = lambda / capacity;
    if (rho >= 1.0 - 1e-6)
        return ResponseTime{interval_seconds, true};
    double wait = erlang_c(servers, lambda / mu) / (capacity - lambda);
    return ResponseTime{1.0 / mu + wait, false};
}

double interval_utility(double lambda, double mu, int active_servers, int booting_servers, double dimmer,
                        double response_time, bool saturated, const EconomicModel& econ, double interval_seconds) {
    double served = std::min(lambda, static_cast<double>(active_servers) * mu);
    double revenue_rate;
    if (!saturated && response_time <= econ.rt_threshold) {
        double per_request = dimmer * econ.revenue_optional + (1.0 - dimmer) * econ.revenue_mandatory;
        revenue_rate = served * per_request;
    } else {
        revenue_rate = -econ.penalty * lambda * econ.revenue_mandatory;
    }
    double cost_rate = static_cast<double>(active_servers + booting_servers) * econ.server_cost;
    return interval_seconds * (revenue_rate - cost_rate);
}

} // namespace rulopt::sim
