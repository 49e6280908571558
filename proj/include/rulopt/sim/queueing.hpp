#pragma once

#include "rulopt/sim/model.hpp"

#include <stdexcept>

namespace rulopt::sim {

class SaturationError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Per-server service rate (requests/second) at the given dimmer setting.
// The dimmer blends the two mean service times, so the rate is
// 1 / (d * t_o + (1 - d) * t_m) and non-increasing in d.
double service_rate(double dimmer, const ServiceModel& model);

// Erlang-C probability that an arriving request has to queue in an M/M/c
// system with offered load a = lambda / mu. Requires a < c; throws
// SaturationError otherwise. Evaluated with the usual recurrence on the
// Erlang-B blocking probability for numerical stability at large c.
double erlang_c(int servers, double offered_load);

struct ResponseTime {
    double seconds = 0.0;
    bool saturated = false;
};

// Mean response time of the interval. Below saturation this is the M/M/c
// expectation 1/mu + C(c, a) / (c*mu - lambda); at or beyond saturation the
// interval length itself stands in as the response time.
ResponseTime interval_response_time(double lambda, double mu, int servers, double interval_seconds);

// Revenue-minus-cost utility of one interval. Booting servers are charged
// but serve no load. When the response-time goal is missed (or the system
// saturates) revenue flips to a latency penalty, so utilities can go
// negative.
double interval_utility(double lambda, double mu, int active_servers, int booting_servers, double dimmer,
                        double response_time, bool saturated, const EconomicModel& econ, double interval_seconds);

} // namespace rulopt::sim
