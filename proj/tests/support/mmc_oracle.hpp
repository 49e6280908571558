#pragma once

#include <cstdint>

namespace rulopt::testing {

struct MmcOracleResult {
    double mean_response = 0.0;
    long served = 0;
};

// Independent discrete-event M/M/c FCFS simulation: exponential
// interarrivals at `lambda`, exponential service at `mu`, `servers` equal
// servers. Requests beyond `warmup` contribute to the mean response time.
// Deliberately shares no code with the analytic queueing module.
MmcOracleResult simulate_mmc(double lambda, double mu, int servers, long requests, std::uint64_t seed,
                             long warmup);

} // namespace rulopt::testing
