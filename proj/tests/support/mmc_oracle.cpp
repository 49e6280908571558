#include "mmc_oracle.hpp"

#include "rulopt/rng.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <vector>

namespace rulopt::testing {

MmcOracleResult simulate_mmc(double lambda, double mu, int servers, long requests, std::uint64_t seed,
                             long warmup) {
    if (lambda <= 0.0 || mu <= 0.0 || servers < 1 || requests <= warmup)
        throw std::invalid_argument("simulate_mmc: bad parameters");

    std::mt19937_64 rng(seed);

    // Earliest-free-server heap. FCFS: each arrival starts service at
    // max(arrival, earliest free time).
    std::priority_queue<double, std::vector<double>, std::greater<>> free_at;
    for (int i = 0; i < servers; ++i)
        free_at.push(0.0);

    double clock = 0.0;
    double total_response = 0.0;
    long counted = 0;
    for (long i = 0; i < requests; ++i) {
        clock += exponential(rng, lambda);
        double start = std::max(clock, free_at.top());
        free_at.pop();
        double done = start + exponential(rng, mu);
        free_at.push(done);
        if (i >= warmup) {
            total_response += done - clock;
            ++counted;
        }
    }
    return MmcOracleResult{total_response / static_cast<double>(counted), counted};
}

} // namespace rulopt::testing
