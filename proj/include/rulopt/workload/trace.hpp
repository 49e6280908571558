#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rulopt {
class KeyValueConfig;
}

namespace rulopt::workload {

class TraceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Trace {
    double interval_seconds = 60.0;
    std::vector<double> rates; // arrival rate per interval, requests/second
};

// Parameters of the synthetic sinusoid + burst + noise generator.
struct SynthTraceParams {
    int length = 120;             // intervals
    double base = 30.0;           // requests/second
    double amplitude = 15.0;      // requests/second
    int period = 40;              // intervals per sinusoid cycle
    double burst_probability = 0.1;
    double burst_multiplier = 2.0; // >= 1
    double noise_std = 3.0;        // requests/second
    std::uint64_t seed = 42;

    void validate() const;
};

SynthTraceParams trace_params_from_config(const KeyValueConfig& cfg);

// CSV with header `interval,arrival_rate`; intervals must run 0..n-1.
// Errors carry the offending line number.
Trace parse_trace_csv(const std::string& text, double interval_seconds = 60.0);
std::string emit_trace_csv(const Trace& trace);

Trace load_trace_csv(const std::string& path, double interval_seconds = 60.0);

// lambda_t = max(0, base + amplitude*sin(2*pi*t/period) + burst_t + gauss),
// where burst_t = base*(burst_multiplier-1) with probability
// burst_probability. Deterministic in the seed.
Trace generate_trace(const SynthTraceParams& params, double interval_seconds = 60.0);

} // namespace rulopt::workload
