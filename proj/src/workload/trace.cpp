#include "rulopt/workload/trace.hpp"

#include "rulopt/config.hpp"
#include "rulopt/rng.hpp"
#include "rulopt/text.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rulopt::workload {

void SynthTraceParams::validate() const {
    if (length < 1)
        throw TraceError("trace params: length must be >= 1");
    if (base < 0.0)
        throw TraceError("trace params: base must be >= 0");
    if (period < 1)
        throw TraceError("trace params: period must be >= 1");
    if (burst_probability < 0.0 || burst_probability > 1.0)
        throw TraceError("trace params: burst_probability must be in [0,1]");
    if (burst_multiplier < 1.0)
        throw TraceError("trace params: burst_multiplier must be >= 1");
    if (noise_std < 0.0)
        throw TraceError("trace params: noise_std must be >= 0");
    if (amplitude < 0.0)
        throw TraceError("trace params: amplitude must be >= 0");
}

SynthTraceParams trace_params_from_config(const KeyValueConfig& cfg) {
    SynthTraceParams p;
    p.length = cfg.get_int("length", p.length);
    p.base = cfg.get_double("base", p.base);
    p.amplitude = cfg.get_double("amplitude", p.amplitude);
    p.period = cfg.get_int("period", p.period);
    p.burst_probability = cfg.get_double("burst_probability", p.burst_probability);
    p.burst_multiplier = cfg.get_double("burst_multiplier", p.burst_multiplier);
    p.noise_std = cfg.get_double("noise_std", p.noise_std);
    p.seed = cfg.get_uint64("seed", p.seed);
    cfg.reject_unknown();
    p.validate();
    return p;
}

namespace {

double parse_rate(std::string_view field, int line_no) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw TraceError("malformed arrival_rate at line " + std::to_string(line_no));
    if (!std::isfinite(value))
        throw TraceError("non-finite rate at line " + std::to_string(line_no));
    if (value < 0.0)
        throw TraceError("negative rate at line " + std::to_string(line_no));
    return value;
}

} // namespace

Trace parse_trace_csv(const std::string& text, double interval_seconds) {
    Trace trace;
    trace.interval_seconds = interval_seconds;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    long expected_index = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty())
            continue;
        if (!header_seen) {
            if (view != "interval,arrival_rate")
                throw TraceError("expected header `interval,arrival_rate` at line " + std::to_string(line_no));
            header_seen = true;
            continue;
        }
        auto comma = view.find(',');
        if (comma == std::string_view::npos)
            throw TraceError("malformed row at line " + std::to_string(line_no));
        std::string_view index_field = trim(view.substr(0, comma));
        std::string_view rate_field = trim(view.substr(comma + 1));

        long index = 0;
        auto [ptr, ec] = std::from_chars(index_field.data(), index_field.data() + index_field.size(), index);
        if (ec != std::errc{} || ptr != index_field.data() + index_field.size())
            throw TraceError("malformed interval at line " + std::to_string(line_no));
        if (index != expected_index)
            throw TraceError("gap in interval numbering at line " + std::to_string(line_no) + ": expected " +
                             std::to_string(expected_index) + ", got " + std::to_string(index));
        ++expected_index;

        trace.rates.push_back(parse_rate(rate_field, line_no));
    }
    if (!header_seen)
        throw TraceError("empty trace: missing header");
    if (trace.rates.empty())
        throw TraceError("empty trace: no data rows");
    return trace;
}

std::string emit_trace_csv(const Trace& trace) {
    std::string out = "interval,arrival_rate\n";
    for (std::size_t i = 0; i < trace.rates.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(trace.rates[i]);
        out += '\n';
    }
    return out;
}

Trace load_trace_csv(const std::string& path, double interval_seconds) {
    std::ifstream in(path);
    if (!in)
        throw TraceError("cannot open trace file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_trace_csv(buf.str(), interval_seconds);
}

Trace generate_trace(const SynthTraceParams& params, double interval_seconds) {
    params.validate();
    Trace trace;
    trace.interval_seconds = interval_seconds;
    trace.rates.reserve(static_cast<std::size_t>(params.length));

    std::mt19937_64 rng(params.seed);
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (int t = 0; t < params.length; ++t) {
        // Fixed draw order per interval: burst coin first, then noise.
        double burst = 0.0;
        double coin = uniform01(rng);
        if (coin < params.burst_probability)
            burst = params.base * (params.burst_multiplier - 1.0);
        double noise = gaussian(rng) * params.noise_std;
        double seasonal = params.amplitude * std::sin(two_pi * static_cast<double>(t) / params.period);
        trace.rates.push_back(std::max(0.0, params.base + seasonal + burst + noise));
    }
    return trace;
}

} // namespace rulopt::workload
