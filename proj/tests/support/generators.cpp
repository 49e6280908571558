#include "generators.hpp"

#include "rulopt/rng.hpp"

#include <cmath>

namespace rulopt::testing {

using namespace rulopt::dsl;

namespace {

double random_literal_value(std::mt19937_64& rng) {
    switch (uniform_index(rng, 5)) {
    case 0:
        return static_cast<double>(uniform_index(rng, 10));
    case 1:
        return uniform01(rng);
    case 2:
        return uniform01(rng) * 100.0;
    case 3:
        return 0.5;
    default: {
        double v = uniform01(rng) * 10.0;
        return v;
    }
    }
}

ExprPtr random_numeric(std::mt19937_64& rng, int depth, const std::vector<std::string>& variables);

ExprPtr random_boolean(std::mt19937_64& rng, int depth, const std::vector<std::string>& variables) {
    if (depth <= 0 || uniform_index(rng, 4) == 0) {
        // Leaf comparison.
        static const BinaryOp ops[] = {BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt,
                                       BinaryOp::Ge, BinaryOp::Eq, BinaryOp::Ne};
        BinaryOp op = ops[uniform_index(rng, 6)];
        return make_binary(op, random_numeric(rng, depth - 1, variables),
                           random_numeric(rng, depth - 1, variables));
    }
    switch (uniform_index(rng, 3)) {
    case 0:
        return make_unary(UnaryOp::Not, random_boolean(rng, depth - 1, variables));
    case 1:
        return make_binary(BinaryOp::And, random_boolean(rng, depth - 1, variables),
                           random_boolean(rng, depth - 1, variables));
    default:
        return make_binary(BinaryOp::Or, random_boolean(rng, depth - 1, variables),
                           random_boolean(rng, depth - 1, variables));
    }
}

ExprPtr random_numeric(std::mt19937_64& rng, int depth, const std::vector<std::string>& variables) {
    if (depth <= 0 || uniform_index(rng, 3) == 0) {
        if (!variables.empty() && uniform_index(rng, 2) == 0)
            return make_ident(variables[uniform_index(rng, variables.size())]);
        return make_literal(random_literal_value(rng));
    }
    switch (uniform_index(rng, 7)) {
    case 0:
        return make_unary(UnaryOp::Neg, random_numeric(rng, depth - 1, variables));
    case 1:
        return make_binary(BinaryOp::Add, random_numeric(rng, depth - 1, variables),
                           random_numeric(rng, depth - 1, variables));
    case 2:
        return make_binary(BinaryOp::Sub, random_numeric(rng, depth - 1, variables),
                           random_numeric(rng, depth - 1, variables));
    case 3:
        return make_binary(BinaryOp::Mul, random_numeric(rng, depth - 1, variables),
                           random_numeric(rng, depth - 1, variables));
    case 4:
        return make_binary(BinaryOp::Div, random_numeric(rng, depth - 1, variables),
                           random_numeric(rng, depth - 1, variables));
    case 5: {
        Builtin fn = uniform_index(rng, 2) == 0 ? Builtin::Min : Builtin::Max;
        std::vector<ExprPtr> args;
        std::size_t arity = 2 + uniform_index(rng, 2);
        for (std::size_t i = 0; i < arity; ++i)
            args.push_back(random_numeric(rng, depth - 1, variables));
        return make_call(fn, std::move(args));
    }
    default: {
        std::vector<ExprPtr> args;
        args.push_back(random_numeric(rng, depth - 1, variables));
        return make_call(Builtin::Abs, std::move(args));
    }
    }
}

} // namespace

ExprPtr random_expr(std::mt19937_64& rng, int depth, bool want_bool,
                    const std::vector<std::string>& variables) {
    return want_bool ? random_boolean(rng, depth, variables) : random_numeric(rng, depth, variables);
}

RuleSet random_ruleset(std::mt19937_64& rng, const std::vector<std::string>& catalog) {
    RuleSet rs;
    std::vector<std::string> scope = catalog;

    std::size_t def_count = uniform_index(rng, 4);
    for (std::size_t i = 0; i < def_count; ++i) {
        std::string name = "d" + std::to_string(i);
        // Defs must stay numeric to be usable as identifiers in numeric
        // context below; boolean defs are exercised separately.
        rs.defs.push_back(Def{name, random_numeric(rng, 2, scope), {}});
        scope.push_back(name);
    }

    std::size_t rule_count = 1 + uniform_index(rng, 5);
    for (std::size_t i = 0; i < rule_count; ++i) {
        Rule rule;
        rule.condition = random_boolean(rng, 2, scope);
        std::size_t action_count = 1 + uniform_index(rng, 3);
        for (std::size_t j = 0; j < action_count; ++j) {
            ActionKind kind = static_cast<ActionKind>(uniform_index(rng, 4));
            rule.actions.push_back(Action{kind, random_numeric(rng, 2, scope), {}});
        }
        rs.rules.push_back(std::move(rule));
    }
    return rs;
}

sim::ScenarioConfig random_scenario(std::mt19937_64& rng) {
    sim::ScenarioConfig sc;
    sc.interval_seconds = 30.0 + uniform01(rng) * 90.0;
    sc.max_servers = 2 + static_cast<int>(uniform_index(rng, 15));
    sc.boot_delay_intervals = static_cast<int>(uniform_index(rng, 4));
    sc.initial_servers = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(sc.max_servers)));
    sc.initial_dimmer = uniform01(rng);
    sc.ewma_alpha = 0.1 + uniform01(rng) * 0.8;
    sc.service.time_mandatory = 0.01 + uniform01(rng) * 0.05;
    sc.service.time_optional = sc.service.time_mandatory * (1.0 + uniform01(rng) * 3.0);
    sc.economics.revenue_mandatory = uniform01(rng) * 2.0;
    sc.economics.revenue_optional = sc.economics.revenue_mandatory * (1.0 + uniform01(rng));
    sc.economics.rt_threshold = 0.2 + uniform01(rng);
    sc.economics.server_cost = uniform01(rng) * 0.2;
    sc.economics.penalty = uniform01(rng);
    sc.seed = rng();
    return sc;
}

workload::Trace random_trace(std::mt19937_64& rng, double interval_seconds) {
    workload::SynthTraceParams params;
    params.length = 5 + static_cast<int>(uniform_index(rng, 40));
    params.base = uniform01(rng) * 60.0;
    params.amplitude = uniform01(rng) * params.base;
    params.period = 4 + static_cast<int>(uniform_index(rng, 30));
    params.burst_probability = uniform01(rng) * 0.3;
    params.burst_multiplier = 1.0 + uniform01(rng) * 2.0;
    params.noise_std = uniform01(rng) * 5.0;
    params.seed = rng();
    return workload::generate_trace(params, interval_seconds);
}

} // namespace rulopt::testing
