#include "rulopt/assets.hpp"
#include "rulopt/config.hpp"
#include "rulopt/dsl/parse.hpp"
#include "rulopt/dsl/validate.hpp"
#include "rulopt/harness/experiment.hpp"
#include "rulopt/knowledge/knowledge.hpp"
#include "rulopt/opt/optimizer.hpp"
#include "rulopt/sim/simulator.hpp"
#include "rulopt/text.hpp"
#include "rulopt/workload/trace.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using namespace rulopt;

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    if (!in)
        throw std::runtime_error("cannot open " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + p.string());
    out << content;
}

sim::ScenarioConfig load_scenario(const std::string& path) {
    return sim::scenario_from_config(KeyValueConfig::load(path));
}

// A trace argument is either a ready CSV or a generator params file.
workload::Trace load_trace_arg(const std::string& path, double interval_seconds) {
    if (fs::path(path).extension() == ".csv")
        return workload::load_trace_csv(path, interval_seconds);
    KeyValueConfig cfg = KeyValueConfig::load(path);
    return workload::generate_trace(workload::trace_params_from_config(cfg), interval_seconds);
}

dsl::RuleSet parse_and_validate(const std::string& text, const sim::ScenarioConfig& scenario) {
    dsl::RuleSet rules = dsl::parse_ruleset(text);
    auto catalog = knowledge::catalog_names(knowledge::default_catalog(scenario));
    auto problems = dsl::validate(rules, catalog);
    if (!problems.empty())
        throw std::runtime_error("ruleset is invalid:\n" + dsl::join_diagnostics(problems));
    return rules;
}

int run_simulation_command(const std::string& scenario_file, const std::string& rules_file,
                           const std::string& trace_file, const std::string& out_dir,
                           const std::string& label) {
    sim::ScenarioConfig scenario = load_scenario(scenario_file);
    workload::Trace trace = load_trace_arg(trace_file, scenario.interval_seconds);
    std::string rules_text = rules_file.empty() ? std::string(assets::kDefaultRules) : read_file(rules_file);
    dsl::RuleSet rules = parse_and_validate(rules_text, scenario);

    sim::SimResult result = sim::run_simulation(scenario, rules, trace);
    fs::create_directories(out_dir);
    sim::write_csv(result, (fs::path(out_dir) / (label + ".csv")).string());

    std::cout << label << ": " << trace.rates.size() << " intervals, total utility "
              << format_double(result.total_utility) << ", rule evaluation errors "
              << result.eval_error_count << "\n";
    std::cout << "wrote " << (fs::path(out_dir) / (label + ".csv")).string() << "\n";
    return 0;
}

struct OptimizeArgs {
    std::string scenario_file;
    std::string trace_file;
    std::string optimizer = "scripted";
    int iterations = 10;
    std::uint64_t seed = 42;
    std::string out_dir;
    std::string policy = "always-replace";
    std::string scripts_dir;
    std::string template_file;
    std::string bounds_file;
    std::string llm_config_file;
    std::string start_rules_file;
    int max_parse_retries = 3;
};

int run_optimize_command(const OptimizeArgs& args) {
    sim::ScenarioConfig scenario = load_scenario(args.scenario_file);
    workload::Trace trace = load_trace_arg(args.trace_file, scenario.interval_seconds);
    auto catalog = knowledge::catalog_names(knowledge::default_catalog(scenario));

    opt::LlmOptimizerOptions llm_options;
    llm_options.max_parse_retries = args.max_parse_retries;

    std::unique_ptr<llm::ChatClient> client;
    std::unique_ptr<opt::Optimizer> optimizer;
    harness::OptimizerKind kind = harness::parse_optimizer_kind(args.optimizer);
    switch (kind) {
    case harness::OptimizerKind::Scripted: {
        if (args.scripts_dir.empty())
            throw CLI::ValidationError("--scripts is required with --optimizer scripted");
        optimizer = std::make_unique<opt::ScriptedOptimizer>(opt::load_scripts(args.scripts_dir), catalog);
        break;
    }
    case harness::OptimizerKind::HillClimb: {
        if (args.template_file.empty() || args.bounds_file.empty())
            throw CLI::ValidationError("--template and --bounds are required with --optimizer hillclimb");
        optimizer = std::make_unique<opt::HillClimbOptimizer>(
            read_file(args.template_file), opt::parse_slot_bounds(read_file(args.bounds_file), args.bounds_file),
            catalog, args.seed);
        break;
    }
    case harness::OptimizerKind::Llm: {
        if (args.llm_config_file.empty())
            throw CLI::ValidationError("--llm-config is required with --optimizer llm");
        KeyValueConfig cfg = KeyValueConfig::load(args.llm_config_file);
        llm::ClientConfig cc = llm::client_config_from(cfg);
        cfg.reject_unknown();
        client = std::make_unique<llm::ChatClient>(std::move(cc));
        optimizer = std::make_unique<opt::LlmOptimizer>(*client, llm_options);
        break;
    }
    }

    std::string start_rules =
        args.start_rules_file.empty() ? std::string(assets::kDefaultRules) : read_file(args.start_rules_file);

    opt::RunOptions run_options;
    run_options.policy = opt::parse_policy(args.policy);

    opt::OptimizationRun run(scenario, trace, start_rules, *optimizer, run_options);
    std::cout << "iteration 0 (starting ruleset): utility " << format_double(run.current_utility()) << "\n";

    fs::path out(args.out_dir);
    fs::create_directories(out);

    std::string csv = "iteration,utility,parse_ok,eval_errors,llm_calls,duration\n";
    for (int i = 0; i < args.iterations; ++i) {
        knowledge::IterationResult result = run.iterate();
        csv += std::to_string(result.iteration) + ",";
        csv += result.total_utility ? format_double(*result.total_utility) : "";
        csv += std::string(",") + (result.parse_ok ? "1" : "0") + "," + std::to_string(result.eval_error_count) +
               "," + std::to_string(result.llm_calls) + "," + format_double(result.duration_seconds) + "\n";
        std::cout << "iteration " << result.iteration << ": ";
        if (result.total_utility)
            std::cout << "utility " << format_double(*result.total_utility)
                      << (result.accepted ? " (installed)" : " (kept previous)");
        else
            std::cout << "failed (" << result.failure.value_or("no valid ruleset") << ")";
        std::cout << "\n";
    }
    write_file(out / "iterations.csv", csv);
    write_file(out / "best.rules", run.best().ruleset_text);
    knowledge::save_knowledge_base(run.kb(), out / "knowledge");
    for (const auto& [iteration, sim] : run.simulations())
        sim::write_csv(sim, (out / "knowledge" / "history" / ("iter_" + std::to_string(iteration) + ".csv"))
                                .string());

    std::cout << "best: iteration " << run.best().iteration << " with utility "
              << format_double(run.best().utility) << "\n";
    std::cout << "artifacts in " << out.string() << "\n";
    if (client != nullptr && !client->warnings().empty()) {
        for (const auto& w : client->warnings())
            std::cerr << "replay warning: " << w << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptation-rule workbench: queueing simulator, rule DSL and rule optimizers"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run one simulation of a ruleset against a trace");
    std::string sim_scenario, sim_rules, sim_trace, sim_out = "out";
    simulate->add_option("--scenario", sim_scenario, "scenario config file")->required();
    simulate->add_option("--rules", sim_rules, "ruleset file (.rules)")->required();
    simulate->add_option("--trace", sim_trace, "trace CSV or generator params file")->required();
    simulate->add_option("--out", sim_out, "output directory");

    // baseline
    auto* baseline = app.add_subcommand("baseline", "Run the bundled default ruleset");
    std::string base_scenario, base_trace, base_out = "out";
    baseline->add_option("--scenario", base_scenario, "scenario config file")->required();
    baseline->add_option("--trace", base_trace, "trace CSV or generator params file")->required();
    baseline->add_option("--out", base_out, "output directory");

    // optimize
    auto* optimize = app.add_subcommand("optimize", "Iteratively improve a ruleset on one scenario");
    OptimizeArgs opt_args;
    optimize->add_option("--scenario", opt_args.scenario_file, "scenario config file")->required();
    optimize->add_option("--trace", opt_args.trace_file, "trace CSV or generator params file")->required();
    optimize->add_option("--optimizer", opt_args.optimizer, "llm | scripted | hillclimb")->required();
    optimize->add_option("--iterations", opt_args.iterations, "optimizer iterations");
    optimize->add_option("--seed", opt_args.seed, "optimizer seed");
    optimize->add_option("--out", opt_args.out_dir, "output directory")->required();
    optimize->add_option("--policy", opt_args.policy, "always-replace | accept-if-better");
    optimize->add_option("--scripts", opt_args.scripts_dir, "directory of .rules scripts (scripted)");
    optimize->add_option("--template", opt_args.template_file, "template ruleset (hillclimb)");
    optimize->add_option("--bounds", opt_args.bounds_file, "slot bounds file (hillclimb)");
    optimize->add_option("--llm-config", opt_args.llm_config_file, "file with llm.* keys (llm)");
    optimize->add_option("--start-rules", opt_args.start_rules_file, "starting ruleset (default: bundled)");
    optimize->add_option("--max-parse-retries", opt_args.max_parse_retries, "planner retry budget");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Run N independent optimization runs");
    std::string exp_config, exp_out = "out";
    int exp_jobs = 1;
    experiment->add_option("--config", exp_config, "experiment config file")->required();
    experiment->add_option("--jobs", exp_jobs, "parallel runs");
    experiment->add_option("--out", exp_out, "output directory")->required();

    // trace gen
    auto* trace_cmd = app.add_subcommand("trace", "Trace utilities");
    trace_cmd->require_subcommand(1);
    auto* trace_gen = trace_cmd->add_subcommand("gen", "Generate a synthetic trace CSV");
    std::string gen_params, gen_out;
    std::uint64_t gen_seed = 0;
    auto* gen_seed_opt = trace_gen->add_option("--seed", gen_seed, "override the params seed");
    trace_gen->add_option("--params", gen_params, "generator params file")->required();
    trace_gen->add_option("--out", gen_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help
        app.exit(e);
        return 1;
    }

    try {
        if (simulate->parsed())
            return run_simulation_command(sim_scenario, sim_rules, sim_trace, sim_out, "simulation");
        if (baseline->parsed())
            return run_simulation_command(base_scenario, "", base_trace, base_out, "baseline");
        if (optimize->parsed())
            return run_optimize_command(opt_args);
        if (experiment->parsed()) {
            harness::ExperimentConfig config = harness::load_experiment_config(exp_config);
            config.out_dir = exp_out;
            config.jobs = exp_jobs;
            harness::ExperimentSummary summary = harness::run_experiment(config);
            for (const auto& run : summary.runs) {
                std::cout << "run " << run.run << " (seed " << run.seed << "): ";
                if (run.failed)
                    std::cout << "FAILED: " << run.error << "\n";
                else
                    std::cout << "best utility " << format_double(run.best.utility) << " at iteration "
                              << run.best.iteration << "\n";
            }
            if (summary.pooled_fit)
                std::cout << "pooled regression: slope " << format_double(summary.pooled_fit->slope)
                          << ", intercept " << format_double(summary.pooled_fit->intercept) << "\n";
            if (summary.mean_slope)
                std::cout << "mean per-run slope: " << format_double(*summary.mean_slope) << "\n";
            std::cout << "artifacts in " << exp_out << "\n";
            return summary.failed_runs == static_cast<int>(summary.runs.size()) ? 2 : 0;
        }
        if (trace_gen->parsed()) {
            KeyValueConfig cfg = KeyValueConfig::load(gen_params);
            workload::SynthTraceParams params = workload::trace_params_from_config(cfg);
            if (gen_seed_opt->count() > 0)
                params.seed = gen_seed;
            workload::Trace trace = workload::generate_trace(params);
            if (fs::path(gen_out).has_parent_path())
                fs::create_directories(fs::path(gen_out).parent_path());
            write_file(gen_out, workload::emit_trace_csv(trace));
            std::cout << "wrote " << trace.rates.size() << " intervals to " << gen_out << "\n";
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
