#include "rulopt/harness/experiment.hpp"

#include "rulopt/assets.hpp"
#include "rulopt/config.hpp"
#include "rulopt/sim/simulator.hpp"
#include "rulopt/text.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace rulopt::harness {

OptimizerKind parse_optimizer_kind(const std::string& text) {
    if (text == "llm")
        return OptimizerKind::Llm;
    if (text == "scripted")
        return OptimizerKind::Scripted;
    if (text == "hillclimb")
        return OptimizerKind::HillClimb;
    throw std::invalid_argument("optimizer must be llm, scripted or hillclimb, got \"" + text + "\"");
}

void ExperimentConfig::validate() const {
    if (runs < 1)
        throw std::invalid_argument("experiment: runs must be >= 1");
    if (iterations < 1)
        throw std::invalid_argument("experiment: iterations must be >= 1");
    if (seeds.size() != static_cast<std::size_t>(runs))
        throw std::invalid_argument("experiment: need exactly one seed per run (" + std::to_string(runs) +
                                    " runs, " + std::to_string(seeds.size()) + " seeds)");
    if (jobs < 1)
        throw std::invalid_argument("experiment: jobs must be >= 1");
    scenario.validate();
    if (kind == OptimizerKind::Scripted && scripts.empty())
        throw std::invalid_argument("experiment: scripted optimizer needs a scripts directory");
    if (kind == OptimizerKind::HillClimb && (hillclimb_template.empty() || hillclimb_slots.empty()))
        throw std::invalid_argument("experiment: hillclimb optimizer needs template and bounds");
}

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in)
        throw std::runtime_error("cannot open " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

workload::Trace load_trace_any(const std::filesystem::path& path, double interval_seconds) {
    if (path.extension() == ".csv")
        return workload::load_trace_csv(path.string(), interval_seconds);
    KeyValueConfig cfg = KeyValueConfig::load(path);
    return workload::generate_trace(workload::trace_params_from_config(cfg), interval_seconds);
}

} // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& file) {
    KeyValueConfig cfg = KeyValueConfig::load(file);
    ExperimentConfig ec;

    std::filesystem::path scenario_file = cfg.resolve_path(cfg.require_string("scenario"));
    ec.scenario = sim::scenario_from_config(KeyValueConfig::load(scenario_file));

    std::filesystem::path trace_file = cfg.resolve_path(cfg.require_string("trace"));
    ec.trace = load_trace_any(trace_file, ec.scenario.interval_seconds);

    ec.kind = parse_optimizer_kind(cfg.get_string("optimizer", "scripted"));
    ec.runs = cfg.get_int("runs", ec.runs);
    ec.iterations = cfg.get_int("iterations", ec.iterations);

    ec.seeds = cfg.get_uint64_list("seeds");
    if (ec.seeds.empty()) {
        std::uint64_t base = cfg.get_uint64("seed_base", 1);
        for (int i = 0; i < ec.runs; ++i)
            ec.seeds.push_back(base + static_cast<std::uint64_t>(i));
    }

    ec.policy = opt::parse_policy(cfg.get_string("policy", "always-replace"));
    ec.llm_options.max_parse_retries = cfg.get_int("max_parse_retries", ec.llm_options.max_parse_retries);
    ec.llm_options.summary.worst_k = cfg.get_int("worst_k", ec.llm_options.summary.worst_k);
    ec.llm_options.summary.budget =
        static_cast<std::size_t>(cfg.get_uint64("history_budget", ec.llm_options.summary.budget));
    ec.save_knowledge = cfg.get_bool("save_knowledge", ec.save_knowledge);

    if (auto start = cfg.get("start_rules"))
        ec.start_rules_text = read_file(cfg.resolve_path(*start));

    switch (ec.kind) {
    case OptimizerKind::Scripted:
        ec.scripts = opt::load_scripts(cfg.resolve_path(cfg.require_string("scripts")));
        break;
    case OptimizerKind::HillClimb:
        ec.hillclimb_template = read_file(cfg.resolve_path(cfg.require_string("hillclimb_template")));
        ec.hillclimb_slots = opt::parse_slot_bounds(
            read_file(cfg.resolve_path(cfg.require_string("hillclimb_bounds"))), "hillclimb_bounds");
        break;
    case OptimizerKind::Llm:
        ec.llm = llm::client_config_from(cfg);
        break;
    }

    cfg.reject_unknown();
    return ec;
}

namespace {

std::string cassette_path_for_run(const std::string& pattern, int run) {
    std::string out = pattern;
    const std::string token = "{run}";
    if (auto pos = out.find(token); pos != std::string::npos)
        out.replace(pos, token.size(), std::to_string(run));
    return out;
}

RunOutcome execute_run(const ExperimentConfig& cfg, int run_index) {
    RunOutcome outcome;
    outcome.run = run_index;
    outcome.seed = cfg.seeds[static_cast<std::size_t>(run_index)];
    try {
        std::vector<std::string> catalog =
            knowledge::catalog_names(knowledge::default_catalog(cfg.scenario));

        std::unique_ptr<opt::Optimizer> optimizer;
        std::unique_ptr<llm::ChatClient> client;
        switch (cfg.kind) {
        case OptimizerKind::Scripted:
            optimizer = std::make_unique<opt::ScriptedOptimizer>(cfg.scripts, catalog);
            break;
        case OptimizerKind::HillClimb:
            optimizer = std::make_unique<opt::HillClimbOptimizer>(cfg.hillclimb_template, cfg.hillclimb_slots,
                                                                  catalog, outcome.seed);
            break;
        case OptimizerKind::Llm: {
            llm::ClientConfig cc = cfg.llm;
            cc.cassette_path = cassette_path_for_run(cc.cassette_path, run_index);
            client = std::make_unique<llm::ChatClient>(std::move(cc));
            optimizer = std::make_unique<opt::LlmOptimizer>(*client, cfg.llm_options);
            break;
        }
        }

        std::string start_rules =
            cfg.start_rules_text.empty() ? std::string(assets::kDefaultRules) : cfg.start_rules_text;
        opt::RunOptions run_options;
        run_options.policy = cfg.policy;
        run_options.summary = cfg.llm_options.summary;

        opt::OptimizationRun run(cfg.scenario, cfg.trace, start_rules, *optimizer, run_options);
        outcome.baseline_utility = run.current_utility();
        outcome.iterations = run.run(cfg.iterations);
        outcome.best = run.best();

        if (!cfg.out_dir.empty()) {
            if (cfg.save_knowledge) {
                auto kb_dir = cfg.out_dir / ("run_" + std::to_string(run_index) + "_kb");
                knowledge::save_knowledge_base(run.kb(), kb_dir);
                for (const auto& [iteration, sim] : run.simulations())
                    sim::write_csv(sim,
                                   (kb_dir / "history" / ("iter_" + std::to_string(iteration) + ".csv")).string());
            }
            std::ofstream best_out(cfg.out_dir / ("best_run_" + std::to_string(run_index) + ".rules"),
                                   std::ios::binary);
            best_out << run.best().ruleset_text;
        }
    } catch (const std::exception& e) {
        outcome.failed = true;
        outcome.error = e.what();
    }
    return outcome;
}

std::string run_csv(const RunOutcome& outcome) {
    std::string out = "iteration,utility,parse_ok,eval_errors,llm_calls,duration\n";
    for (const auto& it : outcome.iterations) {
        out += std::to_string(it.iteration);
        out += ',';
        out += it.total_utility ? format_double(*it.total_utility) : "";
        out += ',';
        out += it.parse_ok ? "1" : "0";
        out += ',';
        out += std::to_string(it.eval_error_count);
        out += ',';
        out += std::to_string(it.llm_calls);
        out += ',';
        out += format_double(it.duration_seconds);
        out += '\n';
    }
    return out;
}

} // namespace

std::vector<std::pair<double, double>> ExperimentSummary::run_points(int run) const {
    std::vector<std::pair<double, double>> points;
    const RunOutcome& outcome = runs.at(static_cast<std::size_t>(run));
    for (const auto& it : outcome.iterations)
        if (it.total_utility)
            points.emplace_back(static_cast<double>(it.iteration), *it.total_utility);
    return points;
}

std::vector<std::pair<double, double>> ExperimentSummary::pooled_points() const {
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        auto rp = run_points(static_cast<int>(i));
        points.insert(points.end(), rp.begin(), rp.end());
    }
    return points;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    config.validate();
    if (!config.out_dir.empty())
        std::filesystem::create_directories(config.out_dir);

    ExperimentSummary summary;
    summary.runs.resize(static_cast<std::size_t>(config.runs));

    // Runs are independent; each worker writes only its own slot.
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            int index = next.fetch_add(1);
            if (index >= config.runs)
                return;
            summary.runs[static_cast<std::size_t>(index)] = execute_run(config, index);
        }
    };
    int thread_count = std::min(config.jobs, config.runs);
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(thread_count));
        for (int i = 0; i < thread_count; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    // Fits and bests, assembled in run order.
    double slope_sum = 0.0;
    int slope_count = 0;
    bool have_best = false;
    for (int i = 0; i < config.runs; ++i) {
        const RunOutcome& outcome = summary.runs[static_cast<std::size_t>(i)];
        if (outcome.failed) {
            ++summary.failed_runs;
            summary.per_run_fit.emplace_back(std::nullopt);
            continue;
        }
        for (const auto& it : outcome.iterations)
            if (!it.parse_ok)
                ++summary.failed_iterations;

        auto points = summary.run_points(i);
        std::optional<LinFit> fit;
        try {
            fit = linear_regression(points);
        } catch (const std::invalid_argument&) {
            fit = std::nullopt;
        }
        if (fit) {
            slope_sum += fit->slope;
            ++slope_count;
        }
        summary.per_run_fit.push_back(fit);

        if (!have_best || outcome.best.utility > summary.overall_best.utility) {
            summary.overall_best = outcome.best;
            summary.best_run = i;
            have_best = true;
        }
    }
    if (slope_count > 0)
        summary.mean_slope = slope_sum / static_cast<double>(slope_count);
    try {
        summary.pooled_fit = linear_regression(summary.pooled_points());
    } catch (const std::invalid_argument&) {
        summary.pooled_fit = std::nullopt;
    }

    if (!config.out_dir.empty()) {
        for (int i = 0; i < config.runs; ++i) {
            std::ofstream out(config.out_dir / ("run_" + std::to_string(i) + ".csv"), std::ios::binary);
            out << run_csv(summary.runs[static_cast<std::size_t>(i)]);
        }
        std::ofstream sum_out(config.out_dir / "summary.csv", std::ios::binary);
        sum_out << summary_to_csv(summary);
        if (have_best) {
            std::ofstream best_out(config.out_dir / "best_overall.rules", std::ios::binary);
            best_out << summary.overall_best.ruleset_text;
        }
        std::ofstream svg_out(config.out_dir / "utility_vs_iteration.svg", std::ios::binary);
        svg_out << emit_svg_chart(summary);
    }
    return summary;
}

std::string summary_to_csv(const ExperimentSummary& summary) {
    std::string out = "run,seed,slope,intercept,best_utility,best_iteration,failed_iterations,error\n";
    for (std::size_t i = 0; i < summary.runs.size(); ++i) {
        const RunOutcome& r = summary.runs[i];
        out += std::to_string(r.run);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        const auto& fit = summary.per_run_fit[i];
        out += fit ? format_double(fit->slope) : "";
        out += ',';
        out += fit ? format_double(fit->intercept) : "";
        out += ',';
        int failed = 0;
        for (const auto& it : r.iterations)
            if (!it.parse_ok)
                ++failed;
        if (!r.failed) {
            out += format_double(r.best.utility);
            out += ',';
            out += std::to_string(r.best.iteration);
        } else {
            out += ",";
        }
        out += ',';
        out += std::to_string(failed);
        out += ',';
        out += csv_field(r.error);
        out += '\n';
    }
    out += "pooled,,";
    out += summary.pooled_fit ? format_double(summary.pooled_fit->slope) : "";
    out += ',';
    out += summary.pooled_fit ? format_double(summary.pooled_fit->intercept) : "";
    out += ',';
    if (summary.best_run >= 0) {
        out += format_double(summary.overall_best.utility);
        out += ',';
        out += std::to_string(summary.overall_best.iteration);
    } else {
        out += ",";
    }
    out += ',';
    out += std::to_string(summary.failed_iterations);
    out += ",\n";
    out += "mean_slope,,";
    out += summary.mean_slope ? format_double(*summary.mean_slope) : "";
    out += ",,,,,\n";
    return out;
}

} // namespace rulopt::harness
