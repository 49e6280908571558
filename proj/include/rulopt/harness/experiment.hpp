#pragma once

#include "rulopt/harness/regression.hpp"
#include "rulopt/knowledge/knowledge.hpp"
#include "rulopt/llm/client.hpp"
#include "rulopt/opt/optimizer.hpp"
#include "rulopt/sim/model.hpp"
#include "rulopt/workload/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rulopt::harness {

enum class OptimizerKind { Llm, Scripted, HillClimb };

OptimizerKind parse_optimizer_kind(const std::string& text);

struct ExperimentConfig {
    sim::ScenarioConfig scenario;
    workload::Trace trace;
    OptimizerKind kind = OptimizerKind::Scripted;
    int runs = 10;
    int iterations = 10;
    std::vector<std::uint64_t> seeds; // exactly `runs` entries
    opt::Policy policy = opt::Policy::AlwaysReplace;
    opt::LlmOptimizerOptions llm_options;
    std::string start_rules_text; // empty = bundled default ruleset
    std::filesystem::path out_dir;
    int jobs = 1;
    bool save_knowledge = false;

    // kind-specific
    std::vector<std::string> scripts;            // Scripted
    std::string hillclimb_template;              // HillClimb
    std::vector<opt::SlotSpec> hillclimb_slots;  // HillClimb
    llm::ClientConfig llm;                       // Llm; cassette path may contain {run}

    void validate() const;
};

// Loads an experiment config file; paths inside are resolved relative to
// the file. The output directory and jobs come from the CLI.
ExperimentConfig load_experiment_config(const std::filesystem::path& file);

struct RunOutcome {
    int run = 0;
    std::uint64_t seed = 0;
    bool failed = false;      // the whole run aborted (not a mere iteration gap)
    std::string error;
    double baseline_utility = 0.0;
    std::vector<knowledge::IterationResult> iterations;
    opt::BestSoFar best;
};

struct ExperimentSummary {
    std::vector<RunOutcome> runs;
    std::vector<std::optional<LinFit>> per_run_fit;
    std::optional<LinFit> pooled_fit;
    std::optional<double> mean_slope;
    int best_run = -1;
    opt::BestSoFar overall_best;
    int failed_iterations = 0;
    int failed_runs = 0;

    // (iteration, utility) points of successful iterations; per run and pooled.
    std::vector<std::pair<double, double>> pooled_points() const;
    std::vector<std::pair<double, double>> run_points(int run) const;
};

// Executes `runs` independent optimization runs (fresh knowledge base and
// seed each) and writes run_<i>.csv, summary.csv, best rulesets and
// utility_vs_iteration.svg under out_dir. A failed run is recorded and
// does not abort the rest.
ExperimentSummary run_experiment(const ExperimentConfig& config);

// Chart: one polyline per run plus the pooled regression line.
std::string emit_svg_chart(const ExperimentSummary& summary);

std::string summary_to_csv(const ExperimentSummary& summary);

} // namespace rulopt::harness
