#pragma once

#include "rulopt/sim/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rulopt::knowledge {

class KnowledgeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct VariableInfo {
    enum class Kind { Observed, Control };

    std::string name;
    Kind kind = Kind::Observed;
    std::optional<double> min;
    std::optional<double> max; // empty = unbounded
    std::string unit;
    std::string description;
};

// The variable catalog for the simulated application: one entry per
// MetricsSnapshot field, with `servers` and `dimmer` marked as the two
// control variables.
std::vector<VariableInfo> default_catalog(const sim::ScenarioConfig& scenario);
std::vector<std::string> catalog_names(const std::vector<VariableInfo>& catalog);

// Outcome of one optimizer cycle. parse_ok=false implies total_utility is
// absent and the previously installed ruleset stayed in force.
struct IterationResult {
    int iteration = 0;
    std::string ruleset_text;
    bool parse_ok = true;
    std::optional<double> total_utility;
    int eval_error_count = 0;
    bool accepted = false;
    double duration_seconds = 0.0;
    int llm_calls = 0;
    std::optional<std::string> failure;
};

// The four information categories plus run history.
struct KnowledgeBase {
    std::string domain_description;
    std::string goals;
    std::vector<VariableInfo> catalog;
    std::vector<IterationResult> iteration_history;
    std::vector<sim::IntervalRecord> interval_history; // most recent simulation
};

// Default domain/goals text for the bundled scenario.
KnowledgeBase make_knowledge_base(const sim::ScenarioConfig& scenario);

// Appends the result; iteration indices must be strictly increasing.
void record_iteration(KnowledgeBase& kb, IterationResult result);

// Latest installed ruleset text (most recent entry with parse_ok).
const std::string& current_ruleset_text(const KnowledgeBase& kb);

struct WorstInterval {
    sim::IntervalRecord record;
    std::vector<sim::IntervalRecord> context; // +/- 2 intervals, inclusive
};

struct HistorySummary {
    double total_utility = 0.0;
    int violation_count = 0;
    int error_count = 0;
    std::vector<double> phase_utilities; // four phases in interval order
    std::vector<WorstInterval> worst;    // ascending utility, ties by index
    std::string text;                    // rendered, length <= budget
};

struct SummaryOptions {
    int worst_k = 5;
    int context_radius = 2;
    std::size_t budget = 8000; // characters, must be >= 256
};

// Deterministic summary of the most recent simulation plus all prior
// iteration utilities. Per-interval detail is dropped first, then the
// oldest iteration lines; aggregate stats are never truncated.
HistorySummary summarize_history(const KnowledgeBase& kb, const SummaryOptions& options = {});

// Prompt rendering. Both prompts contain the four knowledge categories as
// labeled sections and are deterministic; rendering fails if any category
// is empty, before any client call can happen.
std::string render_analyzer_prompt(const KnowledgeBase& kb, const HistorySummary& summary);
std::string render_planner_prompt(const KnowledgeBase& kb, const HistorySummary& summary,
                                  const std::string& diagnosis);

// Persists domain.txt, goals.txt, catalog.csv, history/iterations.csv and
// history/iter_<n>.rules under `dir`.
void save_knowledge_base(const KnowledgeBase& kb, const std::filesystem::path& dir);

} // namespace rulopt::knowledge
