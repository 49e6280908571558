#pragma once

#include "rulopt/dsl/ast.hpp"
#include "rulopt/knowledge/knowledge.hpp"
#include "rulopt/llm/client.hpp"
#include "rulopt/sim/model.hpp"
#include "rulopt/workload/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rulopt::opt {

// Full analyzer output; `issues` is a best-effort bullet extraction, the
// raw text stays authoritative.
struct Diagnosis {
    std::string text;
    std::vector<std::string> issues;
};

// Raised when no valid candidate ruleset could be produced (e.g. planner
// retries exhausted). Carries every parser/validator diagnostic seen.
class PlanFailed : public std::runtime_error {
public:
    PlanFailed(std::string message, std::vector<std::string> diagnostics, int llm_calls)
        : std::runtime_error(std::move(message)), diagnostics_(std::move(diagnostics)), llm_calls_(llm_calls) {}

    const std::vector<std::string>& diagnostics() const { return diagnostics_; }
    int llm_calls() const { return llm_calls_; }

private:
    std::vector<std::string> diagnostics_;
    int llm_calls_;
};

// Contents of the LAST fenced code block; without fences, the whole text
// trimmed.
std::string extract_code_block(const std::string& text);

std::vector<std::string> extract_bullets(const std::string& text);

struct Proposal {
    std::string ruleset_text;
    dsl::RuleSet ruleset;
    int llm_calls = 0;
};

class Optimizer {
public:
    virtual ~Optimizer() = default;

    // Produces a validated candidate for the given iteration index.
    // Throws PlanFailed when it cannot.
    virtual Proposal propose(const knowledge::KnowledgeBase& kb, int iteration) = 0;

    // Called after the candidate was simulated and the accept decision made.
    virtual void feedback(const knowledge::IterationResult&) {}

    // Optimizer-specific starting ruleset (hill climbing starts from its
    // template); empty means "use the caller's default".
    virtual std::optional<std::string> initial_ruleset_text() const { return std::nullopt; }
};

struct LlmOptimizerOptions {
    int max_parse_retries = 3;
    knowledge::SummaryOptions summary;
};

class LlmOptimizer : public Optimizer {
public:
    LlmOptimizer(llm::ChatClient& client, LlmOptimizerOptions options = {});

    // One chat call with the analyzer prompt.
    Diagnosis analyze(const knowledge::KnowledgeBase& kb);

    // Planner call plus parse/validate; failures are retried with the exact
    // diagnostic appended, up to max_parse_retries extra calls.
    dsl::RuleSet plan(const knowledge::KnowledgeBase& kb, const Diagnosis& diagnosis,
                      std::string* ruleset_text_out, int* llm_calls_out);

    Proposal propose(const knowledge::KnowledgeBase& kb, int iteration) override;

private:
    llm::ChatClient& client_;
    LlmOptimizerOptions options_;
};

// Replays a fixed list of candidate ruleset texts, cycling when exhausted.
// Invalid scripts surface as PlanFailed, which makes failure-path behavior
// testable without an LLM.
class ScriptedOptimizer : public Optimizer {
public:
    explicit ScriptedOptimizer(std::vector<std::string> scripts,
                               std::vector<std::string> catalog);

    Proposal propose(const knowledge::KnowledgeBase& kb, int iteration) override;

private:
    std::vector<std::string> scripts_;
    std::vector<std::string> catalog_;
    std::size_t next_ = 0;
};

// Loads every `*.rules` file in the directory, sorted by filename.
std::vector<std::string> load_scripts(const std::filesystem::path& dir);

struct SlotSpec {
    std::string name;
    double min = 0.0;
    double max = 1.0;
    double initial = 0.0;
};

// `key = min,max,initial` sidecar format.
std::vector<SlotSpec> parse_slot_bounds(const std::string& text, const std::string& origin);

// Replaces ${name} placeholders with formatted values.
std::string instantiate_template(const std::string& template_text, const std::vector<SlotSpec>& slots,
                                 const std::vector<double>& values);

// Perturbs exactly one uniformly chosen slot by a Gaussian step with
// sigma = 10% of the slot's range, clamped to bounds.
std::vector<double> hill_climb_propose(const std::vector<double>& params, const std::vector<SlotSpec>& slots,
                                       std::mt19937_64& rng);

class HillClimbOptimizer : public Optimizer {
public:
    HillClimbOptimizer(std::string template_text, std::vector<SlotSpec> slots,
                       std::vector<std::string> catalog, std::uint64_t seed);

    Proposal propose(const knowledge::KnowledgeBase& kb, int iteration) override;
    void feedback(const knowledge::IterationResult& result) override;
    std::optional<std::string> initial_ruleset_text() const override;

    const std::vector<double>& current_params() const { return current_; }

private:
    std::string template_text_;
    std::vector<SlotSpec> slots_;
    std::vector<std::string> catalog_;
    std::mt19937_64 rng_;
    std::vector<double> current_;
    std::vector<double> last_proposed_;
};

enum class Policy { AlwaysReplace, AcceptIfBetter };

Policy parse_policy(const std::string& text);

struct RunOptions {
    Policy policy = Policy::AlwaysReplace;
    knowledge::SummaryOptions summary;
};

struct BestSoFar {
    double utility = 0.0;
    std::string ruleset_text;
    int iteration = 0;
};

// Drives the monitor-analyze-plan-execute cycle over one scenario/trace.
// Construction simulates the starting ruleset and records it as iteration
// 0; each iterate() call produces iterations 1, 2, ...
class OptimizationRun {
public:
    OptimizationRun(sim::ScenarioConfig scenario, workload::Trace trace, std::string start_rules_text,
                    Optimizer& optimizer, RunOptions options = {});

    knowledge::IterationResult iterate();
    std::vector<knowledge::IterationResult> run(int iterations);

    const knowledge::KnowledgeBase& kb() const { return kb_; }
    const BestSoFar& best() const { return best_; }
    const std::string& current_ruleset_text() const { return current_text_; }
    double current_utility() const { return current_utility_; }

    // Interval records of each simulated iteration, by iteration index.
    const std::vector<std::pair<int, sim::SimResult>>& simulations() const { return simulations_; }

private:
    sim::ScenarioConfig scenario_;
    workload::Trace trace_;
    Optimizer& optimizer_;
    RunOptions options_;
    knowledge::KnowledgeBase kb_;
    std::string current_text_;
    double current_utility_ = 0.0;
    BestSoFar best_;
    int next_iteration_ = 0;
    std::vector<std::pair<int, sim::SimResult>> simulations_;
};

} // namespace rulopt::opt
