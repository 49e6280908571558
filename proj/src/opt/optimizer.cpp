#include "rulopt/opt/optimizer.hpp"

#include "rulopt/config.hpp"
#include "rulopt/dsl/parse.hpp"
#include "rulopt/dsl/print.hpp"
#include "rulopt/dsl/validate.hpp"
#include "rulopt/rng.hpp"
#include "rulopt/sim/simulator.hpp"
#include "rulopt/text.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rulopt::opt {

std::string extract_code_block(const std::string& text) {
    struct Block {
        std::size_t begin = 0;
        std::size_t end = 0;
        bool closed = false;
    };
    std::vector<Block> blocks;
    std::size_t pos = 0;
    bool inside = false;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::size_t line_end = eol == std::string::npos ? text.size() : eol;
        std::string_view line = trim(std::string_view(text).substr(pos, line_end - pos));
        if (line.substr(0, 3) == "```") {
            if (!inside) {
                blocks.push_back(Block{line_end + 1 <= text.size() ? line_end + 1 : text.size(), text.size(),
                                       false});
                inside = true;
            } else {
                blocks.back().end = pos;
                blocks.back().closed = true;
                inside = false;
            }
        }
        if (eol == std::string::npos)
            break;
        pos = eol + 1;
    }
    if (blocks.empty())
        return std::string(trim(text));
    const Block& last = blocks.back();
    std::size_t end = std::min(last.end, text.size());
    std::size_t begin = std::min(last.begin, end);
    return text.substr(begin, end - begin);
}

std::vector<std::string> extract_bullets(const std::string& text) {
    std::vector<std::string> bullets;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string_view v = trim(line);
        if (v.size() >= 2 && (v.substr(0, 2) == "- " || v.substr(0, 2) == "* ")) {
            bullets.emplace_back(trim(v.substr(2)));
            continue;
        }
        std::size_t i = 0;
        while (i < v.size() && v[i] >= '0' && v[i] <= '9')
            ++i;
        if (i > 0 && i < v.size() && (v[i] == '.' || v[i] == ')'))
            bullets.emplace_back(trim(v.substr(i + 1)));
    }
    return bullets;
}

LlmOptimizer::LlmOptimizer(llm::ChatClient& client, LlmOptimizerOptions options)
    : client_(client), options_(options) {}

namespace {

constexpr const char* kSystemMessage =
    "You tune the condition-action adaptation rules of an elastic web application. Be precise and ground "
    "every statement in the data you are given.";

llm::ChatRequest make_request(const llm::ClientConfig& cfg, std::vector<llm::ChatMessage> messages) {
    llm::ChatRequest request;
    request.model = cfg.model;
    request.temperature = cfg.temperature;
    request.max_tokens = cfg.max_tokens;
    request.messages = std::move(messages);
    return request;
}

} // namespace

Diagnosis LlmOptimizer::analyze(const knowledge::KnowledgeBase& kb) {
    knowledge::HistorySummary summary = knowledge::summarize_history(kb, options_.summary);
    std::string prompt = knowledge::render_analyzer_prompt(kb, summary);
    llm::ChatResponse response = client_.chat(
        make_request(client_.config(), {{"system", kSystemMessage}, {"user", std::move(prompt)}}));
    if (trim(response.content).empty())
        throw llm::LlmError(llm::ErrorKind::EmptyResponse, "empty diagnosis");
    return Diagnosis{response.content, extract_bullets(response.content)};
}

dsl::RuleSet LlmOptimizer::plan(const knowledge::KnowledgeBase& kb, const Diagnosis& diagnosis,
                                std::string* ruleset_text_out, int* llm_calls_out) {
    if (diagnosis.text.empty())
        throw std::invalid_argument("plan: diagnosis must be non-empty");

    knowledge::HistorySummary summary = knowledge::summarize_history(kb, options_.summary);
    std::string prompt = knowledge::render_planner_prompt(kb, summary, diagnosis.text);

    std::vector<llm::ChatMessage> conversation{{"system", kSystemMessage}, {"user", std::move(prompt)}};
    std::vector<std::string> diagnostics;
    int calls = 0;

    for (int attempt = 0; attempt <= options_.max_parse_retries; ++attempt) {
        llm::ChatResponse response = client_.chat(make_request(client_.config(), conversation));
        ++calls;
        std::string candidate_text = extract_code_block(response.content);

        std::string diagnostic;
        try {
            dsl::RuleSet rs = dsl::parse_ruleset(candidate_text);
            auto problems = dsl::validate(rs, knowledge::catalog_names(kb.catalog));
            if (problems.empty()) {
                if (ruleset_text_out != nullptr)
                    *ruleset_text_out = candidate_text;
                if (llm_calls_out != nullptr)
                    *llm_calls_out = calls;
                return rs;
            }
            diagnostic = dsl::join_diagnostics(problems);
        } catch (const dsl::ParseError& e) {
            diagnostic = e.what();
        }
        diagnostics.push_back(diagnostic);

        conversation.push_back({"assistant", response.content});
        conversation.push_back({"user", "That ruleset was rejected:\n" + diagnostic +
                                            "\nReply with a corrected complete ruleset in exactly one fenced "
                                            "code block."});
    }
    throw PlanFailed("planner retries exhausted after " + std::to_string(calls) + " attempts", diagnostics,
                     calls);
}

Proposal LlmOptimizer::propose(const knowledge::KnowledgeBase& kb, int /*iteration*/) {
    Diagnosis diagnosis = analyze(kb);
    Proposal proposal;
    int plan_calls = 0;
    try {
        proposal.ruleset = plan(kb, diagnosis, &proposal.ruleset_text, &plan_calls);
    } catch (PlanFailed& failed) {
        throw PlanFailed(failed.what(), failed.diagnostics(), failed.llm_calls() + 1);
    }
    proposal.llm_calls = plan_calls + 1; // analyze + plan attempts
    return proposal;
}

ScriptedOptimizer::ScriptedOptimizer(std::vector<std::string> scripts, std::vector<std::string> catalog)
    : scripts_(std::move(scripts)), catalog_(std::move(catalog)) {
    if (scripts_.empty())
        throw std::invalid_argument("scripted optimizer needs at least one script");
}

Proposal ScriptedOptimizer::propose(const knowledge::KnowledgeBase&, int) {
    const std::string& text = scripts_[next_ % scripts_.size()];
    ++next_;
    try {
        dsl::RuleSet rs = dsl::parse_ruleset(text);
        auto problems = dsl::validate(rs, catalog_);
        if (!problems.empty())
            throw PlanFailed("scripted ruleset failed validation", {dsl::join_diagnostics(problems)}, 0);
        return Proposal{text, std::move(rs), 0};
    } catch (const dsl::ParseError& e) {
        throw PlanFailed("scripted ruleset failed to parse", {e.what()}, 0);
    }
}

std::vector<std::string> load_scripts(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw std::invalid_argument("script directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".rules")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<std::string> scripts;
    for (const auto& file : files) {
        std::ifstream in(file);
        std::ostringstream buf;
        buf << in.rdbuf();
        scripts.push_back(buf.str());
    }
    if (scripts.empty())
        throw std::invalid_argument("no .rules files in " + dir.string());
    return scripts;
}

std::vector<SlotSpec> parse_slot_bounds(const std::string& text, const std::string& origin) {
    KeyValueConfig cfg = KeyValueConfig::parse(text, origin);
    std::vector<SlotSpec> slots;
    for (const auto& key : cfg.keys()) {
        std::string value = *cfg.get(key);
        SlotSpec slot;
        slot.name = key;
        double fields[3];
        std::size_t pos = 0;
        for (int i = 0; i < 3; ++i) {
            std::size_t comma = value.find(',', pos);
            std::string part(trim(std::string_view(value).substr(
                pos, comma == std::string::npos ? value.size() - pos : comma - pos)));
            char* end = nullptr;
            fields[i] = std::strtod(part.c_str(), &end);
            if (part.empty() || end != part.c_str() + part.size())
                throw ConfigError(origin + ": slot " + key + " needs `min,max,initial`, got \"" + value + "\"");
            if (i < 2 && comma == std::string::npos)
                throw ConfigError(origin + ": slot " + key + " needs `min,max,initial`, got \"" + value + "\"");
            pos = comma == std::string::npos ? value.size() : comma + 1;
        }
        slot.min = fields[0];
        slot.max = fields[1];
        slot.initial = fields[2];
        if (slot.min > slot.max || slot.initial < slot.min || slot.initial > slot.max)
            throw ConfigError(origin + ": slot " + key + " bounds are inconsistent");
        slots.push_back(slot);
    }
    if (slots.empty())
        throw ConfigError(origin + ": no slots defined");
    return slots;
}

std::string instantiate_template(const std::string& template_text, const std::vector<SlotSpec>& slots,
                                 const std::vector<double>& values) {
    if (slots.size() != values.size())
        throw std::invalid_argument("instantiate_template: slot/value count mismatch");
    std::string out = template_text;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        std::string placeholder = "${" + slots[i].name + "}";
        std::string replacement = format_double(values[i]);
        std::size_t pos = 0;
        bool found = false;
        while ((pos = out.find(placeholder, pos)) != std::string::npos) {
            out.replace(pos, placeholder.size(), replacement);
            pos += replacement.size();
            found = true;
        }
        if (!found)
            throw std::invalid_argument("template has no placeholder for slot " + slots[i].name);
    }
    if (auto leftover = out.find("${"); leftover != std::string::npos) {
        auto end = out.find('}', leftover);
        throw std::invalid_argument("template placeholder without a slot: " +
                                    out.substr(leftover, end == std::string::npos ? 8 : end - leftover + 1));
    }
    return out;
}

std::vector<double> hill_climb_propose(const std::vector<double>& params, const std::vector<SlotSpec>& slots,
                                       std::mt19937_64& rng) {
    if (params.size() != slots.size() || slots.empty())
        throw std::invalid_argument("hill_climb_propose: slot/param count mismatch");
    std::vector<double> out = params;
    std::size_t pick = static_cast<std::size_t>(uniform_index(rng, slots.size()));
    double sigma = 0.1 * (slots[pick].max - slots[pick].min);
    double step = gaussian(rng) * sigma;
    out[pick] = std::clamp(params[pick] + step, slots[pick].min, slots[pick].max);
    return out;
}

HillClimbOptimizer::HillClimbOptimizer(std::string template_text, std::vector<SlotSpec> slots,
                                       std::vector<std::string> catalog, std::uint64_t seed)
    : template_text_(std::move(template_text)), slots_(std::move(slots)), catalog_(std::move(catalog)),
      rng_(seed) {
    current_.reserve(slots_.size());
    for (const auto& slot : slots_)
        current_.push_back(slot.initial);
    // Fail early if the template itself is broken.
    std::string text = instantiate_template(template_text_, slots_, current_);
    dsl::RuleSet rs = dsl::parse_ruleset(text);
    auto problems = dsl::validate(rs, catalog_);
    if (!problems.empty())
        throw std::invalid_argument("hill-climb template is invalid: " + dsl::join_diagnostics(problems));
}

std::optional<std::string> HillClimbOptimizer::initial_ruleset_text() const {
    return instantiate_template(template_text_, slots_, current_);
}

Proposal HillClimbOptimizer::propose(const knowledge::KnowledgeBase&, int) {
    last_proposed_ = hill_climb_propose(current_, slots_, rng_);
    Proposal proposal;
    proposal.ruleset_text = instantiate_template(template_text_, slots_, last_proposed_);
    proposal.ruleset = dsl::parse_ruleset(proposal.ruleset_text);
    auto problems = dsl::validate(proposal.ruleset, catalog_);
    if (!problems.empty())
        throw PlanFailed("hill-climb proposal failed validation", {dsl::join_diagnostics(problems)}, 0);
    return proposal;
}

void HillClimbOptimizer::feedback(const knowledge::IterationResult& result) {
    if (result.parse_ok && result.accepted && !last_proposed_.empty())
        current_ = last_proposed_;
}

Policy parse_policy(const std::string& text) {
    if (text == "always-replace")
        return Policy::AlwaysReplace;
    if (text == "accept-if-better")
        return Policy::AcceptIfBetter;
    throw std::invalid_argument("policy must be always-replace or accept-if-better, got \"" + text + "\"");
}

OptimizationRun::OptimizationRun(sim::ScenarioConfig scenario, workload::Trace trace,
                                 std::string start_rules_text, Optimizer& optimizer, RunOptions options)
    : scenario_(std::move(scenario)), trace_(std::move(trace)), optimizer_(optimizer), options_(options) {
    if (auto text = optimizer_.initial_ruleset_text())
        start_rules_text = *text;

    kb_ = knowledge::make_knowledge_base(scenario_);

    dsl::RuleSet rules = dsl::parse_ruleset(start_rules_text);
    auto problems = dsl::validate(rules, knowledge::catalog_names(kb_.catalog));
    if (!problems.empty())
        throw std::invalid_argument("starting ruleset is invalid: " + dsl::join_diagnostics(problems));

    sim::SimResult sim = sim::run_simulation(scenario_, rules, trace_);
    current_text_ = start_rules_text;
    current_utility_ = sim.total_utility;
    best_ = BestSoFar{sim.total_utility, start_rules_text, 0};

    knowledge::IterationResult seed;
    seed.iteration = 0;
    seed.ruleset_text = start_rules_text;
    seed.parse_ok = true;
    seed.total_utility = sim.total_utility;
    seed.eval_error_count = sim.eval_error_count;
    seed.accepted = true;
    kb_.interval_history = sim.records;
    simulations_.emplace_back(0, std::move(sim));
    knowledge::record_iteration(kb_, std::move(seed));
    next_iteration_ = 1;
}

knowledge::IterationResult OptimizationRun::iterate() {
    auto start = std::chrono::steady_clock::now();
    knowledge::IterationResult result;
    result.iteration = next_iteration_++;

    try {
        Proposal proposal = optimizer_.propose(kb_, result.iteration);
        result.ruleset_text = proposal.ruleset_text;
        result.parse_ok = true;
        result.llm_calls = proposal.llm_calls;

        sim::SimResult sim = sim::run_simulation(scenario_, proposal.ruleset, trace_);
        result.total_utility = sim.total_utility;
        result.eval_error_count = sim.eval_error_count;

        bool accept = options_.policy == Policy::AlwaysReplace || sim.total_utility > current_utility_;
        result.accepted = accept;
        if (accept) {
            current_text_ = proposal.ruleset_text;
            current_utility_ = sim.total_utility;
        }
        if (sim.total_utility > best_.utility)
            best_ = BestSoFar{sim.total_utility, proposal.ruleset_text, result.iteration};

        kb_.interval_history = sim.records;
        simulations_.emplace_back(result.iteration, std::move(sim));
    } catch (const PlanFailed& failed) {
        result.parse_ok = false;
        result.accepted = false;
        result.llm_calls = failed.llm_calls();
        std::string detail = failed.what();
        for (const auto& d : failed.diagnostics())
            detail += "\n" + d;
        result.failure = detail;
    }

    result.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    optimizer_.feedback(result);
    knowledge::record_iteration(kb_, result);
    return result;
}

std::vector<knowledge::IterationResult> OptimizationRun::run(int iterations) {
    std::vector<knowledge::IterationResult> results;
    results.reserve(static_cast<std::size_t>(iterations));
    for (int i = 0; i < iterations; ++i)
        results.push_back(iterate());
    return results;
}

} // namespace rulopt::opt
