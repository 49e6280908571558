#include "rulopt/knowledge/knowledge.hpp"

#include "rulopt/dsl/parse.hpp"
#include "rulopt/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace rulopt::knowledge {

namespace {

std::string fmt(double v) {
    return format_double(v);
}

// Compact fixed-point rendering for prose-facing numbers.
std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
}

} // namespace

std::vector<VariableInfo> default_catalog(const sim::ScenarioConfig& scenario) {
    using Kind = VariableInfo::Kind;
    double smax = static_cast<double>(scenario.max_servers);
    return {
        {"arrival_rate", Kind::Observed, 0.0, std::nullopt, "req/s",
         "request arrival rate observed in the last interval"},
        {"arrival_rate_ewma", Kind::Observed, 0.0, std::nullopt, "req/s",
         "exponentially smoothed arrival rate"},
        {"response_time", Kind::Observed, 0.0, std::nullopt, "s",
         "mean response time of the last interval"},
        {"response_time_ewma", Kind::Observed, 0.0, std::nullopt, "s",
         "exponentially smoothed response time"},
        {"utilization", Kind::Observed, 0.0, std::nullopt, "-",
         "offered load divided by active capacity (can exceed 1 under overload)"},
        {"servers", Kind::Control, 1.0, smax, "count",
         "active servers; set_servers/add_servers change the committed pool"},
        {"booting_servers", Kind::Observed, 0.0, smax, "count",
         "servers still booting; they cost money but serve no load"},
        {"max_servers", Kind::Observed, smax, smax, "count", "upper bound of the server pool"},
        {"dimmer", Kind::Control, 0.0, 1.0, "-",
         "fraction of responses served with optional content; higher earns more per request but slows service"},
        {"throughput", Kind::Observed, 0.0, std::nullopt, "req/s", "requests served in the last interval"},
        {"intervals_since_server_change", Kind::Observed, 0.0, std::nullopt, "intervals",
         "intervals since a rule last changed the server allocation"},
        {"interval_index", Kind::Observed, 0.0, std::nullopt, "intervals",
         "index of the interval being decided"},
        {"last_interval_utility", Kind::Observed, std::nullopt, std::nullopt, "money",
         "utility earned in the last interval"},
    };
}

std::vector<std::string> catalog_names(const std::vector<VariableInfo>& catalog) {
    std::vector<std::string> names;
    names.reserve(catalog.size());
    for (const auto& v : catalog)
        names.push_back(v.name);
    return names;
}

KnowledgeBase make_knowledge_base(const sim::ScenarioConfig& scenario) {
    KnowledgeBase kb;
    kb.domain_description =
        "The managed system is an elastic web application behind a load balancer. Requests arrive at a "
        "fluctuating rate and are spread across a pool of identical servers (1 to " +
        std::to_string(scenario.max_servers) +
        "). A newly requested server boots for " + std::to_string(scenario.boot_delay_intervals) +
        " intervals before it serves load, but is billed from the moment it is requested; removals take "
        "effect immediately. Each response optionally carries extra revenue-generating content, governed "
        "by a dimmer in [0,1]: at dimmer d the mean service time per request is d*" +
        fmt(scenario.service.time_optional) + " + (1-d)*" + fmt(scenario.service.time_mandatory) +
        " seconds. Decisions are made once per " + fmt(scenario.interval_seconds) +
        "-second interval from the previous interval's observations.";
    kb.goals =
        "Maximize total utility, the sum over intervals of revenue minus cost. While the mean response time "
        "stays at or below " +
        fmt(scenario.economics.rt_threshold) + " seconds, each served request earns " +
        fmt(scenario.economics.revenue_mandatory) + " (mandatory content only) up to " +
        fmt(scenario.economics.revenue_optional) +
        " (full optional content), scaled by the dimmer. When the threshold is missed or the system "
        "saturates, revenue is replaced by a penalty of " +
        fmt(scenario.economics.penalty) +
        " per arriving request, so utility can go negative. Every requested server (booting or active) "
        "costs " +
        fmt(scenario.economics.server_cost) + " per second.";
    kb.catalog = default_catalog(scenario);
    return kb;
}

void record_iteration(KnowledgeBase& kb, IterationResult result) {
    if (!kb.iteration_history.empty()) {
        int last = kb.iteration_history.back().iteration;
        if (result.iteration == last)
            throw KnowledgeError("duplicate iteration index " + std::to_string(result.iteration));
        if (result.iteration < last)
            throw KnowledgeError("iteration index " + std::to_string(result.iteration) +
                                 " not increasing (last was " + std::to_string(last) + ")");
    }
    kb.iteration_history.push_back(std::move(result));
}

const std::string& current_ruleset_text(const KnowledgeBase& kb) {
    for (auto it = kb.iteration_history.rbegin(); it != kb.iteration_history.rend(); ++it)
        if (it->parse_ok)
            return it->ruleset_text;
    throw KnowledgeError("no installed ruleset in history");
}

namespace {

std::string interval_line(const sim::IntervalRecord& r) {
    std::string line = "t=" + std::to_string(r.interval_index) + " lambda=" + fmt2(r.arrival_rate) +
                       " servers=" + std::to_string(r.active_servers) +
                       " booting=" + std::to_string(r.booting_servers) + " dimmer=" + fmt2(r.dimmer) +
                       " rt=" + fmt2(r.response_time) + " utility=" + fmt2(r.interval_utility) +
                       (r.violated ? " VIOLATED" : "");
    if (r.eval_error)
        line += " rule_error=\"" + *r.eval_error + "\"";
    return line;
}

std::string iteration_line(const IterationResult& it) {
    std::string line = "- iteration " + std::to_string(it.iteration) + ": ";
    if (it.total_utility)
        line += "utility=" + fmt2(*it.total_utility) +
                (it.eval_error_count > 0 ? " rule_errors=" + std::to_string(it.eval_error_count) : "");
    else
        line += "failed (no valid ruleset produced)";
    return line;
}

} // namespace

HistorySummary summarize_history(const KnowledgeBase& kb, const SummaryOptions& options) {
    if (options.budget < 256)
        throw std::invalid_argument("summarize_history: budget must be >= 256 characters");
    bool any_simulated = std::any_of(kb.iteration_history.begin(), kb.iteration_history.end(),
                                     [](const IterationResult& r) { return r.total_utility.has_value(); });
    if (kb.interval_history.empty() || !any_simulated)
        throw KnowledgeError("empty history: no completed simulation to summarize");

    const auto& records = kb.interval_history;
    HistorySummary summary;
    for (const auto& r : records) {
        summary.total_utility += r.interval_utility;
        if (r.violated)
            ++summary.violation_count;
        if (r.eval_error)
            ++summary.error_count;
    }

    std::size_t n = records.size();
    summary.phase_utilities.assign(4, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        summary.phase_utilities[std::min<std::size_t>(i * 4 / n, 3)] += records[i].interval_utility;

    // Worst k by (utility, index).
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (records[a].interval_utility != records[b].interval_utility)
            return records[a].interval_utility < records[b].interval_utility;
        return a < b;
    });
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(0, options.worst_k)), n);
    for (std::size_t i = 0; i < k; ++i) {
        WorstInterval w;
        w.record = records[order[i]];
        std::size_t lo = order[i] >= static_cast<std::size_t>(options.context_radius)
                             ? order[i] - static_cast<std::size_t>(options.context_radius)
                             : 0;
        std::size_t hi = std::min(n - 1, order[i] + static_cast<std::size_t>(options.context_radius));
        for (std::size_t j = lo; j <= hi; ++j)
            w.context.push_back(records[j]);
        summary.worst.push_back(std::move(w));
    }

    // Aggregates are always kept.
    std::string aggregates = "Totals: utility=" + fmt2(summary.total_utility) + " over " + std::to_string(n) +
                             " intervals, threshold_violations=" + std::to_string(summary.violation_count) +
                             ", rule_errors=" + std::to_string(summary.error_count) + "\n";
    aggregates += "Utility by quarter of the run: " + fmt2(summary.phase_utilities[0]) + ", " +
                  fmt2(summary.phase_utilities[1]) + ", " + fmt2(summary.phase_utilities[2]) + ", " +
                  fmt2(summary.phase_utilities[3]) + "\n";

    std::vector<std::string> iteration_lines;
    for (const auto& it : kb.iteration_history)
        iteration_lines.push_back(iteration_line(it));

    // Worst-interval blocks: headline plus context lines.
    std::vector<std::vector<std::string>> worst_blocks;
    for (const auto& w : summary.worst) {
        std::vector<std::string> block;
        block.push_back("- worst interval " + std::to_string(w.record.interval_index) + ": " +
                        interval_line(w.record));
        for (const auto& c : w.context)
            if (c.interval_index != w.record.interval_index)
                block.push_back("    context " + interval_line(c));
        worst_blocks.push_back(std::move(block));
    }

    auto assemble = [&](std::size_t iter_keep, std::size_t blocks_keep, bool context_lines) {
        std::string text = aggregates;
        text += "Rulesets tried so far:\n";
        if (iter_keep < iteration_lines.size())
            text += "- (" + std::to_string(iteration_lines.size() - iter_keep) + " older iterations omitted)\n";
        for (std::size_t i = iteration_lines.size() - iter_keep; i < iteration_lines.size(); ++i)
            text += iteration_lines[i] + "\n";
        if (blocks_keep > 0) {
            text += "Lowest-utility intervals (with surrounding context):\n";
            for (std::size_t i = 0; i < blocks_keep; ++i) {
                text += worst_blocks[i][0] + "\n";
                if (context_lines)
                    for (std::size_t j = 1; j < worst_blocks[i].size(); ++j)
                        text += worst_blocks[i][j] + "\n";
            }
        }
        return text;
    };

    // Degrade detail until the budget holds: context lines, then whole
    // worst blocks (least-bad first), then oldest iteration lines.
    summary.text = assemble(iteration_lines.size(), worst_blocks.size(), true);
    if (summary.text.size() > options.budget)
        summary.text = assemble(iteration_lines.size(), worst_blocks.size(), false);
    for (std::size_t blocks = worst_blocks.size(); summary.text.size() > options.budget && blocks > 0;) {
        --blocks;
        summary.text = assemble(iteration_lines.size(), blocks, false);
    }
    for (std::size_t keep = iteration_lines.size(); summary.text.size() > options.budget && keep > 0;) {
        --keep;
        summary.text = assemble(keep, 0, false);
    }
    if (summary.text.size() > options.budget)
        summary.text.resize(options.budget);
    return summary;
}

namespace {

void require_complete(const KnowledgeBase& kb) {
    if (kb.domain_description.empty())
        throw KnowledgeError("knowledge base incomplete: missing domain description");
    if (kb.goals.empty())
        throw KnowledgeError("knowledge base incomplete: missing goals");
    if (kb.catalog.empty())
        throw KnowledgeError("knowledge base incomplete: missing variable catalog");
    if (kb.iteration_history.empty() || kb.interval_history.empty())
        throw KnowledgeError("knowledge base incomplete: missing historical operational data");
}

std::string render_catalog(const std::vector<VariableInfo>& catalog) {
    std::string out;
    for (const auto& v : catalog) {
        out += "- " + v.name + " (" + (v.kind == VariableInfo::Kind::Control ? "control" : "observed");
        if (!v.unit.empty() && v.unit != "-")
            out += ", " + v.unit;
        if (v.min && v.max)
            out += ", range " + fmt(*v.min) + ".." + fmt(*v.max);
        else if (v.min)
            out += ", >= " + fmt(*v.min);
        out += "): " + v.description + "\n";
    }
    return out;
}

std::string with_trailing_newline(std::string s) {
    if (s.empty() || s.back() != '\n')
        s.push_back('\n');
    return s;
}

std::string render_categories(const KnowledgeBase& kb, const HistorySummary& summary) {
    std::string out;
    out += "## Domain\n" + kb.domain_description + "\n\n";
    out += "## Goals\n" + kb.goals + "\n\n";
    out += "## Variables\n" + render_catalog(kb.catalog) + "\n";
    out += "## History\n" + with_trailing_newline(summary.text);
    return out;
}

} // namespace

std::string render_analyzer_prompt(const KnowledgeBase& kb, const HistorySummary& summary) {
    require_complete(kb);
    std::string prompt = render_categories(kb, summary);
    prompt += "\n## Current rules\n```\n" + with_trailing_newline(current_ruleset_text(kb)) + "```\n";
    prompt += "\n## Task\n"
              "Review the current adaptation rules against the history above. Identify the issues that "
              "caused poor utility, tie each issue to the specific intervals where it shows, and state "
              "which part of the rules to modify and how. Reply with a concise diagnosis as a bulleted "
              "list; do not write new rules yet.\n";
    return prompt;
}

std::string render_planner_prompt(const KnowledgeBase& kb, const HistorySummary& summary,
                                  const std::string& diagnosis) {
    require_complete(kb);
    if (diagnosis.empty())
        throw KnowledgeError("planner prompt requires a non-empty diagnosis");
    std::string prompt = render_categories(kb, summary);
    prompt += "\n## Current rules\n```\n" + with_trailing_newline(current_ruleset_text(kb)) + "```\n";
    prompt += "\n## Diagnosis\n" + with_trailing_newline(diagnosis);
    prompt += "\n## Rule language\n"
              "Rules are written in a small condition-action language. Only the variables listed in the "
              "Variables section exist; `servers` and `dimmer` are the controls.\n\n```\n";
    prompt += dsl::kGrammarReference;
    prompt += "```\n";
    prompt += "\n## Output format\n"
              "Reply with exactly one fenced code block containing the complete replacement ruleset. "
              "Any text outside the code block is ignored.\n";
    return prompt;
}

void save_knowledge_base(const KnowledgeBase& kb, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "history");

    auto write_file = [](const fs::path& p, const std::string& content) {
        std::ofstream out(p, std::ios::binary);
        if (!out)
            throw KnowledgeError("cannot write " + p.string());
        out << content;
    };

    write_file(dir / "domain.txt", kb.domain_description + "\n");
    write_file(dir / "goals.txt", kb.goals + "\n");

    std::string catalog_csv = "name,kind,min,max,unit,description\n";
    for (const auto& v : kb.catalog) {
        catalog_csv += v.name;
        catalog_csv += ',';
        catalog_csv += v.kind == VariableInfo::Kind::Control ? "control" : "observed";
        catalog_csv += ',';
        catalog_csv += v.min ? fmt(*v.min) : "";
        catalog_csv += ',';
        catalog_csv += v.max ? fmt(*v.max) : "";
        catalog_csv += ',';
        catalog_csv += csv_field(v.unit);
        catalog_csv += ',';
        catalog_csv += csv_field(v.description);
        catalog_csv += '\n';
    }
    write_file(dir / "catalog.csv", catalog_csv);

    std::string iterations_csv = "iteration,utility,errors,ruleset_file\n";
    for (const auto& it : kb.iteration_history) {
        std::string rules_file = "iter_" + std::to_string(it.iteration) + ".rules";
        if (it.parse_ok)
            write_file(dir / "history" / rules_file, it.ruleset_text);
        iterations_csv += std::to_string(it.iteration);
        iterations_csv += ',';
        iterations_csv += it.total_utility ? fmt(*it.total_utility) : "";
        iterations_csv += ',';
        iterations_csv += std::to_string(it.eval_error_count);
        iterations_csv += ',';
        iterations_csv += it.parse_ok ? rules_file : "";
        iterations_csv += '\n';
    }
    write_file(dir / "history" / "iterations.csv", iterations_csv);
}

} // namespace rulopt::knowledge
