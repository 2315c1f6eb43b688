#include "lprotector/prompt.hpp"

#include "lprotector/builtin_templates.hpp"
#include "lprotector/error.hpp"
#include "lprotector/support.hpp"

#include <algorithm>
#include <cstdio>

namespace lprotector {

std::string prompt_digest(const PromptSpec& prompt) {
    return sha256_hex(prompt.system_text + "\n\n" + prompt.user_text);
}

namespace {

struct TemplateRequirement {
    const char* name;
    std::vector<std::string> placeholders;
};

const std::vector<TemplateRequirement>& requirements() {
    static const std::vector<TemplateRequirement> kRequirements = {
        {"system", {}},
        {"classification", {"{{CODE}}", "{{CONTEXT}}", "{{STEPS}}"}},
        {"cot_steps", {}},
        {"direct", {}},
        {"rerank", {"{{CODE}}", "{{CANDIDATES}}", "{{COUNT}}"}},
    };
    return kRequirements;
}

void check_placeholders(const std::string& name, const std::string& text) {
    for (const auto& req : requirements()) {
        if (name != req.name) continue;
        for (const auto& placeholder : req.placeholders) {
            if (text.find(placeholder) == std::string::npos) {
                throw Error(Errc::InvalidConfig, "template '" + name + "' lacks " + placeholder);
            }
        }
    }
}

std::string strip_trailing(std::string_view text) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) {
        text.remove_suffix(1);
    }
    return std::string(text);
}

std::string format_score(double score) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.6f", score);
    return buffer;
}

std::string value_or_unknown(const std::optional<std::string>& value) {
    if (!value || is_blank(*value)) return "unknown";
    // Metadata is shown on one line.
    std::string flat(trim(*value));
    std::replace(flat.begin(), flat.end(), '\n', ' ');
    std::replace(flat.begin(), flat.end(), '\r', ' ');
    return flat;
}

std::string entry_block(const RetrievedContext& item) {
    std::string block;
    block += "Entry: " + item.entry.id + "\n";
    block += "CWE: " + value_or_unknown(item.entry.cwe_id) + "\n";
    block += "Name: " + value_or_unknown(item.entry.vuln_name) + "\n";
    block += "Description: " + value_or_unknown(item.entry.description) + "\n";
    block += "Similarity score: " + format_score(item.score) + "\n";
    block += fenced_code(item.entry.code);
    return block;
}

std::string context_section(std::span<const RetrievedContext> context) {
    if (context.empty()) return {};
    std::string section = "CONTEXT\n";
    if (context.size() == 1) {
        section += "The known vulnerable function below was retrieved from the knowledge base as the closest match "
                   "to the target function.\n";
        section += entry_block(context.front()) + "\n";
    } else {
        section += "The known vulnerable functions below were retrieved from the knowledge base as the closest "
                   "matches to the target function.\n";
        for (std::size_t i = 0; i < context.size(); ++i) {
            section += "Context entry " + std::to_string(i + 1) + " of " + std::to_string(context.size()) + "\n";
            section += entry_block(context[i]) + "\n";
        }
    }
    section += "END CONTEXT";
    return section;
}

void require_code(std::string_view code) {
    if (is_blank(code)) throw Error(Errc::EmptyCode, "target code is blank");
}

}  // namespace

const std::vector<std::string>& TemplateSet::names() {
    static const std::vector<std::string> kNames = {"system", "classification", "cot_steps", "direct", "rerank"};
    return kNames;
}

const TemplateSet& TemplateSet::builtin() {
    static const TemplateSet kBuiltin = [] {
        TemplateSet set;
        set.templates_["system"] = std::string(builtin::kSystemTemplate);
        set.templates_["classification"] = std::string(builtin::kClassificationTemplate);
        set.templates_["cot_steps"] = std::string(builtin::kCotStepsTemplate);
        set.templates_["direct"] = std::string(builtin::kDirectTemplate);
        set.templates_["rerank"] = std::string(builtin::kRerankTemplate);
        return set;
    }();
    return kBuiltin;
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
    TemplateSet set;
    for (const auto& name : names()) {
        auto text = read_file(dir / (name + ".tmpl"));
        check_placeholders(name, text);
        set.templates_[name] = std::move(text);
    }
    return set;
}

const std::string& TemplateSet::get(const std::string& name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw Error(Errc::InvalidConfig, "no template named '" + name + "'");
    return it->second;
}

std::map<std::string, std::string> TemplateSet::hashes() const {
    std::map<std::string, std::string> out;
    for (const auto& [name, text] : templates_) out[name] = sha256_hex(text);
    return out;
}

std::string render_template(std::string_view text, const std::map<std::string, std::string>& values) {
    std::string out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto line_end = text.find('\n', pos);
        const bool has_newline = line_end != std::string_view::npos;
        if (!has_newline) line_end = text.size();
        const auto line = text.substr(pos, line_end - pos);

        std::string rendered;
        bool only_placeholders = !trim(line).empty();
        std::size_t i = 0;
        while (i < line.size()) {
            const auto open = line.find("{{", i);
            if (open == std::string_view::npos) {
                if (!trim(line.substr(i)).empty()) only_placeholders = false;
                rendered.append(line.substr(i));
                break;
            }
            const auto close = line.find("}}", open + 2);
            if (close == std::string_view::npos) {
                only_placeholders = false;
                rendered.append(line.substr(i));
                break;
            }
            if (!trim(line.substr(i, open - i)).empty()) only_placeholders = false;
            rendered.append(line.substr(i, open - i));
            const std::string name(line.substr(open + 2, close - open - 2));
            auto it = values.find(name);
            if (it == values.end()) {
                only_placeholders = false;
                rendered.append(line.substr(open, close + 2 - open));
            } else {
                rendered.append(it->second);
            }
            i = close + 2;
        }
        const bool drop = only_placeholders && trim(rendered).empty();
        if (!drop) {
            out += rendered;
            if (has_newline) out += '\n';
        }
        pos = line_end + 1;
    }
    return out;
}

std::string fenced_code(std::string_view code) {
    std::size_t longest = 0;
    std::size_t run = 0;
    for (char c : code) {
        run = c == '`' ? run + 1 : 0;
        longest = std::max(longest, run);
    }
    const std::string fence(std::max<std::size_t>(3, longest + 1), '`');
    std::string out = fence + "c\n";
    out.append(code);
    if (out.back() != '\n') out += '\n';
    out += fence;
    return out;
}

PromptSpec build_classification_prompt(std::string_view code, std::span<const RetrievedContext> context, bool cot,
                                       const TemplateSet& templates) {
    require_code(code);
    if (context.size() > kMaxPromptEntries) {
        throw Error(Errc::InvalidInput, "at most " + std::to_string(kMaxPromptEntries) + " context entries");
    }
    PromptSpec prompt;
    prompt.kind = PromptKind::Classification;
    prompt.cot_enabled = cot;
    prompt.context.assign(context.begin(), context.end());
    prompt.system_text = strip_trailing(templates.get("system"));
    prompt.user_text = strip_trailing(render_template(
        templates.get("classification"),
        {{"CONTEXT", context_section(context)},
         {"CODE", fenced_code(code)},
         {"STEPS", strip_trailing(templates.get(cot ? "cot_steps" : "direct"))}}));
    return prompt;
}

PromptSpec build_rerank_prompt(std::string_view code, std::span<const RetrievedContext> candidates,
                               const TemplateSet& templates) {
    if (candidates.empty()) throw Error(Errc::EmptyCandidates, "rerank needs at least one candidate");
    if (candidates.size() > kMaxPromptEntries) {
        throw Error(Errc::InvalidInput, "at most " + std::to_string(kMaxPromptEntries) + " rerank candidates");
    }
    require_code(code);
    std::string listing;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto number = std::to_string(i + 1);
        listing += "CANDIDATE " + number + "\n" + entry_block(candidates[i]) + "\nEND CANDIDATE " + number;
        if (i + 1 < candidates.size()) listing += "\n";
    }
    PromptSpec prompt;
    prompt.kind = PromptKind::Rerank;
    prompt.candidates.assign(candidates.begin(), candidates.end());
    prompt.system_text = strip_trailing(templates.get("system"));
    prompt.user_text = strip_trailing(render_template(templates.get("rerank"),
                                                      {{"COUNT", std::to_string(candidates.size())},
                                                       {"CODE", fenced_code(code)},
                                                       {"CANDIDATES", listing}}));
    return prompt;
}

PromptSpec with_verdict_reminder(PromptSpec prompt) {
    prompt.user_text += "\n";
    prompt.user_text += kVerdictReminder;
    return prompt;
}

}  // namespace lprotector
