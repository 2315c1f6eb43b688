#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lprotector/vstore.hpp"

namespace lprotector {

/// A knowledge entry paired with its retrieval score, as shown to the model.
struct RetrievedContext {
    KnowledgeEntry entry;
    double score = 0.0;

    bool operator==(const RetrievedContext&) const = default;
};

enum class PromptKind { Classification, Rerank };

struct PromptSpec {
    PromptKind kind = PromptKind::Classification;
    std::string system_text;
    std::string user_text;
    bool cot_enabled = false;
    /// Entries injected into the CONTEXT section (classification prompts).
    std::vector<RetrievedContext> context;
    /// Numbered candidates (rerank prompts).
    std::vector<RetrievedContext> candidates;
};

/// SHA-256 over system text, a blank line, and user text. This is the key
/// used by scripted-provider files.
std::string prompt_digest(const PromptSpec& prompt);

/// The prompt templates. Placeholders are written {{NAME}}; a line holding
/// only a placeholder whose value is empty is dropped.
///
///   system          system message
///   classification  {{CONTEXT}} {{CODE}} {{STEPS}}
///   cot_steps       inserted as {{STEPS}} when chain-of-thought is on
///   direct          inserted as {{STEPS}} when it is off
///   rerank          {{COUNT}} {{CODE}} {{CANDIDATES}}
class TemplateSet {
public:
    /// The templates compiled from templates/*.tmpl.
    static const TemplateSet& builtin();
    /// Reads <dir>/{system,classification,cot_steps,direct,rerank}.tmpl.
    /// Throws Error{MissingFile} or Error{InvalidConfig} for a template that
    /// lacks a required placeholder.
    static TemplateSet load(const std::filesystem::path& dir);

    const std::string& get(const std::string& name) const;
    /// name -> SHA-256 of the template text.
    std::map<std::string, std::string> hashes() const;

    static const std::vector<std::string>& names();

private:
    std::map<std::string, std::string> templates_;
};

/// Substitutes {{NAME}} placeholders in one pass; substituted values are never
/// rescanned, so code containing "{{...}}" is inserted literally.
std::string render_template(std::string_view text, const std::map<std::string, std::string>& values);

/// Wraps code in a ``` fence long enough that no backtick run inside the code
/// can close it.
std::string fenced_code(std::string_view code);

/// Throws Error{EmptyCode}, or Error{InvalidInput} for more than five contexts.
PromptSpec build_classification_prompt(std::string_view code, std::span<const RetrievedContext> context, bool cot,
                                       const TemplateSet& templates = TemplateSet::builtin());

/// Throws Error{EmptyCandidates}, Error{EmptyCode}, or Error{InvalidInput}
/// for more than five candidates.
PromptSpec build_rerank_prompt(std::string_view code, std::span<const RetrievedContext> candidates,
                               const TemplateSet& templates = TemplateSet::builtin());

inline constexpr std::string_view kVerdictReminder = "Answer with `VERDICT: 0` or `VERDICT: 1` only.";

/// Copy of a classification prompt with the verdict reminder appended, used
/// for the single re-ask after an unparseable answer.
PromptSpec with_verdict_reminder(PromptSpec prompt);

inline constexpr std::size_t kMaxPromptEntries = 5;

}  // namespace lprotector
