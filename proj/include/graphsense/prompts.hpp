#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace graphsense {

// Stable phrases, one per built-in template. The deterministic mock provider
// uses them to recognize which pipeline stage a prompt belongs to, and
// scripted fixtures match on them. Custom templates that keep these phrases
// remain mock-compatible.
namespace markers {
inline constexpr std::string_view extract_graph = "Extract all entities and relationships";
inline constexpr std::string_view assess_complete = "were all entities extracted";
inline constexpr std::string_view glean_more = "MANY entities were missed in the last extraction";
inline constexpr std::string_view extract_claims = "Extract factual claims";
inline constexpr std::string_view element_summary = "merge them into one comprehensive description";
inline constexpr std::string_view community_report = "write a structured report about this community";
inline constexpr std::string_view map_answer = "helpfulness score";
inline constexpr std::string_view final_answer = "compose the final answer";
inline constexpr std::string_view gen_personas = "list the potential users";
inline constexpr std::string_view gen_tasks = "tasks this user would perform";
inline constexpr std::string_view gen_questions = "understanding of the entire dataset";
inline constexpr std::string_view judge_pair = "decide which answer is better";
} // namespace markers

// Named prompt templates with {placeholder} substitution. Defaults ship
// embedded; a workspace prompts/ directory may override any of them by name
// (<name>.txt). Placeholders without a provided value are left untouched, so
// literal braces (e.g. JSON examples) survive rendering.
class PromptLibrary {
public:
    PromptLibrary();

    static const std::vector<std::string>& template_names();

    const std::string& raw(const std::string& name) const;
    void set(const std::string& name, std::string text);

    // Loads <name>.txt overrides for every known template present in dir.
    void load_overrides(const std::filesystem::path& dir);

    // Writes every template that has no file yet into dir.
    void export_defaults(const std::filesystem::path& dir) const;

    std::string render(const std::string& name,
                       const std::map<std::string, std::string>& values) const;

private:
    std::map<std::string, std::string> templates_;
};

} // namespace graphsense
