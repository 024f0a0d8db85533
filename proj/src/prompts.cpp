#include "graphsense/prompts.hpp"

#include <fstream>
#include <sstream>

#include "graphsense/errors.hpp"
#include "graphsense/util/strings.hpp"

namespace graphsense {

namespace {

constexpr const char* kExtractGraph = R"(You are building a knowledge graph from text.

Extract all entities and relationships from the input text below.

Entity types of interest: {entity_types}

Output one record per line, using exactly these forms:
("entity"{delimiter}NAME{delimiter}TYPE{delimiter}DESCRIPTION)
("relationship"{delimiter}SOURCE_NAME{delimiter}TARGET_NAME{delimiter}DESCRIPTION)

Rules:
- NAME, SOURCE_NAME and TARGET_NAME are the entity names as mentioned in the text.
- DESCRIPTION is one or two sentences describing the entity or the relationship,
  written so it is meaningful on its own.
- Only output relationships between clearly related entities.
- Output nothing except the records.

{examples}

Input text:
{input_text}

Records:
)";

constexpr const char* kAssessComplete = R"(Review the extraction above: were all entities extracted from the input text? Answer with a single word, {yes_token} or {no_token}.)";

constexpr const char* kGleanMore = R"(MANY entities were missed in the last extraction. Add the missing entities and relationships below, using the same record format. Output only new records, nothing else.)";

constexpr const char* kExtractClaims = R"(Extract factual claims about the entities mentioned in the input text below.

Output one record per line, using exactly this form:
("claim"{delimiter}SUBJECT{delimiter}OBJECT{delimiter}TYPE{delimiter}DESCRIPTION{delimiter}SOURCE_SPAN{delimiter}START_DATE{delimiter}END_DATE)

Rules:
- SUBJECT is the entity the claim is about; OBJECT is the other party, or NONE.
- TYPE is a short category for the claim.
- SOURCE_SPAN is the exact text span the claim comes from.
- START_DATE and END_DATE are ISO dates (YYYY-MM-DD) or NONE when unknown.
- Output nothing except the records.

Input text:
{input_text}

Records:
)";

constexpr const char* kElementSummary = R"(The notes below all describe the same {element_kind}: {element_name}.

Notes:
{descriptions}

Resolve any contradictions and merge them into one comprehensive description of
at most {max_tokens} tokens. Write in full sentences, third person, and include
as much of the distinct information as fits. Output only the description.
)";

constexpr const char* kCommunityReport = R"(You are analyzing a knowledge graph community: a set of closely related
entities, their relationships, and associated claims.

Using only the context below, write a structured report about this community.
The first line is a short title naming the community's main subject. The
following lines are the report body: what the community is about, its most
important members and relationships, and anything notable. Stay under
{max_tokens} tokens.

Context:
{context}

Report:
)";

constexpr const char* kMapAnswer = R"(Answer the question using only the context below. If the context contains
nothing relevant, answer exactly: NO RELEVANT INFORMATION.

Also rate your own answer with a helpfulness score between 0 and 100, where 0
means the context contained nothing relevant to the question and 100 means the
answer fully addresses it.

Question: {question}

Context:
{context}

Respond with a single JSON object, nothing else:
{"answer": "<your answer>", "score": <0-100>}
)";

constexpr const char* kFinalAnswer = R"(Using the {context_label} below, compose the final answer to the question.
Synthesize the material into a single coherent answer; do not mention the
context structure itself.

Question: {question}

{context_label_title}:
{context}

Answer:
)";

constexpr const char* kGenPersonas = R"(A dataset is described as follows:

{dataset_description}

Based on this description, list the potential users of this dataset. Output
exactly {n} of them, one per line, numbered "1." to "{n}.", each a short role
description (for example: "an investigative journalist tracking industry
trends"). Output only the numbered lines.
)";

constexpr const char* kGenTasks = R"(A dataset is described as follows:

{dataset_description}

One of its users is: {persona}

List the tasks this user would perform with the dataset. Output exactly {n}
of them, one per line, numbered "1." to "{n}.", each a short task description.
Output only the numbered lines.
)";

constexpr const char* kGenQuestions = R"(A dataset is described as follows:

{dataset_description}

User: {persona}
Task: {task}

Write questions this user would ask of the dataset for this task. Each question
must require understanding of the entire dataset, not any single document, and
must not presume knowledge of specific details. Output exactly {n} questions,
one per line, numbered "1." to "{n}.". Output only the numbered lines.
)";

constexpr const char* kJudgePair = R"(You are comparing two answers to the same question.

Question: {question}

Metric: {metric_name} - {rubric}

Answer 1:
{answer_1}

Answer 2:
{answer_2}

According to the metric alone, decide which answer is better, or declare a tie
if they are fundamentally similar and the differences are negligible. Respond
with a single JSON object, nothing else:
{"winner": "1" | "2" | "tie", "reasoning": "<one or two sentences>"}
)";

const std::map<std::string, const char*>& default_templates() {
    static const std::map<std::string, const char*> kDefaults = {
        {"extract_graph", kExtractGraph},
        {"assess_complete", kAssessComplete},
        {"glean_more", kGleanMore},
        {"extract_claims", kExtractClaims},
        {"element_summary", kElementSummary},
        {"community_report", kCommunityReport},
        {"map_answer", kMapAnswer},
        {"final_answer", kFinalAnswer},
        {"gen_personas", kGenPersonas},
        {"gen_tasks", kGenTasks},
        {"gen_questions", kGenQuestions},
        {"judge_pair", kJudgePair},
    };
    return kDefaults;
}

} // namespace

PromptLibrary::PromptLibrary() {
    for (const auto& [name, text] : default_templates()) {
        templates_[name] = text;
    }
}

const std::vector<std::string>& PromptLibrary::template_names() {
    static const std::vector<std::string> kNames = [] {
        std::vector<std::string> names;
        for (const auto& [name, text] : default_templates()) names.push_back(name);
        return names;
    }();
    return kNames;
}

const std::string& PromptLibrary::raw(const std::string& name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw InvalidConfig("unknown prompt template: " + name);
    return it->second;
}

void PromptLibrary::set(const std::string& name, std::string text) {
    if (templates_.find(name) == templates_.end()) {
        throw InvalidConfig("unknown prompt template: " + name);
    }
    templates_[name] = std::move(text);
}

void PromptLibrary::load_overrides(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::exists(dir)) return;
    for (auto& [name, text] : templates_) {
        fs::path file = dir / (name + ".txt");
        if (!fs::exists(file)) continue;
        std::ifstream in(file, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
}

void PromptLibrary::export_defaults(const std::filesystem::path& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (const auto& [name, text] : templates_) {
        fs::path file = dir / (name + ".txt");
        if (fs::exists(file)) continue;
        std::ofstream out(file, std::ios::binary);
        out << text;
    }
}

std::string PromptLibrary::render(const std::string& name,
                                  const std::map<std::string, std::string>& values) const {
    std::string out = raw(name);
    for (const auto& [key, value] : values) {
        replace_all(out, "{" + key + "}", value);
    }
    return out;
}

} // namespace graphsense
