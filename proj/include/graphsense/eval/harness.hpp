#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "graphsense/llm/gateway.hpp"
#include "graphsense/prompts.hpp"

namespace graphsense {

struct Metric {
    std::string name;
    std::string rubric;
};

// comprehensiveness, diversity, empowerment, plus the directness control
// metric, judged like the others.
const std::vector<Metric>& builtin_metrics();
const Metric& metric_by_name(const std::string& name);

struct Question {
    std::string id;
    std::string persona;
    std::string task;
    std::string text;
};

struct QuestionSet {
    std::string dataset_description;
    int n = 0;
    std::vector<Question> questions; // n^3 when generation fully succeeds
    bool complete = true;            // false when parse failures shrank the set
};

// Activity-centered question generation: personas, then tasks per persona,
// then questions per (persona, task). Three chained LLM call layers; branch
// parse failures shrink the set and clear `complete`.
QuestionSet generate_questions(const std::string& dataset_description,
                               int n,
                               const PromptLibrary& prompts,
                               LlmGateway& gateway);

enum class TrialOutcome { A, B, Tie };

struct PairResult {
    std::string question_id;
    std::string metric;
    std::string condition_a;
    std::string condition_b;
    std::vector<TrialOutcome> trials;
    double mean_score_a = 0.5; // (wins_A + 0.5 * ties) / trials
    int failed_trials = 0;     // recorded as ties
};

struct JudgeOptions {
    int trials = 5;
    std::uint64_t seed = 0;
    // Alternate which answer is presented first across trials (A first on
    // even trials) to suppress judge position bias. Disable to always
    // present A first.
    bool alternate_order = true;
};

// Head-to-head judgment of two answers under one metric. Each trial asks the
// judge for a winner and reasoning; the presented order alternates (labels
// remapped on parse) to suppress position bias. A failed trial records a tie
// and a flag; JudgeFailed only when every trial failed.
PairResult judge_pair(const Question& question,
                      const std::string& condition_a, const std::string& answer_a,
                      const std::string& condition_b, const std::string& answer_b,
                      const Metric& metric,
                      const JudgeOptions& options,
                      const PromptLibrary& prompts,
                      LlmGateway& gateway);

struct WinRateMatrix {
    std::vector<std::string> conditions;
    std::vector<std::string> metrics;
    // cells[metric][row][col] = win rate of conditions[row] over
    // conditions[col]; diagonal 0.5; antisymmetric by construction.
    std::vector<std::vector<std::vector<double>>> cells;
    int question_count = 0;
    int failed_pairs = 0;
};

using AnswerFn = std::function<std::string(const std::string& condition, const Question&)>;

// All unordered condition pairs, per question per metric. cell(X,Y) is the
// mean over questions of mean_score; cell(Y,X) = 1 - cell(X,Y).
WinRateMatrix run_tournament(const std::vector<Question>& questions,
                             const std::vector<std::string>& conditions,
                             const std::vector<Metric>& metrics,
                             const AnswerFn& answers,
                             const JudgeOptions& options,
                             const PromptLibrary& prompts,
                             LlmGateway& gateway);

} // namespace graphsense
