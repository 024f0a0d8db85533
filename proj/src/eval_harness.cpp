#include "graphsense/eval/harness.hpp"

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>

#include "graphsense/errors.hpp"
#include "graphsense/util/parallel.hpp"
#include "graphsense/util/strings.hpp"

namespace graphsense {

namespace {

using nlohmann::json;

// Strips a "12." / "12)" / "-" prefix from a list line.
std::string strip_enumeration(const std::string& line) {
    std::string_view s = trim_view(line);
    std::size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')')) {
        return trim(s.substr(i + 1));
    }
    if (!s.empty() && (s.front() == '-' || s.front() == '*')) {
        return trim(s.substr(1));
    }
    return trim(s);
}

std::vector<std::string> parse_list(const std::string& reply, int n) {
    std::vector<std::string> items;
    for (const auto& line : split_lines(reply)) {
        std::string item = strip_enumeration(line);
        if (item.empty()) continue;
        items.push_back(std::move(item));
        if (static_cast<int>(items.size()) == n) break;
    }
    return items;
}

} // namespace

const std::vector<Metric>& builtin_metrics() {
    static const std::vector<Metric> kMetrics = {
        {"comprehensiveness",
         "How much detail does the answer provide to cover all aspects and details of the "
         "question?"},
        {"diversity",
         "How varied and rich is the answer in providing different perspectives and insights on "
         "the question?"},
        {"empowerment",
         "How well does the answer help the reader understand and make informed judgements about "
         "the topic?"},
        {"directness", "How specifically and clearly does the answer address the question?"},
    };
    return kMetrics;
}

const Metric& metric_by_name(const std::string& name) {
    for (const auto& m : builtin_metrics()) {
        if (m.name == name) return m;
    }
    throw InvalidConfig("unknown metric: " + name);
}

QuestionSet generate_questions(const std::string& dataset_description,
                               int n,
                               const PromptLibrary& prompts,
                               LlmGateway& gateway) {
    if (n < 1) throw InvalidConfig("question generation requires n >= 1");

    QuestionSet set;
    set.dataset_description = dataset_description;
    set.n = n;
    const std::string n_str = std::to_string(n);

    ChatRequest personas_request = ChatRequest::single(
        prompts.render("gen_personas",
                       {{"dataset_description", dataset_description}, {"n", n_str}}));
    auto personas = parse_list(gateway.chat(personas_request).text, n);
    if (static_cast<int>(personas.size()) < n) set.complete = false;

    std::vector<std::vector<std::string>> tasks(personas.size());
    parallel_for(personas.size(), gateway.options().concurrency, [&](std::size_t p) {
        ChatRequest request = ChatRequest::single(
            prompts.render("gen_tasks", {{"dataset_description", dataset_description},
                                         {"persona", personas[p]},
                                         {"n", n_str}}));
        tasks[p] = parse_list(gateway.chat(request).text, n);
    });

    struct Branch {
        std::size_t persona;
        std::size_t task;
    };
    std::vector<Branch> branches;
    for (std::size_t p = 0; p < personas.size(); ++p) {
        if (static_cast<int>(tasks[p].size()) < n) set.complete = false;
        for (std::size_t t = 0; t < tasks[p].size(); ++t) branches.push_back({p, t});
    }

    std::vector<std::vector<std::string>> generated(branches.size());
    parallel_for(branches.size(), gateway.options().concurrency, [&](std::size_t b) {
        ChatRequest request = ChatRequest::single(
            prompts.render("gen_questions", {{"dataset_description", dataset_description},
                                             {"persona", personas[branches[b].persona]},
                                             {"task", tasks[branches[b].persona][branches[b].task]},
                                             {"n", n_str}}));
        generated[b] = parse_list(gateway.chat(request).text, n);
    });

    for (std::size_t b = 0; b < branches.size(); ++b) {
        if (static_cast<int>(generated[b].size()) < n) set.complete = false;
        for (const auto& text : generated[b]) {
            Question q;
            q.id = "q" + std::to_string(set.questions.size());
            q.persona = personas[branches[b].persona];
            q.task = tasks[branches[b].persona][branches[b].task];
            q.text = text;
            set.questions.push_back(std::move(q));
        }
    }
    return set;
}

namespace {

// Maps the judge's positional verdict back to outcome; pos1_is_a says which
// condition was presented as "Answer 1" this trial.
bool parse_verdict(const std::string& reply, bool pos1_is_a, TrialOutcome& out) {
    std::string winner;
    auto try_parse = [&](std::string_view text) {
        json parsed = json::parse(text, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("winner")) {
            return false;
        }
        if (!parsed["winner"].is_string()) return false;
        winner = to_lower_ascii(parsed["winner"].get<std::string>());
        return true;
    };
    bool ok = try_parse(trim_view(reply));
    if (!ok) {
        const std::size_t open = reply.find('{');
        const std::size_t close = reply.rfind('}');
        if (open == std::string::npos || close == std::string::npos || close <= open) return false;
        ok = try_parse(std::string_view(reply).substr(open, close - open + 1));
    }
    if (!ok) return false;

    winner = trim(winner);
    if (winner == "tie" || winner == "draw") {
        out = TrialOutcome::Tie;
        return true;
    }
    if (winner == "1" || winner == "answer 1") {
        out = pos1_is_a ? TrialOutcome::A : TrialOutcome::B;
        return true;
    }
    if (winner == "2" || winner == "answer 2") {
        out = pos1_is_a ? TrialOutcome::B : TrialOutcome::A;
        return true;
    }
    return false;
}

} // namespace

PairResult judge_pair(const Question& question,
                      const std::string& condition_a, const std::string& answer_a,
                      const std::string& condition_b, const std::string& answer_b,
                      const Metric& metric,
                      const JudgeOptions& options,
                      const PromptLibrary& prompts,
                      LlmGateway& gateway) {
    if (trim_view(answer_a).empty() || trim_view(answer_b).empty()) {
        throw InvalidConfig("judge_pair requires two non-empty answers");
    }
    if (options.trials < 1) throw InvalidConfig("judge trials must be >= 1");

    PairResult result;
    result.question_id = question.id;
    result.metric = metric.name;
    result.condition_a = condition_a;
    result.condition_b = condition_b;

    for (int trial = 0; trial < options.trials; ++trial) {
        const bool pos1_is_a = !options.alternate_order || trial % 2 == 0;
        ChatRequest request = ChatRequest::single(
            prompts.render("judge_pair",
                           {{"question", question.text},
                            {"metric_name", metric.name},
                            {"rubric", metric.rubric},
                            {"answer_1", pos1_is_a ? answer_a : answer_b},
                            {"answer_2", pos1_is_a ? answer_b : answer_a}}),
            500);
        request.seed = options.seed + static_cast<std::uint64_t>(trial);

        TrialOutcome outcome = TrialOutcome::Tie;
        try {
            const std::string reply = gateway.chat(request).text;
            if (!parse_verdict(reply, pos1_is_a, outcome)) {
                outcome = TrialOutcome::Tie;
                ++result.failed_trials;
            }
        } catch (const Error&) {
            outcome = TrialOutcome::Tie;
            ++result.failed_trials;
        }
        result.trials.push_back(outcome);
    }

    if (result.failed_trials == options.trials) {
        throw JudgeFailed("all " + std::to_string(options.trials) + " judge trials failed for " +
                          question.id + "/" + metric.name);
    }

    double score = 0.0;
    for (TrialOutcome o : result.trials) {
        if (o == TrialOutcome::A) score += 1.0;
        if (o == TrialOutcome::Tie) score += 0.5;
    }
    result.mean_score_a = score / static_cast<double>(options.trials);
    return result;
}

WinRateMatrix run_tournament(const std::vector<Question>& questions,
                             const std::vector<std::string>& conditions,
                             const std::vector<Metric>& metrics,
                             const AnswerFn& answers,
                             const JudgeOptions& options,
                             const PromptLibrary& prompts,
                             LlmGateway& gateway) {
    if (conditions.size() < 2) throw InvalidConfig("a tournament needs at least 2 conditions");
    if (questions.empty()) throw InvalidConfig("a tournament needs at least 1 question");

    WinRateMatrix matrix;
    matrix.conditions = conditions;
    for (const auto& m : metrics) matrix.metrics.push_back(m.name);
    matrix.question_count = static_cast<int>(questions.size());
    matrix.cells.assign(metrics.size(),
                        std::vector<std::vector<double>>(
                            conditions.size(), std::vector<double>(conditions.size(), 0.5)));

    // Answers are produced once per (condition, question); the answer
    // function may run a whole pipeline, so this stays sequential while the
    // judging below is concurrent.
    std::map<std::pair<std::size_t, std::size_t>, std::string> answer_cache;
    for (std::size_t c = 0; c < conditions.size(); ++c) {
        for (std::size_t q = 0; q < questions.size(); ++q) {
            answer_cache[{c, q}] = answers(conditions[c], questions[q]);
        }
    }

    for (std::size_t i = 0; i < conditions.size(); ++i) {
        for (std::size_t j = i + 1; j < conditions.size(); ++j) {
            for (std::size_t m = 0; m < metrics.size(); ++m) {
                std::vector<double> scores(questions.size(), 0.5);
                std::vector<int> failures(questions.size(), 0);
                parallel_for(questions.size(), gateway.options().concurrency, [&](std::size_t q) {
                    try {
                        PairResult pair = judge_pair(
                            questions[q], conditions[i], answer_cache.at({i, q}),
                            conditions[j], answer_cache.at({j, q}), metrics[m], options,
                            prompts, gateway);
                        scores[q] = pair.mean_score_a;
                    } catch (const JudgeFailed&) {
                        failures[q] = 1; // cell keeps the neutral 0.5 contribution
                    }
                });
                double total = 0.0;
                for (double s : scores) total += s;
                for (int f : failures) matrix.failed_pairs += f;
                const double win_rate = total / static_cast<double>(questions.size());
                matrix.cells[m][i][j] = win_rate;
                matrix.cells[m][j][i] = 1.0 - win_rate; // antisymmetry by construction
            }
        }
    }
    return matrix;
}

} // namespace graphsense
