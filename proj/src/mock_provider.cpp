#include "graphsense/llm/mock_provider.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "graphsense/errors.hpp"
#include "graphsense/prompts.hpp"
#include "graphsense/util/hash.hpp"
#include "graphsense/util/rng.hpp"
#include "graphsense/util/strings.hpp"

namespace graphsense {

namespace {

// Entity pool with planted structure: 6 clusters x 2 sub-blocks x 5 items.
// Extraction replies stay mostly inside one sub-block, bridge to the sibling
// sub-block in about a third of the chunks, and to the next cluster in about
// a seventh, which gives the community hierarchy two natural levels.
constexpr const char* kClusters[6] = {"ORION", "VEGA", "ALTAIR", "RIGEL", "DENEB", "SIRIUS"};
constexpr const char* kTypes[3] = {"PERSON", "ORGANIZATION", "LOCATION"};
constexpr const char* kBodyVocab[] = {
    "the",  "group",  "covers",  "shared",   "work",    "between", "its",     "members",
    "and",  "tracks", "ongoing", "activity", "around",  "several", "related", "topics",
    "with", "strong", "internal", "links",   "plus",    "a",       "few",     "outside",
};
constexpr std::size_t kBodyVocabSize = sizeof(kBodyVocab) / sizeof(kBodyVocab[0]);

struct PoolPick {
    std::size_t cluster;
    std::size_t sub;
    std::size_t item;

    std::string entity_name() const {
        return std::string(kClusters[cluster]) + "-" + (sub == 0 ? "A" : "B") +
               std::to_string(item);
    }
    std::string entity_type() const {
        return kTypes[(cluster * 7 + sub * 3 + item) % 3];
    }
};

std::string body_words(Rng& rng, std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) out.push_back(' ');
        out += kBodyVocab[rng.bounded(kBodyVocabSize)];
    }
    return out;
}

std::string entity_record(const PoolPick& p, const std::string& tag) {
    return "(\"entity\"<|>" + p.entity_name() + "<|>" + p.entity_type() +
           "<|>Note " + tag + " describing " + p.entity_name() + " in this chunk)";
}

std::string relationship_record(const PoolPick& a, const PoolPick& b, const std::string& tag) {
    return "(\"relationship\"<|>" + a.entity_name() + "<|>" + b.entity_name() +
           "<|>Link " + tag + " observed between the two)";
}

std::string extraction_records(std::uint64_t h, bool gleaning) {
    Rng rng(h);
    const std::size_t cluster = rng.bounded(6);
    const std::size_t sub = rng.bounded(2);
    const std::size_t n_entities = gleaning ? 1 + rng.bounded(2) : 3 + rng.bounded(3);

    std::vector<PoolPick> picks;
    for (std::size_t i = 0; i < n_entities; ++i) {
        PoolPick p{cluster, sub, rng.bounded(5)};
        bool dup = false;
        for (const auto& q : picks) dup = dup || (q.item == p.item && q.sub == p.sub);
        if (!dup) picks.push_back(p);
    }
    if (picks.empty()) picks.push_back(PoolPick{cluster, sub, rng.bounded(5)});

    if (!gleaning && rng.bounded(3) == 0) {
        picks.push_back(PoolPick{cluster, 1 - sub, rng.bounded(5)});
    }
    if (!gleaning && rng.bounded(7) == 0) {
        picks.push_back(PoolPick{(cluster + 1) % 6, sub, rng.bounded(5)});
    }

    std::vector<std::string> records;
    const std::string tag = hex_tag(h);
    for (const auto& p : picks) records.push_back(entity_record(p, tag));
    for (std::size_t i = 0; i + 1 < picks.size(); ++i) {
        records.push_back(relationship_record(picks[i], picks[i + 1], tag));
    }
    return join(records, "\n");
}

std::string claim_records(std::uint64_t h) {
    Rng rng(h);
    if (rng.bounded(2) == 0) return "";
    PoolPick p{rng.bounded(6), rng.bounded(2), rng.bounded(5)};
    const std::string tag = hex_tag(h);
    return "(\"claim\"<|>" + p.entity_name() + "<|>NONE<|>ACTIVITY<|>Claim " + tag +
           " recorded about " + p.entity_name() + "<|>span " + tag + "<|>NONE<|>NONE)";
}

std::string numbered_lines(std::uint64_t h, const std::string& stem, std::size_t n) {
    Rng rng(h);
    std::vector<std::string> lines;
    for (std::size_t i = 1; i <= n; ++i) {
        lines.push_back(std::to_string(i) + ". " + stem + " " + hex_tag(rng.next_u64()));
    }
    return join(lines, "\n");
}

} // namespace

MockChatProvider::MockChatProvider(Mode mode, std::uint64_t seed, std::shared_ptr<TokenCodec> codec)
    : mode_(mode), seed_(seed), codec_(std::move(codec)) {}

void MockChatProvider::add_script(std::string match, std::string reply, int max_uses) {
    std::lock_guard<std::mutex> lock(mutex_);
    script_.push_back({std::move(match), std::move(reply), max_uses, 0});
}

ChatResponse MockChatProvider::chat(const ChatRequest& request) {
    const std::string prompt = request.concatenated_text();
    std::string last_user;
    for (const auto& m : request.messages) {
        if (m.role == Role::User) last_user = m.text;
    }

    {
        std::lock_guard<std::mutex> lock(mutex_);
        ++in_flight_;
        max_in_flight_ = std::max(max_in_flight_, in_flight_);
    }

    // Scripted matching targets the newest user message: gleaning-style
    // protocols resend the whole conversation, and matching on the full
    // transcript would let earlier stages' matchers shadow later ones.
    std::string reply = mode_ == Mode::Scripted
                            ? scripted_reply(last_user.empty() ? prompt : last_user)
                            : hash_reply(prompt, last_user);

    ChatResponse response;
    response.text = reply;
    response.prompt_tokens = codec_->count(prompt);
    response.completion_tokens = codec_->count(response.text);

    {
        std::lock_guard<std::mutex> lock(mutex_);
        --in_flight_;
        log_.push_back({prompt, last_user, response.text, request.logit_bias});
    }
    return response;
}

std::string MockChatProvider::scripted_reply(const std::string& prompt) {
    std::lock_guard<std::mutex> lock(mutex_);
    for (auto& entry : script_) {
        if (entry.max_uses > 0 && entry.used >= entry.max_uses) continue;
        if (prompt.find(entry.match) != std::string::npos) {
            ++entry.used;
            return entry.reply;
        }
    }
    --in_flight_; // keep the gauge balanced; chat() will not reach its decrement
    throw ProviderRejection("mock: no scripted reply matches prompt");
}

std::string MockChatProvider::hash_reply(const std::string& prompt, const std::string& last_user) const {
    const std::uint64_t h = fnv1a64(prompt) ^ fnv1a64_mix(seed_, 0x9e3779b97f4a7c15ULL);
    const std::string tag = hex_tag(h);
    const std::string_view probe = last_user.empty() ? std::string_view(prompt)
                                                     : std::string_view(last_user);

    if (contains(probe, markers::assess_complete)) {
        return h % 3 == 0 ? "NO" : "YES";
    }
    if (contains(probe, markers::glean_more)) {
        return extraction_records(fnv1a64_mix(h, 0x7fULL), true);
    }
    if (contains(probe, markers::extract_graph)) {
        return extraction_records(h, false);
    }
    if (contains(probe, markers::extract_claims)) {
        return claim_records(h);
    }
    if (contains(probe, markers::element_summary)) {
        Rng rng(h);
        return "Combined profile " + tag + ": " + body_words(rng, 10 + rng.bounded(12)) + ".";
    }
    if (contains(probe, markers::community_report)) {
        Rng rng(h);
        return "Report " + tag + " overview\n" + body_words(rng, 25 + rng.bounded(25)) + ".";
    }
    if (contains(probe, markers::map_answer)) {
        Rng rng(h);
        nlohmann::json payload;
        payload["answer"] = "Insight " + tag + ": " + body_words(rng, 12 + rng.bounded(10)) + ".";
        payload["score"] = rng.bounded(8) == 0 ? 0 : 1 + static_cast<int>(rng.bounded(100));
        return payload.dump();
    }
    if (contains(probe, markers::final_answer)) {
        Rng rng(h);
        return "Synthesis " + tag + ". " + body_words(rng, 25 + rng.bounded(15)) + ".";
    }
    if (contains(probe, markers::gen_personas)) {
        return numbered_lines(h, "analyst persona", 8);
    }
    if (contains(probe, markers::gen_tasks)) {
        return numbered_lines(h, "review task", 8);
    }
    if (contains(probe, markers::gen_questions)) {
        return numbered_lines(h, "What dataset-wide pattern connects theme", 8);
    }
    if (contains(probe, markers::judge_pair)) {
        nlohmann::json payload;
        const char* options[3] = {"1", "2", "tie"};
        payload["winner"] = options[h % 3];
        payload["reasoning"] = "Deterministic comparison " + tag + ".";
        return payload.dump();
    }
    return "OK " + tag;
}

std::vector<MockChatProvider::CallRecord> MockChatProvider::call_log() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return log_;
}

std::size_t MockChatProvider::call_count() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return log_.size();
}

std::size_t MockChatProvider::max_concurrent() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return max_in_flight_;
}

std::vector<std::vector<double>> MockEmbeddingProvider::embed(const std::vector<std::string>& texts) {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    WhitespaceCodec words;
    for (const auto& text : texts) {
        std::vector<double> v(dimension_, 0.0);
        for (const auto& span : words.token_spans(text)) {
            const std::string word = to_lower_ascii(
                std::string_view(text).substr(span.begin, span.end - span.begin));
            v[fnv1a64(word) % dimension_] += 1.0;
        }
        double norm2 = 0.0;
        for (double x : v) norm2 += x * x;
        if (norm2 <= 0.0) {
            v[0] = 1.0;
        } else {
            const double inv = 1.0 / std::sqrt(norm2);
            for (double& x : v) x *= inv;
        }
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace graphsense
