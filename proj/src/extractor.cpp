#include "graphsense/extractor.hpp"

#include "graphsense/util/parallel.hpp"
#include "graphsense/util/strings.hpp"

namespace graphsense {

namespace {

std::vector<std::string> split_fields(std::string_view body, std::string_view delimiter) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = body.find(delimiter, pos);
        std::string_view field = next == std::string_view::npos
                                     ? body.substr(pos)
                                     : body.substr(pos, next - pos);
        fields.emplace_back(strip_quotes(trim_view(field)));
        if (next == std::string_view::npos) break;
        pos = next + delimiter.size();
    }
    return fields;
}

bool is_none_field(std::string_view field) {
    if (field.empty()) return true;
    auto upper = to_upper_ascii(field);
    return upper == "NONE" || upper == "N/A" || upper == "UNKNOWN";
}

// Returns false when the field is present but not a valid ISO date.
bool parse_date_field(std::string_view field, std::optional<IsoDate>& out) {
    if (is_none_field(field)) {
        out = std::nullopt;
        return true;
    }
    out = IsoDate::parse(field);
    return out.has_value();
}

// Classifies one parenthesized group. Groups whose first field is not a known
// record kind are ignored (prose, not records); known kinds with a bad shape
// count as malformed.
void consume_group(std::string_view body, std::string_view delimiter,
                   std::string_view chunk_id, ParsedTuples& out) {
    auto fields = split_fields(body, delimiter);
    if (fields.empty()) return;
    const std::string kind = to_lower_ascii(fields[0]);
    if (kind != "entity" && kind != "relationship" && kind != "claim") return;

    if (kind == "entity") {
        if (fields.size() != 4 || collapse_whitespace(fields[1]).empty()) {
            ++out.malformed_count;
            return;
        }
        out.entities.push_back({std::string(chunk_id), fields[1], fields[2], fields[3]});
        return;
    }

    if (kind == "relationship") {
        if (fields.size() != 4 || collapse_whitespace(fields[1]).empty() ||
            collapse_whitespace(fields[2]).empty() ||
            normalize_entity_name(fields[1]) == normalize_entity_name(fields[2])) {
            ++out.malformed_count;
            return;
        }
        out.relationships.push_back({std::string(chunk_id), fields[1], fields[2], fields[3]});
        return;
    }

    // claim: subject, object, type, description, source_span, [start, end]
    if ((fields.size() != 6 && fields.size() != 8) || collapse_whitespace(fields[1]).empty()) {
        ++out.malformed_count;
        return;
    }
    ClaimInstance claim;
    claim.chunk_id = std::string(chunk_id);
    claim.subject = fields[1];
    claim.object = fields[2];
    claim.type = fields[3];
    claim.description = fields[4];
    claim.source_span = fields[5];
    if (fields.size() == 8) {
        if (!parse_date_field(fields[6], claim.start_date) ||
            !parse_date_field(fields[7], claim.end_date)) {
            ++out.malformed_count;
            return;
        }
        if (claim.start_date && claim.end_date && *claim.start_date > *claim.end_date) {
            ++out.malformed_count;
            return;
        }
    }
    out.claims.push_back(std::move(claim));
}

std::string render_examples(const ExtractionPromptConfig& cfg) {
    if (cfg.few_shot_examples.empty()) return "";
    std::string out = "Examples:\n";
    for (const auto& [input, records] : cfg.few_shot_examples) {
        out += "Input text:\n" + input + "\nRecords:\n" + records + "\n";
    }
    return out;
}

std::string first_word_upper(std::string_view reply) {
    for (const auto& span : WhitespaceCodec().token_spans(reply)) {
        std::string word(reply.substr(span.begin, span.end - span.begin));
        while (!word.empty() && !std::isalnum(static_cast<unsigned char>(word.back()))) {
            word.pop_back();
        }
        return to_upper_ascii(word);
    }
    return "";
}

void append_parsed(ParsedTuples&& parsed, ExtractionResult& result) {
    result.malformed_records_skipped += parsed.malformed_count;
    for (auto& e : parsed.entities) result.entities.push_back(std::move(e));
    for (auto& r : parsed.relationships) result.relationships.push_back(std::move(r));
    for (auto& c : parsed.claims) result.claims.push_back(std::move(c));
}

} // namespace

ParsedTuples parse_tuples(std::string_view raw, std::string_view delimiter,
                          std::string_view chunk_id) {
    ParsedTuples out;
    if (delimiter.empty()) return out;
    std::size_t pos = 0;
    while (pos < raw.size()) {
        std::size_t open = raw.find('(', pos);
        if (open == std::string_view::npos) break;
        std::size_t close = raw.find(')', open + 1);
        if (close == std::string_view::npos) break; // unterminated group: ignored
        consume_group(raw.substr(open + 1, close - open - 1), delimiter, chunk_id, out);
        pos = close + 1;
    }
    return out;
}

ExtractionResult extract_from_chunk(const TextChunk& chunk,
                                    const ExtractionPromptConfig& cfg,
                                    const PromptLibrary& prompts,
                                    LlmGateway& gateway) {
    if (trim_view(chunk.text).empty()) {
        throw ProviderRejection("chunk " + chunk.id + " has no text to extract from");
    }

    ExtractionResult result;
    result.chunk_id = chunk.id;
    result.chunk_index = chunk.index_in_document;

    std::vector<std::string> type_names = cfg.entity_types;
    const std::string base_prompt = prompts.render(
        "extract_graph", {{"entity_types", join(type_names, ", ")},
                          {"examples", render_examples(cfg)},
                          {"input_text", chunk.text},
                          {"delimiter", cfg.delimiter}});

    ChatRequest request;
    request.messages.push_back({Role::User, base_prompt});
    request.max_output_tokens = cfg.max_output_tokens;

    ChatResponse base = gateway.chat(request); // base failure aborts the chunk
    append_parsed(parse_tuples(base.text, cfg.delimiter, chunk.id), result);
    request.messages.push_back({Role::Assistant, base.text});

    const std::string assess_prompt = prompts.render(
        "assess_complete", {{"yes_token", cfg.yes_token}, {"no_token", cfg.no_token}});
    const std::string glean_prompt = prompts.raw("glean_more");

    try {
        for (int round = 1; round <= cfg.max_gleanings; ++round) {
            ChatRequest assess = request;
            assess.messages.push_back({Role::User, assess_prompt});
            assess.max_output_tokens = 8;
            assess.logit_bias[cfg.yes_token] = 100.0;
            assess.logit_bias[cfg.no_token] = 100.0;
            ChatResponse verdict = gateway.chat(assess);

            // Anything other than a clear "no" stops gleaning.
            if (first_word_upper(verdict.text) != to_upper_ascii(cfg.no_token)) break;

            request.messages.push_back({Role::User, assess_prompt});
            request.messages.push_back({Role::Assistant, verdict.text});
            request.messages.push_back({Role::User, glean_prompt});
            ChatResponse gleaned = gateway.chat(request);
            append_parsed(parse_tuples(gleaned.text, cfg.delimiter, chunk.id), result);
            request.messages.push_back({Role::Assistant, gleaned.text});
            result.gleaning_rounds_used = round;
        }

        if (cfg.claims_enabled) {
            ChatRequest claim_request;
            claim_request.messages.push_back(
                {Role::User, prompts.render("extract_claims", {{"input_text", chunk.text},
                                                               {"delimiter", cfg.delimiter}})});
            claim_request.max_output_tokens = cfg.max_output_tokens;
            ChatResponse claims = gateway.chat(claim_request);
            append_parsed(parse_tuples(claims.text, cfg.delimiter, chunk.id), result);
        }
    } catch (const Error& e) {
        // Gleanings and claims are recall enhancements: keep what we have.
        result.status = ExtractionStatus::Degraded;
        result.note = e.what();
    }
    return result;
}

std::vector<ExtractionResult> run_extraction(std::span<const TextChunk> chunks,
                                             const ExtractionPromptConfig& cfg,
                                             const PromptLibrary& prompts,
                                             LlmGateway& gateway) {
    std::vector<ExtractionResult> results(chunks.size());
    parallel_for(chunks.size(), gateway.options().concurrency, [&](std::size_t i) {
        try {
            results[i] = extract_from_chunk(chunks[i], cfg, prompts, gateway);
        } catch (const Error& e) {
            results[i].chunk_id = chunks[i].id;
            results[i].chunk_index = chunks[i].index_in_document;
            results[i].status = ExtractionStatus::Failed;
            results[i].note = e.what();
        }
    });

    bool any_ok = results.empty();
    for (const auto& r : results) any_ok = any_ok || r.status != ExtractionStatus::Failed;
    if (!any_ok) {
        throw BatchAborted("extraction failed for all " + std::to_string(results.size()) +
                           " chunks; first error: " + results.front().note);
    }
    return results;
}

} // namespace graphsense
