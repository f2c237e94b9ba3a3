#include "rankforge/synthesizer.hpp"

#include <regex>
#include <sstream>

#include <json.hpp>

#include "rankforge/rng.hpp"

namespace rankforge {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

/// Pulls the body of a ```json fenced block, or returns the input when no
/// fence is present.
std::string strip_json_fence(const std::string& text) {
    const auto open = text.find("```json");
    if (open == std::string::npos) {
        const auto bare = text.find("```");
        if (bare == std::string::npos) return text;
        const auto close = text.find("```", bare + 3);
        if (close == std::string::npos) return text.substr(bare + 3);
        return text.substr(bare + 3, close - bare - 3);
    }
    const auto close = text.find("```", open + 7);
    if (close == std::string::npos) return text.substr(open + 7);
    return text.substr(open + 7, close - open - 7);
}

}  // namespace

void validate_bounds(const SynthesizerConfig& config) {
    if (config.materials_min < 3 || config.materials_max > 7 ||
        config.materials_min > config.materials_max) {
        throw PreconditionError("ConfigError", "material bounds must stay within [3, 7]");
    }
    if (config.negatives_min < 1 || config.negatives_max > 5 ||
        config.negatives_min > config.negatives_max) {
        throw PreconditionError("ConfigError", "negative bounds must stay within [1, 5]");
    }
    if (config.persona_samples < 1) {
        throw PreconditionError("ConfigError", "persona_samples must be >= 1");
    }
}

std::vector<std::string> parse_numbered_list(const std::string& text) {
    static const std::regex item(R"(^\s*(\d+)[.)]\s*(.*\S)\s*$)");
    std::vector<std::string> entries;
    std::istringstream in(text);
    std::string line;
    int expected = 1;
    while (std::getline(in, line)) {
        std::smatch m;
        if (!std::regex_match(line, m, item)) continue;
        const int number = std::stoi(m[1].str());
        if (number != expected) {
            throw Error("ParseError", "list numbering jumps to " + m[1].str() + " at position " +
                                          std::to_string(expected));
        }
        entries.push_back(m[2].str());
        ++expected;
    }
    if (entries.empty()) {
        throw Error("ParseError", "no numbered list found in: " + text.substr(0, 80));
    }
    return entries;
}

Synthesizer::Synthesizer(Gateway& gateway, const PromptLibrary& prompts, SynthesizerConfig config,
                         std::vector<Persona> persona_pool)
    : gateway_(gateway),
      prompts_(prompts),
      config_(std::move(config)),
      persona_pool_(std::move(persona_pool)) {
    validate_bounds(config_);
}

std::string Synthesizer::generate(const StageConfig& stage, const std::string& stage_tag,
                                  const std::string& prompt) {
    ChatRequest request;
    request.endpoint_id = stage.endpoint_id;
    request.stage = stage_tag;
    request.user = prompt;
    request.temperature = stage.temperature;
    request.max_tokens = stage.max_tokens;
    const ChatExchange exchange = gateway_.chat(request);
    const std::string text = trim(exchange.final_text);
    if (text.empty()) {
        throw Error("EmptyGeneration", "stage " + stage_tag + " returned blank output");
    }
    return text;
}

Persona Synthesizer::ground_persona(const Query& seed_query,
                                    const std::vector<Persona>& persona_samples) {
    std::string examples;
    for (std::size_t i = 0; i < persona_samples.size(); ++i) {
        if (i > 0) examples += "\n";
        examples += "- " + persona_samples[i].description;
    }
    const std::string prompt = prompts_.get(config_.persona.prompt_id)
                                   .render({{"[FILL_QUERY_HERE]", seed_query.text},
                                            {"[FILL_EXAMPLES_HERE]", examples}});
    Persona persona;
    persona.id = seed_query.id + "-persona";
    persona.description = generate(config_.persona, "persona", prompt);
    return persona;
}

Query Synthesizer::expand_daily(const Query& seed_query, const Persona& persona) {
    const std::string prompt = prompts_.get(config_.daily.prompt_id)
                                   .render({{"[FILL_QUERY_HERE]", seed_query.text},
                                            {"[FILL_PERSONA_HERE]", persona.description}});
    const std::string text = generate(config_.daily, "daily", prompt);

    nlohmann::json j = nlohmann::json::parse(strip_json_fence(text), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw Error("JsonShapeError", "daily expansion is not a JSON object: " + text.substr(0, 80));
    }
    if (!j.contains("query") || !j["query"].is_string() || !j.contains("scenario") ||
        !j["scenario"].is_string()) {
        throw Error("JsonShapeError", "daily expansion must carry string keys query and scenario");
    }
    Query out;
    out.id = seed_query.id + "-daily";
    out.text = j["query"].get<std::string>();
    out.scenario = j["scenario"].get<std::string>();
    out.kind = QueryKind::daily;
    out.persona_id = persona.id;
    if (out.text.empty()) {
        throw Error("EmptyGeneration", "daily expansion produced an empty query");
    }
    return out;
}

Query Synthesizer::expand_expert(const Query& seed_query) {
    const std::string prompt = prompts_.get(config_.expert.prompt_id)
                                   .render({{"[FILL_QUERY_HERE]", seed_query.text}});
    Query out;
    out.id = seed_query.id + "-expert";
    out.text = generate(config_.expert, "expert", prompt);
    out.kind = QueryKind::expert;
    return out;
}

std::string Synthesizer::solve_cot(const Query& query) {
    const std::string prompt =
        prompts_.get(config_.solve.prompt_id).render({{"[FILL_QUERY_HERE]", query.text}});
    std::string solution = generate(config_.solve, "solve", prompt);
    for (int retry = 0; static_cast<int>(solution.size()) < config_.solution_min_chars; ++retry) {
        if (retry >= config_.solve.retry_cap) {
            throw Error("DegenerateGeneration",
                        "solution stayed under " + std::to_string(config_.solution_min_chars) +
                            " chars after retry: " + solution.substr(0, 80));
        }
        solution = generate(config_.solve, "solve", prompt);
    }
    return solution;
}

std::vector<MaterialDesc> Synthesizer::numbered_descs(const StageConfig& stage,
                                                      const std::string& stage_tag,
                                                      const std::string& prompt, Polarity polarity,
                                                      int min, int max) {
    std::vector<std::string> entries;
    for (int attempt = 0;; ++attempt) {
        try {
            entries = parse_numbered_list(generate(stage, stage_tag, prompt));
            const int count = static_cast<int>(entries.size());
            if (count < min || count > max) {
                throw Error("RangeViolation", stage_tag + " produced " + std::to_string(count) +
                                                  " descriptions, wanted [" + std::to_string(min) +
                                                  ", " + std::to_string(max) + "]");
            }
            break;
        } catch (const Error& e) {
            if (attempt >= stage.retry_cap ||
                (e.kind() != "RangeViolation" && e.kind() != "ParseError")) {
                throw;
            }
        }
    }

    std::vector<MaterialDesc> descs;
    descs.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        descs.push_back(MaterialDesc{static_cast<int>(i + 1), entries[i], polarity});
    }
    return descs;
}

std::vector<MaterialDesc> Synthesizer::extract_materials(const std::string& solution) {
    if (trim(solution).empty()) {
        throw PreconditionError("ConfigError", "extract_materials needs a non-empty solution");
    }
    const std::string prompt =
        prompts_.get(config_.extract.prompt_id).render({{"[FILL_PASSAGE_HERE]", solution}});
    return numbered_descs(config_.extract, "extract", prompt, Polarity::positive,
                          config_.materials_min, config_.materials_max);
}

std::vector<MaterialDesc> Synthesizer::gen_negative_descs(
    const Query& query, const std::vector<MaterialDesc>& positive_descs) {
    if (positive_descs.empty()) {
        throw PreconditionError("ConfigError", "gen_negative_descs needs positive descriptions");
    }
    std::string positives;
    for (const MaterialDesc& desc : positive_descs) {
        positives += "\n" + std::to_string(desc.index) + ". " + desc.text;
    }
    const std::string prompt =
        prompts_.get(config_.negative.prompt_id)
            .render({{"[FILL_QUERY_HERE]", query.text},
                     {"[POSITIVE_PASSAGE_DESCRIPTIONS_HERE]", positives}});
    return numbered_descs(config_.negative, "negative", prompt, Polarity::negative,
                          config_.negatives_min, config_.negatives_max);
}

Passage Synthesizer::gen_passage(const MaterialDesc& desc, const std::string& passage_id) {
    const std::string prompt =
        prompts_.get(config_.passage.prompt_id).render({{"[FILL_MATERIAL_DESCRIPTION]", desc.text}});
    Passage passage;
    passage.id = passage_id;
    passage.text = generate(config_.passage, "passage", prompt);
    passage.role = desc.polarity == Polarity::positive ? PassageRole::positive
                                                       : PassageRole::hard_negative;
    passage.material_desc = desc.text;
    return passage;
}

SynthesisResult Synthesizer::synthesize(const std::vector<Query>& seed_queries,
                                        std::uint64_t seed) {
    if (persona_pool_.empty()) {
        throw PreconditionError("ConfigError", "persona pool is empty");
    }
    Rng rng(seed);
    SynthesisResult result;

    for (const Query& seed_query : seed_queries) {
        // Persona samples are drawn even when a seed later fails so that RNG
        // consumption, and hence every later seed's samples, stays stable.
        const std::size_t want =
            std::min<std::size_t>(persona_pool_.size(), static_cast<std::size_t>(config_.persona_samples));
        std::vector<Persona> samples;
        for (const std::size_t idx : rng.sample_indices(persona_pool_.size(), want)) {
            samples.push_back(persona_pool_[idx]);
        }

        std::string stage_tag = "persona";
        try {
            const Persona persona = ground_persona(seed_query, samples);
            stage_tag = "daily";
            const Query daily = expand_daily(seed_query, persona);
            stage_tag = "expert";
            const Query expert = expand_expert(seed_query);

            std::vector<LabeledPair> seed_pairs;
            for (const Query& expansion : {daily, expert}) {
                stage_tag = "solve";
                const std::string solution = solve_cot(expansion);
                stage_tag = "extract";
                const auto positives = extract_materials(solution);
                stage_tag = "negative";
                const auto negatives = gen_negative_descs(expansion, positives);

                stage_tag = "passage";
                for (const MaterialDesc& desc : positives) {
                    const std::string pid = expansion.id + "-pos-" + std::to_string(desc.index);
                    seed_pairs.push_back(
                        make_pair(expansion, gen_passage(desc, pid), PairSource::synthesized));
                }
                for (const MaterialDesc& desc : negatives) {
                    const std::string pid = expansion.id + "-neg-" + std::to_string(desc.index);
                    seed_pairs.push_back(
                        make_pair(expansion, gen_passage(desc, pid), PairSource::synthesized));
                }
            }
            // Commit only complete seeds; partial fan-outs are discarded.
            for (LabeledPair& pair : seed_pairs) result.pairs.push_back(std::move(pair));
        } catch (const Error& e) {
            result.failures.push_back(SeedFailure{seed_query.id, stage_tag, e.what()});
        }
    }
    return result;
}

}  // namespace rankforge
