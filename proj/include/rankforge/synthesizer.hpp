#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankforge/corpus.hpp"
#include "rankforge/gateway.hpp"
#include "rankforge/prompts.hpp"

namespace rankforge {

enum class Polarity { positive, negative };

/// One extracted material description; index is the 1-based position in its
/// numbered list.
struct MaterialDesc {
    int index = 1;
    std::string text;
    Polarity polarity = Polarity::positive;
};

/// Per-stage model binding.
struct StageConfig {
    std::string endpoint_id;
    std::string prompt_id;
    double temperature = 0.7;
    int max_tokens = 2048;
    bool want_logprobs = false;
    int retry_cap = 1;  // one retry on degenerate / out-of-range generations
};

struct SynthesizerConfig {
    StageConfig persona;
    StageConfig daily;
    StageConfig expert;
    StageConfig solve;
    StageConfig extract;
    StageConfig negative;
    StageConfig passage;
    // Fan-out bounds; the prompts promise 3-7 materials and 1-5 negatives,
    // so configured bounds must stay within those ranges.
    int materials_min = 3;
    int materials_max = 7;
    int negatives_min = 1;
    int negatives_max = 5;
    int solution_min_chars = 50;
    int persona_samples = 3;
};

/// Throws ConfigError when bounds leave the ranges the prompts promise.
void validate_bounds(const SynthesizerConfig& config);

struct SeedFailure {
    std::string seed_query_id;
    std::string stage;
    std::string error;
};

struct SynthesisResult {
    std::vector<LabeledPair> pairs;
    std::vector<SeedFailure> failures;  // seeds skipped, with the failing stage
};

/// Numbered-list parser shared by the extraction stages: accepts "1." and
/// "1)" prefixes, requires indices contiguous from 1.
std::vector<std::string> parse_numbered_list(const std::string& text);

/// Bottom-up generation: persona grounding, daily/expert query expansion,
/// step-by-step solving, material extraction, hard-negative descriptions,
/// and passage generation.
class Synthesizer {
public:
    Synthesizer(Gateway& gateway, const PromptLibrary& prompts, SynthesizerConfig config,
                std::vector<Persona> persona_pool);

    Persona ground_persona(const Query& seed_query, const std::vector<Persona>& persona_samples);
    Query expand_daily(const Query& seed_query, const Persona& persona);
    Query expand_expert(const Query& seed_query);
    std::string solve_cot(const Query& query);
    std::vector<MaterialDesc> extract_materials(const std::string& solution);
    std::vector<MaterialDesc> gen_negative_descs(const Query& query,
                                                 const std::vector<MaterialDesc>& positive_descs);
    Passage gen_passage(const MaterialDesc& desc, const std::string& passage_id);

    /// Runs the full fan-out for every seed query. A failure in any stage
    /// skips that seed (tallied in the result), never the batch. Output
    /// order is (seed order, daily before expert, positives before
    /// negatives, material index).
    SynthesisResult synthesize(const std::vector<Query>& seed_queries, std::uint64_t seed);

    const std::vector<Persona>& persona_pool() const { return persona_pool_; }

private:
    std::string generate(const StageConfig& stage, const std::string& stage_tag,
                         const std::string& prompt);
    std::vector<MaterialDesc> numbered_descs(const StageConfig& stage, const std::string& stage_tag,
                                             const std::string& prompt, Polarity polarity, int min,
                                             int max);

    Gateway& gateway_;
    const PromptLibrary& prompts_;
    SynthesizerConfig config_;
    std::vector<Persona> persona_pool_;
};

}  // namespace rankforge
