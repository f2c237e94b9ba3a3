#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rankforge/corpus.hpp"
#include "rankforge/prompts.hpp"

namespace rankforge {

struct MixSpec {
    int seed_pool_count = 14000;
    int synth_count = 6000;
    bool balance = true;
    std::uint64_t rng_seed = 0;
};

/// Trainer hand-off values; the toolkit emits them, training runs elsewhere.
struct TrainManifest {
    int lora_rank = 32;
    int lora_alpha = 64;
    double learning_rate = 6e-5;
    int batch_size = 128;
    int epochs = 5;
    std::string base_model = "Qwen2.5-7B";
    std::string dataset_path;
};

/// Flat key=value file, one key per line.
void write_manifest(const TrainManifest& manifest, const std::filesystem::path& path);

enum class AblationVariant { full, daily_only, expert_only, short_trace, long_trace };

AblationVariant ablation_variant_from_string(const std::string& s);
std::string to_string(AblationVariant variant);

/// Downsamples the majority label (seeded, uniform) to the minority size.
/// When one class is empty the input is returned unchanged (degenerate,
/// flagged through the optional warning sink).
std::vector<LabeledPair> balance(std::vector<LabeledPair> pairs, std::uint64_t rng_seed,
                                 std::string* warning = nullptr);

/// Per-pool balance, stratified seeded sampling of the requested counts,
/// concatenation, then a seeded shuffle. Exact duplicates (same query and
/// passage text) are dropped up front. Throws PoolTooSmall when a pool
/// cannot supply its count.
std::vector<LabeledPair> build_training_set(const std::vector<LabeledPair>& seed_pool,
                                            const std::vector<LabeledPair>& synth_pool,
                                            const MixSpec& spec, std::string* warning = nullptr);

/// JSONL chat records: user = filled judge prompt, assistant = optional
/// <think> trace followed by "true"/"false". With require_traces, a pair
/// without a trace raises MissingTrace.
void emit_sft_records(const std::vector<LabeledPair>& pairs, const std::filesystem::path& path,
                      const PromptLibrary& prompts, bool require_traces = false);

/// Whitespace-token count, the unit of the short/long trace split.
std::size_t trace_token_count(const std::string& trace);

/// Filters the synthesized part of the pool; seed-pool pairs always pass.
/// daily_only / expert_only select by query kind; short/long_trace split
/// synthesized pairs at the median trace token count (short: <= median).
std::vector<LabeledPair> ablation_split(const std::vector<LabeledPair>& pairs,
                                        AblationVariant variant);

}  // namespace rankforge
