#include "rankforge/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "rankforge/jsonl.hpp"
#include "rankforge/rng.hpp"

namespace rankforge {

namespace {

/// "6e-05" -> "6e-5": strips the zero padding snprintf puts in exponents.
std::string format_compact(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", value);
    std::string s(buf);
    const auto e = s.find('e');
    if (e != std::string::npos) {
        std::size_t digits = e + 1;
        if (digits < s.size() && (s[digits] == '+' || s[digits] == '-')) ++digits;
        std::size_t first_digit = digits;
        while (first_digit + 1 < s.size() && s[first_digit] == '0') ++first_digit;
        s.erase(digits, first_digit - digits);
        if (s[e + 1] == '+') s.erase(e + 1, 1);
    }
    return s;
}

std::vector<std::size_t> indices_with_label(const std::vector<LabeledPair>& pairs, bool label) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].intended_label == label) out.push_back(i);
    }
    return out;
}

/// Keeps `want` of the given positions (seeded, uniform, order-preserving).
std::vector<std::size_t> sample_positions(const std::vector<std::size_t>& positions,
                                          std::size_t want, Rng& rng) {
    std::vector<std::size_t> picked;
    for (const std::size_t idx : rng.sample_indices(positions.size(), want)) {
        picked.push_back(positions[idx]);
    }
    return picked;
}

}  // namespace

void write_manifest(const TrainManifest& manifest, const std::filesystem::path& path) {
    std::vector<std::string> lines{
        "lora_rank=" + std::to_string(manifest.lora_rank),
        "lora_alpha=" + std::to_string(manifest.lora_alpha),
        "learning_rate=" + format_compact(manifest.learning_rate),
        "batch_size=" + std::to_string(manifest.batch_size),
        "epochs=" + std::to_string(manifest.epochs),
        "base_model=" + manifest.base_model,
        "dataset_path=" + manifest.dataset_path,
    };
    detail::write_lines(path, lines);
}

AblationVariant ablation_variant_from_string(const std::string& s) {
    if (s == "full") return AblationVariant::full;
    if (s == "daily_only") return AblationVariant::daily_only;
    if (s == "expert_only") return AblationVariant::expert_only;
    if (s == "short_trace") return AblationVariant::short_trace;
    if (s == "long_trace") return AblationVariant::long_trace;
    throw PreconditionError("ConfigError", "unknown ablation variant \"" + s + "\"");
}

std::string to_string(AblationVariant variant) {
    switch (variant) {
        case AblationVariant::full: return "full";
        case AblationVariant::daily_only: return "daily_only";
        case AblationVariant::expert_only: return "expert_only";
        case AblationVariant::short_trace: return "short_trace";
        case AblationVariant::long_trace: return "long_trace";
    }
    return "full";
}

std::vector<LabeledPair> balance(std::vector<LabeledPair> pairs, std::uint64_t rng_seed,
                                 std::string* warning) {
    const auto trues = indices_with_label(pairs, true);
    const auto falses = indices_with_label(pairs, false);
    if (trues.empty() || falses.empty()) {
        if (!pairs.empty() && warning) {
            *warning = "one label class is empty (" + std::to_string(trues.size()) + " true, " +
                       std::to_string(falses.size()) + " false); returning input unchanged";
        }
        return pairs;
    }
    const std::size_t keep = std::min(trues.size(), falses.size());
    Rng rng(rng_seed);
    const auto& majority = trues.size() > falses.size() ? trues : falses;
    std::set<std::size_t> keep_majority;
    for (const std::size_t pos : sample_positions(majority, keep, rng)) keep_majority.insert(pos);

    std::vector<LabeledPair> out;
    out.reserve(2 * keep);
    const bool majority_label = trues.size() > falses.size();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].intended_label == majority_label && !keep_majority.contains(i)) continue;
        out.push_back(std::move(pairs[i]));
    }
    return out;
}

std::vector<LabeledPair> build_training_set(const std::vector<LabeledPair>& seed_pool,
                                            const std::vector<LabeledPair>& synth_pool,
                                            const MixSpec& spec, std::string* warning) {
    if (spec.seed_pool_count < 0 || spec.synth_count < 0) {
        throw PreconditionError("ConfigError", "mix counts must be >= 0");
    }

    // Exact-duplicate drop across both pools, first occurrence wins.
    std::set<std::string> seen;
    std::size_t dropped_dups = 0;
    auto dedup = [&](const std::vector<LabeledPair>& pool) {
        std::vector<LabeledPair> out;
        out.reserve(pool.size());
        for (const LabeledPair& pair : pool) {
            std::string key = pair.query.text + "\x1f" + pair.passage.text;
            if (!seen.insert(std::move(key)).second) {
                ++dropped_dups;
                continue;
            }
            out.push_back(pair);
        }
        return out;
    };
    const auto seed_clean = dedup(seed_pool);
    const auto synth_clean = dedup(synth_pool);
    if (dropped_dups > 0 && warning) {
        *warning = std::to_string(dropped_dups) + " exact-duplicate pairs dropped";
    }

    Rng rng(spec.rng_seed);
    std::vector<LabeledPair> mixed;
    mixed.reserve(static_cast<std::size_t>(spec.seed_pool_count + spec.synth_count));

    auto draw = [&](const std::vector<LabeledPair>& pool, int count, const char* name) {
        if (count == 0) return;
        const auto want = static_cast<std::size_t>(count);
        if (spec.balance) {
            const auto trues = indices_with_label(pool, true);
            const auto falses = indices_with_label(pool, false);
            // Stratified draw keeps |#true - #false| <= 1 in this pool's
            // contribution; the extra odd pick goes to the true side.
            const std::size_t want_true = want - want / 2;
            const std::size_t want_false = want / 2;
            if (trues.size() < want_true || falses.size() < want_false) {
                const std::size_t have = 2 * std::min(trues.size(), falses.size());
                throw PreconditionError("PoolTooSmall",
                                        std::string(name) + " pool holds " + std::to_string(have) +
                                            " balanced pairs, need " + std::to_string(want));
            }
            std::vector<std::size_t> picked = sample_positions(trues, want_true, rng);
            const auto picked_false = sample_positions(falses, want_false, rng);
            picked.insert(picked.end(), picked_false.begin(), picked_false.end());
            std::sort(picked.begin(), picked.end());
            for (const std::size_t pos : picked) mixed.push_back(pool[pos]);
        } else {
            if (pool.size() < want) {
                throw PreconditionError("PoolTooSmall", std::string(name) + " pool holds " +
                                                            std::to_string(pool.size()) +
                                                            " pairs, need " + std::to_string(want));
            }
            std::vector<std::size_t> all(pool.size());
            std::iota(all.begin(), all.end(), std::size_t{0});
            for (const std::size_t pos : sample_positions(all, want, rng)) {
                mixed.push_back(pool[pos]);
            }
        }
    };

    draw(seed_clean, spec.seed_pool_count, "seed_pool");
    draw(synth_clean, spec.synth_count, "synth");
    rng.shuffle(mixed);
    return mixed;
}

void emit_sft_records(const std::vector<LabeledPair>& pairs, const std::filesystem::path& path,
                      const PromptLibrary& prompts, bool require_traces) {
    const PromptTemplate& judge_prompt = prompts.get("judge");
    std::vector<SftRecord> records;
    records.reserve(pairs.size());
    for (const LabeledPair& pair : pairs) {
        if (require_traces && !pair.reasoning_trace) {
            throw Error("MissingTrace", "pair " + pair.pair_id() + " has no reasoning trace");
        }
        const bool label = pair.judge_verdict.value_or(pair.intended_label);
        std::string assistant;
        if (pair.reasoning_trace) {
            assistant = "<think>" + *pair.reasoning_trace + "</think>";
        }
        assistant += label ? "true" : "false";

        SftRecord record;
        record.messages.push_back(
            SftMessage{"user", judge_prompt.render({{"[FILL_QUERY_HERE]", pair.query.text},
                                                    {"[FILL_PASSAGE_HERE]", pair.passage.text}})});
        record.messages.push_back(SftMessage{"assistant", std::move(assistant)});
        records.push_back(std::move(record));
    }
    write_jsonl(records, path);
}

std::size_t trace_token_count(const std::string& trace) {
    std::istringstream in(trace);
    std::string token;
    std::size_t count = 0;
    while (in >> token) ++count;
    return count;
}

std::vector<LabeledPair> ablation_split(const std::vector<LabeledPair>& pairs,
                                        AblationVariant variant) {
    if (variant == AblationVariant::full) return pairs;

    double median = 0.0;
    if (variant == AblationVariant::short_trace || variant == AblationVariant::long_trace) {
        std::vector<std::size_t> lengths;
        for (const LabeledPair& pair : pairs) {
            if (pair.source != PairSource::synthesized) continue;
            lengths.push_back(pair.reasoning_trace ? trace_token_count(*pair.reasoning_trace) : 0);
        }
        if (!lengths.empty()) {
            std::sort(lengths.begin(), lengths.end());
            const std::size_t n = lengths.size();
            median = n % 2 == 1 ? static_cast<double>(lengths[n / 2])
                                : (static_cast<double>(lengths[n / 2 - 1]) +
                                   static_cast<double>(lengths[n / 2])) /
                                      2.0;
        }
    }

    std::vector<LabeledPair> out;
    for (const LabeledPair& pair : pairs) {
        if (pair.source != PairSource::synthesized) {
            out.push_back(pair);
            continue;
        }
        bool keep = false;
        switch (variant) {
            case AblationVariant::daily_only: keep = pair.query.kind == QueryKind::daily; break;
            case AblationVariant::expert_only: keep = pair.query.kind == QueryKind::expert; break;
            case AblationVariant::short_trace:
            case AblationVariant::long_trace: {
                const double len = static_cast<double>(
                    pair.reasoning_trace ? trace_token_count(*pair.reasoning_trace) : 0);
                keep = variant == AblationVariant::short_trace ? len <= median : len > median;
                break;
            }
            case AblationVariant::full: keep = true; break;
        }
        if (keep) out.push_back(pair);
    }
    return out;
}

}  // namespace rankforge
