#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rankforge/corpus.hpp"
#include "rankforge/gateway.hpp"
#include "rankforge/prompts.hpp"
#include "rankforge/synthesizer.hpp"

namespace rankforge {

struct JudgeVerdict {
    std::string pair_id;
    std::optional<std::string> trace;
    std::optional<bool> label;  // nullopt: no verdict token found
    std::string raw_text;
};

struct FilterReport {
    int total = 0;
    int kept = 0;
    int dropped_mismatch = 0;
    int dropped_unparseable = 0;
    double retention = 0.0;  // kept / total, 0 when total == 0
};

/// Case-insensitive scan for standalone "true"/"false" tokens; the LAST
/// occurrence wins (reasoning often weighs both before concluding).
/// Throws NoVerdict when neither token occurs.
bool parse_verdict(const std::string& final_text);

/// Relevance judging through the shared judge prompt.
class Judge {
public:
    Judge(Gateway& gateway, const PromptLibrary& prompts, StageConfig stage);

    JudgeVerdict judge(const LabeledPair& pair);
    std::vector<JudgeVerdict> judge_all(const std::vector<LabeledPair>& pairs);

private:
    Gateway& gateway_;
    const PromptLibrary& prompts_;
    StageConfig stage_;
};

/// Keeps pairs whose verdict matches the intended label; kept pairs carry
/// the verdict and the judge's reasoning trace. Order is preserved.
/// Verdicts must align 1:1 with pairs by pair_id (AlignmentError otherwise).
std::pair<std::vector<LabeledPair>, FilterReport> filter_pairs(
    const std::vector<LabeledPair>& pairs, const std::vector<JudgeVerdict>& verdicts);

}  // namespace rankforge
