#include "rankforge/judge.hpp"

#include <cctype>

namespace rankforge {

namespace {

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

/// Last standalone, case-insensitive occurrence of `word` in `text`.
bool contains_standalone(const std::string& text, const std::string& word, std::size_t& last_pos) {
    bool found = false;
    for (std::size_t i = 0; i + word.size() <= text.size(); ++i) {
        bool match = true;
        for (std::size_t j = 0; j < word.size(); ++j) {
            if (std::tolower(static_cast<unsigned char>(text[i + j])) != word[j]) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        const bool left_ok = i == 0 || !word_char(text[i - 1]);
        const bool right_ok = i + word.size() == text.size() || !word_char(text[i + word.size()]);
        if (left_ok && right_ok) {
            last_pos = i;
            found = true;
        }
    }
    return found;
}

}  // namespace

bool parse_verdict(const std::string& final_text) {
    std::size_t true_pos = 0;
    std::size_t false_pos = 0;
    const bool has_true = contains_standalone(final_text, "true", true_pos);
    const bool has_false = contains_standalone(final_text, "false", false_pos);
    if (!has_true && !has_false) {
        throw Error("NoVerdict", "neither token in: " + final_text.substr(0, 80));
    }
    if (has_true && has_false) return true_pos > false_pos;
    return has_true;
}

Judge::Judge(Gateway& gateway, const PromptLibrary& prompts, StageConfig stage)
    : gateway_(gateway), prompts_(prompts), stage_(std::move(stage)) {}

JudgeVerdict Judge::judge(const LabeledPair& pair) {
    ChatRequest request;
    request.endpoint_id = stage_.endpoint_id;
    request.stage = "judge";
    request.user = prompts_.get(stage_.prompt_id)
                       .render({{"[FILL_QUERY_HERE]", pair.query.text},
                                {"[FILL_PASSAGE_HERE]", pair.passage.text}});
    request.temperature = stage_.temperature;
    request.max_tokens = stage_.max_tokens;

    const ChatExchange exchange = gateway_.chat(request);
    JudgeVerdict verdict;
    verdict.pair_id = pair.pair_id();
    verdict.trace = exchange.reasoning_trace;
    verdict.raw_text = exchange.raw_text;
    try {
        verdict.label = parse_verdict(exchange.final_text);
    } catch (const Error& e) {
        if (e.kind() != "NoVerdict") throw;
        verdict.label = std::nullopt;  // unparseable, tallied by filter_pairs
    }
    return verdict;
}

std::vector<JudgeVerdict> Judge::judge_all(const std::vector<LabeledPair>& pairs) {
    std::vector<JudgeVerdict> verdicts;
    verdicts.reserve(pairs.size());
    for (const LabeledPair& pair : pairs) verdicts.push_back(judge(pair));
    return verdicts;
}

std::pair<std::vector<LabeledPair>, FilterReport> filter_pairs(
    const std::vector<LabeledPair>& pairs, const std::vector<JudgeVerdict>& verdicts) {
    if (pairs.size() != verdicts.size()) {
        throw Error("AlignmentError", std::to_string(pairs.size()) + " pairs vs " +
                                          std::to_string(verdicts.size()) + " verdicts");
    }
    std::vector<LabeledPair> kept;
    FilterReport report;
    report.total = static_cast<int>(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (verdicts[i].pair_id != pairs[i].pair_id()) {
            throw Error("AlignmentError", "verdict " + verdicts[i].pair_id +
                                              " does not match pair " + pairs[i].pair_id());
        }
        if (!verdicts[i].label.has_value()) {
            ++report.dropped_unparseable;
            continue;
        }
        if (*verdicts[i].label != pairs[i].intended_label) {
            ++report.dropped_mismatch;
            continue;
        }
        LabeledPair pair = pairs[i];
        pair.judge_verdict = verdicts[i].label;
        pair.reasoning_trace = verdicts[i].trace;
        kept.push_back(std::move(pair));
        ++report.kept;
    }
    report.retention = report.total == 0 ? 0.0
                                         : static_cast<double>(report.kept) /
                                               static_cast<double>(report.total);
    return {std::move(kept), report};
}

}  // namespace rankforge
