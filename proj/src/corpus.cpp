#include "rankforge/corpus.hpp"

#include <algorithm>

namespace rankforge {

std::string to_string(QueryKind kind) {
    switch (kind) {
        case QueryKind::seed: return "seed";
        case QueryKind::daily: return "daily";
        case QueryKind::expert: return "expert";
    }
    return "seed";
}

QueryKind query_kind_from_string(const std::string& s) {
    if (s == "seed") return QueryKind::seed;
    if (s == "daily") return QueryKind::daily;
    if (s == "expert") return QueryKind::expert;
    throw PreconditionError("MalformedLine", "unknown query kind \"" + s + "\"");
}

std::string to_string(PassageRole role) {
    return role == PassageRole::positive ? "positive" : "hard_negative";
}

PassageRole passage_role_from_string(const std::string& s) {
    if (s == "positive") return PassageRole::positive;
    if (s == "hard_negative") return PassageRole::hard_negative;
    throw PreconditionError("MalformedLine", "unknown passage role \"" + s + "\"");
}

std::string to_string(PairSource source) {
    return source == PairSource::seed_pool ? "seed_pool" : "synthesized";
}

PairSource pair_source_from_string(const std::string& s) {
    if (s == "seed_pool") return PairSource::seed_pool;
    if (s == "synthesized") return PairSource::synthesized;
    throw PreconditionError("MalformedLine", "unknown pair source \"" + s + "\"");
}

LabeledPair make_pair(Query query, Passage passage, PairSource source) {
    LabeledPair pair;
    pair.intended_label = passage.role == PassageRole::positive;
    pair.query = std::move(query);
    pair.passage = std::move(passage);
    pair.source = source;
    return pair;
}

void validate_question(const McQuestion& q) {
    if (q.options.size() < 2 || q.options.size() > 8) {
        throw PreconditionError("MalformedLine", "question " + q.id + " must have 2-8 options, has " +
                                                     std::to_string(q.options.size()));
    }
    bool gold_seen = false;
    for (std::size_t i = 0; i < q.options.size(); ++i) {
        if (q.options[i].first == q.gold) gold_seen = true;
        for (std::size_t j = i + 1; j < q.options.size(); ++j) {
            if (q.options[i].first == q.options[j].first) {
                throw PreconditionError("MalformedLine", "question " + q.id + " repeats option letter " +
                                                             std::string(1, q.options[i].first));
            }
        }
    }
    if (!gold_seen) {
        throw PreconditionError("MalformedLine", "question " + q.id + " gold letter " +
                                                     std::string(1, q.gold) + " is not an option");
    }
}

void QRels::add(const std::string& query_id, const std::string& doc_id, int grade) {
    if (grade < 0) {
        throw PreconditionError("MalformedLine", "negative grade for (" + query_id + ", " + doc_id + ")");
    }
    auto& docs = by_query_[query_id];
    if (docs.contains(doc_id)) {
        throw PreconditionError("DuplicateJudgment", "(" + query_id + ", " + doc_id + ") judged twice");
    }
    docs.emplace(doc_id, grade);
}

int QRels::grade(const std::string& query_id, const std::string& doc_id) const {
    auto q = by_query_.find(query_id);
    if (q == by_query_.end()) return 0;
    auto d = q->second.find(doc_id);
    return d == q->second.end() ? 0 : d->second;
}

const std::map<std::string, int>& QRels::judged(const std::string& query_id) const {
    static const std::map<std::string, int> empty;
    auto q = by_query_.find(query_id);
    return q == by_query_.end() ? empty : q->second;
}

std::vector<std::string> QRels::relevant_docs(const std::string& query_id) const {
    std::vector<std::string> out;
    for (const auto& [doc_id, grade] : judged(query_id)) {
        if (grade > 0) out.push_back(doc_id);
    }
    return out;
}

std::size_t QRels::size() const {
    std::size_t n = 0;
    for (const auto& [_, docs] : by_query_) n += docs.size();
    return n;
}

namespace {

void check_unique_docs(const std::string& query_id, const std::vector<RankedEntry>& entries) {
    std::vector<std::string> ids;
    ids.reserve(entries.size());
    for (const auto& e : entries) ids.push_back(e.doc_id);
    std::sort(ids.begin(), ids.end());
    auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end()) {
        throw PreconditionError("DuplicateDoc", *dup + " listed twice under " + query_id);
    }
}

}  // namespace

Ranking Ranking::from_scores(std::string query_id, std::vector<RankedEntry> entries,
                             std::string tag) {
    check_unique_docs(query_id, entries);
    std::sort(entries.begin(), entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    Ranking r;
    r.query_id_ = std::move(query_id);
    r.entries_ = std::move(entries);
    r.tag_ = std::move(tag);
    return r;
}

Ranking Ranking::from_ordered(std::string query_id, std::vector<RankedEntry> entries,
                              std::string tag) {
    check_unique_docs(query_id, entries);
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].score > entries[i - 1].score) {
            throw PreconditionError("NonMonotoneScore",
                                    query_id + ": score rises at rank " + std::to_string(i + 1));
        }
    }
    Ranking r;
    r.query_id_ = std::move(query_id);
    r.entries_ = std::move(entries);
    r.tag_ = std::move(tag);
    return r;
}

std::optional<std::size_t> Ranking::rank_of(const std::string& doc_id) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].doc_id == doc_id) return i + 1;
    }
    return std::nullopt;
}

DocStore::DocStore(std::vector<Passage> docs) : docs_(std::move(docs)) {
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        auto [_, inserted] = index_.emplace(docs_[i].id, i);
        if (!inserted) {
            throw PreconditionError("DuplicateDocId", "doc id \"" + docs_[i].id + "\" appears twice");
        }
    }
}

const Passage& DocStore::get(const std::string& doc_id) const {
    auto it = index_.find(doc_id);
    if (it == index_.end()) throw Error("UnknownDoc", "no doc with id \"" + doc_id + "\"");
    return docs_[it->second];
}

bool DocStore::contains(const std::string& doc_id) const { return index_.contains(doc_id); }

}  // namespace rankforge
