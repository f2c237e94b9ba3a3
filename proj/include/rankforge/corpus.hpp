#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rankforge/errors.hpp"

namespace rankforge {

enum class QueryKind { seed, daily, expert };

std::string to_string(QueryKind kind);
QueryKind query_kind_from_string(const std::string& s);

struct Query {
    std::string id;
    std::string text;
    std::optional<std::string> scenario;  // present iff kind == daily
    QueryKind kind = QueryKind::seed;
    std::optional<std::string> persona_id;
};

enum class PassageRole { positive, hard_negative };

std::string to_string(PassageRole role);
PassageRole passage_role_from_string(const std::string& s);

struct Passage {
    std::string id;
    std::string text;
    PassageRole role = PassageRole::positive;
    std::optional<std::string> material_desc;  // the description it was generated from
};

enum class PairSource { seed_pool, synthesized };

std::string to_string(PairSource source);
PairSource pair_source_from_string(const std::string& s);

/// One (query, passage) training example. Positive passages always carry
/// intended_label = true, hard negatives false; make_pair enforces this.
struct LabeledPair {
    Query query;
    Passage passage;
    bool intended_label = true;
    PairSource source = PairSource::synthesized;
    std::optional<std::string> reasoning_trace;
    std::optional<bool> judge_verdict;

    std::string pair_id() const { return query.id + "::" + passage.id; }
};

LabeledPair make_pair(Query query, Passage passage, PairSource source);

struct Persona {
    std::string id;
    std::string description;
};

struct McQuestion {
    std::string id;
    std::string stem;
    std::vector<std::pair<char, std::string>> options;  // (letter, text), ordered
    char gold = 'A';
};

/// Validates 2-8 options, letters unique, gold among them.
void validate_question(const McQuestion& q);

struct SftMessage {
    std::string role;
    std::string content;
};

struct SftRecord {
    std::vector<SftMessage> messages;
};

/// Graded relevance judgments keyed by (query_id, doc_id). Absent keys read
/// as grade 0.
class QRels {
public:
    /// Throws DuplicateJudgment if the key is already present, grades must be >= 0.
    void add(const std::string& query_id, const std::string& doc_id, int grade);

    int grade(const std::string& query_id, const std::string& doc_id) const;
    bool is_relevant(const std::string& query_id, const std::string& doc_id) const {
        return grade(query_id, doc_id) > 0;
    }

    /// Judged docs for one query, empty map when the query is unknown.
    const std::map<std::string, int>& judged(const std::string& query_id) const;

    /// Doc ids with grade > 0 for one query, in ascending doc_id order.
    std::vector<std::string> relevant_docs(const std::string& query_id) const;

    const std::map<std::string, std::map<std::string, int>>& by_query() const { return by_query_; }
    std::size_t size() const;

private:
    std::map<std::string, std::map<std::string, int>> by_query_;
};

struct RankedEntry {
    std::string doc_id;
    double score = 0.0;
};

/// An ordered candidate list for one query. Entries are kept in
/// non-increasing score order; doc ids are unique. Two ways in:
///   from_scores  — sorts by (score desc, doc_id asc); used by retrieval.
///   from_ordered — preserves the caller's order after validating it; used
///                  by the reranker (ties keep retrieval order) and by the
///                  run-file parser.
class Ranking {
public:
    static Ranking from_scores(std::string query_id, std::vector<RankedEntry> entries,
                               std::string tag);
    static Ranking from_ordered(std::string query_id, std::vector<RankedEntry> entries,
                                std::string tag);

    const std::string& query_id() const { return query_id_; }
    const std::string& tag() const { return tag_; }
    const std::vector<RankedEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// 1-based rank of a doc, nullopt when absent.
    std::optional<std::size_t> rank_of(const std::string& doc_id) const;

private:
    Ranking() = default;
    std::string query_id_;
    std::vector<RankedEntry> entries_;
    std::string tag_;
};

/// Immutable corpus lookup: id -> Passage. Built once, then shared.
class DocStore {
public:
    explicit DocStore(std::vector<Passage> docs);

    const Passage& get(const std::string& doc_id) const;  // throws UnknownDoc
    bool contains(const std::string& doc_id) const;
    const std::vector<Passage>& docs() const { return docs_; }
    std::size_t size() const { return docs_.size(); }

private:
    std::vector<Passage> docs_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace rankforge
