#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rankforge/corpus.hpp"

namespace rankforge {

struct Bm25Params {
    double k1 = 1.5;
    double b = 0.75;
};

/// Lowercases ASCII, splits on any non-alphanumeric byte, drops empties.
/// Bytes >= 0x80 (UTF-8 continuation and lead bytes) are kept as word
/// characters so non-ASCII words survive intact. No stemming, no stopwords.
std::vector<std::string> tokenize(std::string_view text);

struct Posting {
    std::uint32_t doc = 0;  // index into the doc table
    std::uint32_t tf = 0;
};

/// Immutable BM25 inverted index. Scoring uses the Lucene-style idf
///   idf(t) = ln((N - df + 0.5) / (df + 0.5) + 1)
/// which keeps every score non-negative, and the usual saturation
///   tf * (k1 + 1) / (tf + k1 * (1 - b + b * |d| / avgdl)).
class InvertedIndex {
public:
    static InvertedIndex build(const std::vector<Passage>& corpus, Bm25Params params = {});

    /// Sum of per-term scores over *unique* query terms; terms absent from
    /// the doc contribute 0. Throws UnknownDoc for a foreign doc_id.
    double score(const std::vector<std::string>& query_terms, const std::string& doc_id) const;

    /// Top-k docs by score, ties broken by ascending doc_id. Docs matching
    /// no query term fill the tail (score 0) when k exceeds the match count.
    Ranking retrieve(const Query& query, int k = 100, const std::string& tag = "bm25") const;

    std::size_t doc_count() const { return doc_ids_.size(); }
    double avg_doc_len() const { return avgdl_; }
    std::uint32_t doc_freq(const std::string& term) const;
    const Bm25Params& params() const { return params_; }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }

    /// Single-file binary format, versioned header.
    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(const std::filesystem::path& path);

private:
    InvertedIndex() = default;

    double idf(std::uint32_t df) const;
    double term_doc_score(std::uint32_t tf, std::uint32_t doc) const;

    Bm25Params params_;
    std::vector<std::string> doc_ids_;          // insertion order
    std::vector<std::uint32_t> doc_len_;        // tokens per doc
    double avgdl_ = 0.0;
    std::map<std::string, std::vector<Posting>> postings_;  // term -> postings, doc_id-ordered
    std::map<std::string, std::uint32_t> doc_index_;
};

}  // namespace rankforge
