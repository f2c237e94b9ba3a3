#include "rankforge/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <unordered_map>

namespace rankforge {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> terms;
    std::string current;
    for (const char c : text) {
        const auto uc = static_cast<unsigned char>(c);
        const bool word_char = (uc >= 'a' && uc <= 'z') || (uc >= 'A' && uc <= 'Z') ||
                               (uc >= '0' && uc <= '9') || uc >= 0x80;
        if (word_char) {
            current.push_back(uc >= 'A' && uc <= 'Z' ? static_cast<char>(uc - 'A' + 'a') : c);
        } else if (!current.empty()) {
            terms.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) terms.push_back(std::move(current));
    return terms;
}

InvertedIndex InvertedIndex::build(const std::vector<Passage>& corpus, Bm25Params params) {
    if (corpus.empty()) {
        throw PreconditionError("EmptyCorpus", "refusing to build an index over zero docs");
    }
    InvertedIndex index;
    index.params_ = params;

    for (const Passage& doc : corpus) {
        const auto doc_no = static_cast<std::uint32_t>(index.doc_ids_.size());
        auto [_, inserted] = index.doc_index_.emplace(doc.id, doc_no);
        if (!inserted) {
            throw PreconditionError("DuplicateDocId", "doc id \"" + doc.id + "\" appears twice");
        }
        index.doc_ids_.push_back(doc.id);

        const auto terms = tokenize(doc.text);
        index.doc_len_.push_back(static_cast<std::uint32_t>(terms.size()));

        std::unordered_map<std::string, std::uint32_t> tf;
        for (const std::string& t : terms) ++tf[t];
        for (const auto& [term, freq] : tf) {
            index.postings_[term].push_back(Posting{doc_no, freq});
        }
    }

    std::uint64_t total_len = 0;
    for (const std::uint32_t len : index.doc_len_) total_len += len;
    index.avgdl_ = static_cast<double>(total_len) / static_cast<double>(index.doc_ids_.size());

    // Postings sorted by doc_id string, the same order ties resolve to.
    for (auto& [_, list] : index.postings_) {
        std::sort(list.begin(), list.end(), [&](const Posting& a, const Posting& b) {
            return index.doc_ids_[a.doc] < index.doc_ids_[b.doc];
        });
    }
    return index;
}

double InvertedIndex::idf(std::uint32_t df) const {
    const double n = static_cast<double>(doc_count());
    return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

double InvertedIndex::term_doc_score(std::uint32_t tf, std::uint32_t doc) const {
    const double norm =
        params_.k1 * (1.0 - params_.b + params_.b * doc_len_[doc] / avgdl_);
    return tf * (params_.k1 + 1.0) / (tf + norm);
}

std::uint32_t InvertedIndex::doc_freq(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
}

double InvertedIndex::score(const std::vector<std::string>& query_terms,
                            const std::string& doc_id) const {
    auto doc_it = doc_index_.find(doc_id);
    if (doc_it == doc_index_.end()) {
        throw Error("UnknownDoc", "no doc with id \"" + doc_id + "\" in the index");
    }
    const std::uint32_t doc = doc_it->second;

    const std::set<std::string> unique_terms(query_terms.begin(), query_terms.end());
    double total = 0.0;
    for (const std::string& term : unique_terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        for (const Posting& p : it->second) {
            if (p.doc == doc) {
                total += idf(static_cast<std::uint32_t>(it->second.size())) *
                         term_doc_score(p.tf, p.doc);
                break;
            }
        }
    }
    return total;
}

Ranking InvertedIndex::retrieve(const Query& query, int k, const std::string& tag) const {
    if (k < 1) {
        throw PreconditionError("ConfigError", "retrieve needs k >= 1, got " + std::to_string(k));
    }
    const auto terms = tokenize(query.text);
    const std::set<std::string> unique_terms(terms.begin(), terms.end());

    // Term-at-a-time accumulation over postings; only matching docs surface.
    std::unordered_map<std::uint32_t, double> accum;
    for (const std::string& term : unique_terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const double term_idf = idf(static_cast<std::uint32_t>(it->second.size()));
        for (const Posting& p : it->second) {
            accum[p.doc] += term_idf * term_doc_score(p.tf, p.doc);
        }
    }

    std::vector<RankedEntry> matched;
    matched.reserve(accum.size());
    for (const auto& [doc, score] : accum) {
        matched.push_back(RankedEntry{doc_ids_[doc], score});
    }
    std::sort(matched.begin(), matched.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });

    const auto want = static_cast<std::size_t>(k);
    if (matched.size() > want) {
        matched.resize(want);
    } else if (matched.size() < want && matched.size() < doc_count()) {
        // Zero-score tail: every unmatched doc scores 0, ordered by doc_id.
        std::set<std::string> used;
        for (const RankedEntry& e : matched) used.insert(e.doc_id);
        for (const auto& [doc_id, _] : doc_index_) {
            if (matched.size() >= want) break;
            if (!used.contains(doc_id)) matched.push_back(RankedEntry{doc_id, 0.0});
        }
    }
    return Ranking::from_ordered(query.id, std::move(matched), tag);
}

namespace {

constexpr char kMagic[8] = {'R', 'F', 'I', 'D', 'X', '\0', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
}

void put_string(std::ofstream& out, const std::string& s) {
    put(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::ifstream& in) {
    const auto len = get<std::uint32_t>(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    return s;
}

}  // namespace

void InvertedIndex::save(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PreconditionError("FileNotFound", "cannot write " + path.string());

    out.write(kMagic, sizeof(kMagic));
    put(out, kVersion);
    put(out, params_.k1);
    put(out, params_.b);
    put(out, static_cast<std::uint64_t>(doc_ids_.size()));
    put(out, avgdl_);
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        put_string(out, doc_ids_[i]);
        put(out, doc_len_[i]);
    }
    put(out, static_cast<std::uint64_t>(postings_.size()));
    for (const auto& [term, list] : postings_) {
        put_string(out, term);
        put(out, static_cast<std::uint32_t>(list.size()));
        for (const Posting& p : list) {
            put(out, p.doc);
            put(out, p.tf);
        }
    }
    if (!out) throw Error("IndexFormat", "short write to " + path.string());
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("FileNotFound", "cannot open " + path.string());

    char magic[8] = {};
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw PreconditionError("IndexFormat", path.string() + " is not an index file");
    }
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion) {
        throw PreconditionError("IndexFormat", "unsupported index version " + std::to_string(version));
    }

    InvertedIndex index;
    index.params_.k1 = get<double>(in);
    index.params_.b = get<double>(in);
    const auto n_docs = get<std::uint64_t>(in);
    index.avgdl_ = get<double>(in);
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        std::string id = get_string(in);
        index.doc_index_.emplace(id, static_cast<std::uint32_t>(i));
        index.doc_ids_.push_back(std::move(id));
        index.doc_len_.push_back(get<std::uint32_t>(in));
    }
    const auto n_terms = get<std::uint64_t>(in);
    for (std::uint64_t i = 0; i < n_terms; ++i) {
        std::string term = get_string(in);
        const auto n_postings = get<std::uint32_t>(in);
        std::vector<Posting> list(n_postings);
        for (auto& p : list) {
            p.doc = get<std::uint32_t>(in);
            p.tf = get<std::uint32_t>(in);
        }
        index.postings_.emplace(std::move(term), std::move(list));
    }
    if (!in) throw PreconditionError("IndexFormat", "truncated index file " + path.string());
    return index;
}

}  // namespace rankforge
