#include "rankforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace rankforge {

namespace {

bool has_relevant(const QRels& qrels, const std::string& query_id) {
    for (const auto& [_, grade] : qrels.judged(query_id)) {
        if (grade > 0) return true;
    }
    return false;
}

double log2_discount(std::size_t rank) { return std::log2(static_cast<double>(rank) + 1.0); }

}  // namespace

double ndcg_at_k(const Ranking& ranking, const QRels& qrels, int k) {
    const auto& entries = ranking.entries();
    const std::size_t cutoff = std::min<std::size_t>(entries.size(), static_cast<std::size_t>(k));

    double dcg = 0.0;
    for (std::size_t i = 0; i < cutoff; ++i) {
        const int grade = qrels.grade(ranking.query_id(), entries[i].doc_id);
        if (grade > 0) dcg += grade / log2_discount(i + 1);
    }

    // Ideal gain: judged grades sorted descending, truncated at k.
    std::vector<int> grades;
    for (const auto& [_, grade] : qrels.judged(ranking.query_id())) {
        if (grade > 0) grades.push_back(grade);
    }
    std::sort(grades.rbegin(), grades.rend());
    double idcg = 0.0;
    for (std::size_t i = 0; i < grades.size() && i < static_cast<std::size_t>(k); ++i) {
        idcg += grades[i] / log2_discount(i + 1);
    }

    return idcg == 0.0 ? 0.0 : dcg / idcg;
}

double map_at_k(const Ranking& ranking, const QRels& qrels, int k) {
    const auto& entries = ranking.entries();
    const std::size_t cutoff = std::min<std::size_t>(entries.size(), static_cast<std::size_t>(k));

    std::size_t total_relevant = 0;
    for (const auto& [_, grade] : qrels.judged(ranking.query_id())) {
        if (grade > 0) ++total_relevant;
    }
    if (total_relevant == 0) return 0.0;

    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < cutoff; ++i) {
        if (qrels.is_relevant(ranking.query_id(), entries[i].doc_id)) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    const std::size_t denom = std::min<std::size_t>(total_relevant, static_cast<std::size_t>(k));
    return sum / static_cast<double>(denom);
}

double recall_at_k(const Ranking& ranking, const QRels& qrels, int k) {
    std::size_t total_relevant = 0;
    for (const auto& [_, grade] : qrels.judged(ranking.query_id())) {
        if (grade > 0) ++total_relevant;
    }
    if (total_relevant == 0) return 0.0;

    const auto& entries = ranking.entries();
    const std::size_t cutoff = std::min<std::size_t>(entries.size(), static_cast<std::size_t>(k));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < cutoff; ++i) {
        if (qrels.is_relevant(ranking.query_id(), entries[i].doc_id)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(total_relevant);
}

double mrr(const Ranking& ranking, const QRels& qrels) {
    const auto& entries = ranking.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (qrels.is_relevant(ranking.query_id(), entries[i].doc_id)) {
            return 1.0 / static_cast<double>(i + 1);
        }
    }
    return 0.0;
}

MetricReport evaluate(RankMetric metric, const std::vector<Ranking>& rankings, const QRels& qrels,
                      int k) {
    MetricReport report;
    report.k = k;
    std::function<double(const Ranking&)> score;
    switch (metric) {
        case RankMetric::ndcg:
            report.metric = "nDCG@" + std::to_string(k);
            score = [&](const Ranking& r) { return ndcg_at_k(r, qrels, k); };
            break;
        case RankMetric::map:
            report.metric = "MAP@" + std::to_string(k);
            score = [&](const Ranking& r) { return map_at_k(r, qrels, k); };
            break;
        case RankMetric::recall:
            report.metric = "Recall@" + std::to_string(k);
            score = [&](const Ranking& r) { return recall_at_k(r, qrels, k); };
            break;
        case RankMetric::mrr:
            report.metric = "MRR";
            report.k = 0;
            score = [&](const Ranking& r) { return mrr(r, qrels); };
            break;
    }

    double sum = 0.0;
    for (const Ranking& r : rankings) {
        if (!has_relevant(qrels, r.query_id())) {
            ++report.skipped;
            continue;
        }
        const double value = score(r);
        report.per_query.emplace(r.query_id(), value);
        sum += value;
        ++report.evaluated;
    }
    report.mean = report.evaluated == 0 ? 0.0 : sum / report.evaluated;
    return report;
}

double p_mrr_query(const Ranking& og, const Ranking& modified, const QRels& qrels) {
    const auto relevant = qrels.relevant_docs(og.query_id());
    if (relevant.empty()) return 0.0;

    double sum = 0.0;
    for (const std::string& doc_id : relevant) {
        const double r_og =
            static_cast<double>(og.rank_of(doc_id).value_or(og.size() + 1));
        const double r_new =
            static_cast<double>(modified.rank_of(doc_id).value_or(modified.size() + 1));
        sum += r_og > r_new ? (r_og / r_new - 1.0) : (1.0 - r_new / r_og);
    }
    return 100.0 * sum / static_cast<double>(relevant.size());
}

MetricReport p_mrr(const std::vector<Ranking>& og_run, const std::vector<Ranking>& new_run,
                   const QRels& qrels) {
    std::map<std::string, const Ranking*> modified;
    for (const Ranking& r : new_run) modified.emplace(r.query_id(), &r);

    MetricReport report;
    report.metric = "p-MRR";
    double sum = 0.0;
    for (const Ranking& og : og_run) {
        auto it = modified.find(og.query_id());
        if (it == modified.end()) {
            throw Error("MissingQuery", og.query_id() + " present only in the original run");
        }
        if (!has_relevant(qrels, og.query_id())) {
            ++report.skipped;
            modified.erase(it);
            continue;
        }
        const double value = p_mrr_query(og, *it->second, qrels);
        report.per_query.emplace(og.query_id(), value);
        sum += value;
        ++report.evaluated;
        modified.erase(it);
    }
    if (!modified.empty()) {
        throw Error("MissingQuery", modified.begin()->first + " present only in the modified run");
    }
    report.mean = report.evaluated == 0 ? 0.0 : sum / report.evaluated;
    return report;
}

double choice_accuracy(const std::map<std::string, char>& predictions,
                       const std::map<std::string, char>& gold) {
    if (gold.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& [id, answer] : gold) {
        auto it = predictions.find(id);
        if (it != predictions.end() && it->second == answer) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(gold.size());
}

std::string format_report(const MetricReport& report) {
    std::ostringstream out;
    std::size_t width = 8;
    for (const auto& [qid, _] : report.per_query) width = std::max(width, qid.size());

    char buf[64];
    for (const auto& [qid, value] : report.per_query) {
        std::snprintf(buf, sizeof(buf), "%-*s  %10.4f\n", static_cast<int>(width), qid.c_str(), value);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "%-*s  %10.4f", static_cast<int>(width), "mean", report.mean);
    out << buf << "  (" << report.metric << ", " << report.evaluated << " queries";
    if (report.skipped > 0) out << ", " << report.skipped << " skipped: no relevant docs";
    out << ")\n";
    return out.str();
}

}  // namespace rankforge
