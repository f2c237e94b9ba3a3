#pragma once

#include <map>
#include <string>
#include <vector>

#include "rankforge/corpus.hpp"

namespace rankforge {

/// Per-query values plus their unweighted mean. Queries without any judged
/// relevant doc are skipped (trec_eval convention) and counted.
struct MetricReport {
    std::string metric;
    int k = 0;  // 0 means no cutoff
    std::map<std::string, double> per_query;
    double mean = 0.0;
    int evaluated = 0;
    int skipped = 0;
};

double ndcg_at_k(const Ranking& ranking, const QRels& qrels, int k);
double map_at_k(const Ranking& ranking, const QRels& qrels, int k);
double recall_at_k(const Ranking& ranking, const QRels& qrels, int k);
double mrr(const Ranking& ranking, const QRels& qrels);

enum class RankMetric { ndcg, map, recall, mrr };

MetricReport evaluate(RankMetric metric, const std::vector<Ranking>& rankings, const QRels& qrels,
                      int k);

/// Paired-rank instruction-following delta for one query, on the percent
/// scale. For each relevant doc with 1-based ranks R_og and R_new
/// (absent docs rank at run length + 1):
///   delta = R_og/R_new - 1   when the doc moved up (R_og > R_new)
///   delta = 1 - R_new/R_og   otherwise
/// The query score is the mean delta over its relevant docs, times 100.
double p_mrr_query(const Ranking& og, const Ranking& modified, const QRels& qrels);

/// Mean of p_mrr_query over all shared queries; MissingQuery when one side
/// lacks a query the other has.
MetricReport p_mrr(const std::vector<Ranking>& og_run, const std::vector<Ranking>& new_run,
                   const QRels& qrels);

/// Exact-match fraction over gold keys; a missing prediction counts wrong.
double choice_accuracy(const std::map<std::string, char>& predictions,
                       const std::map<std::string, char>& gold);

/// Renders a report as an aligned text table (per-query rows plus the mean).
std::string format_report(const MetricReport& report);

}  // namespace rankforge
