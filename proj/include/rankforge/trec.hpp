#pragma once

#include <filesystem>
#include <vector>

#include "rankforge/corpus.hpp"

namespace rankforge {

/// TREC run lines: `<qid> Q0 <docid> <rank> <score> <tag>`. Scores are
/// serialized to 6 decimal places and ranks recomputed from entry order.
void write_run(const std::vector<Ranking>& rankings, const std::filesystem::path& path);

/// Parses a run file, preserving per-query line order. A query whose scores
/// increase anywhere raises NonMonotoneScore; a repeated doc raises
/// DuplicateDoc. Queries appear in first-seen order.
std::vector<Ranking> read_run(const std::filesystem::path& path);

/// Qrels lines: `<qid> 0 <docid> <grade>`.
QRels read_qrels(const std::filesystem::path& path);
void write_qrels(const QRels& qrels, const std::filesystem::path& path);

}  // namespace rankforge
