#include "rankforge/trec.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "rankforge/jsonl.hpp"

namespace rankforge {

namespace {

std::string format_score(double score) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", score);
    return buf;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream iss(line);
    std::vector<std::string> fields;
    std::string f;
    while (iss >> f) fields.push_back(f);
    return fields;
}

}  // namespace

void write_run(const std::vector<Ranking>& rankings, const std::filesystem::path& path) {
    std::vector<std::string> lines;
    for (const Ranking& r : rankings) {
        std::size_t rank = 0;
        for (const RankedEntry& e : r.entries()) {
            ++rank;
            lines.push_back(r.query_id() + " Q0 " + e.doc_id + " " + std::to_string(rank) + " " +
                            format_score(e.score) + " " + r.tag());
        }
    }
    detail::write_lines(path, lines);
}

std::vector<Ranking> read_run(const std::filesystem::path& path) {
    std::vector<std::string> qid_order;
    std::map<std::string, std::vector<RankedEntry>> entries;
    std::map<std::string, std::string> tags;

    std::size_t line_no = 0;
    for (const std::string& line : detail::read_lines_checked(path)) {
        ++line_no;
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto fields = split_ws(line);
        if (fields.size() != 6 || fields[1] != "Q0") {
            throw PreconditionError("MalformedLine",
                                    "line " + std::to_string(line_no) + " of " + path.string() +
                                        " is not a run line: " + line.substr(0, 80));
        }
        double score = 0.0;
        auto [ptr, ec] = std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(), score);
        if (ec != std::errc{} || ptr != fields[4].data() + fields[4].size()) {
            throw PreconditionError("MalformedLine", "line " + std::to_string(line_no) + " of " +
                                                         path.string() + ": bad score " + fields[4]);
        }
        const std::string& qid = fields[0];
        if (!entries.contains(qid)) qid_order.push_back(qid);
        entries[qid].push_back(RankedEntry{fields[2], score});
        tags.emplace(qid, fields[5]);
    }

    std::vector<Ranking> out;
    out.reserve(qid_order.size());
    for (const std::string& qid : qid_order) {
        // from_ordered raises DuplicateDoc / NonMonotoneScore; reordering a
        // broken run silently is forbidden.
        out.push_back(Ranking::from_ordered(qid, std::move(entries[qid]), tags[qid]));
    }
    return out;
}

QRels read_qrels(const std::filesystem::path& path) {
    QRels qrels;
    std::size_t line_no = 0;
    for (const std::string& line : detail::read_lines_checked(path)) {
        ++line_no;
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto fields = split_ws(line);
        if (fields.size() != 4) {
            throw PreconditionError("MalformedLine",
                                    "line " + std::to_string(line_no) + " of " + path.string() +
                                        " is not a qrels line: " + line.substr(0, 80));
        }
        int grade = 0;
        auto [ptr, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), grade);
        if (ec != std::errc{} || ptr != fields[3].data() + fields[3].size() || grade < 0) {
            throw PreconditionError("MalformedLine", "line " + std::to_string(line_no) + " of " +
                                                         path.string() + ": bad grade " + fields[3]);
        }
        qrels.add(fields[0], fields[2], grade);
    }
    return qrels;
}

void write_qrels(const QRels& qrels, const std::filesystem::path& path) {
    std::vector<std::string> lines;
    for (const auto& [qid, docs] : qrels.by_query()) {
        for (const auto& [doc_id, grade] : docs) {
            lines.push_back(qid + " 0 " + doc_id + " " + std::to_string(grade));
        }
    }
    detail::write_lines(path, lines);
}

}  // namespace rankforge
