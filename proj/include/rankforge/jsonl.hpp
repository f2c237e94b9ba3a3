#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankforge/corpus.hpp"

namespace rankforge {

/// Per-record JSON codecs. Parsers raise MissingField / MalformedLine with
/// enough context to name the offending field; the line number is added by
/// read_jsonl.
nlohmann::json record_to_json(const Query& q);
nlohmann::json record_to_json(const Passage& p);
nlohmann::json record_to_json(const LabeledPair& pair);
nlohmann::json record_to_json(const Persona& p);
nlohmann::json record_to_json(const McQuestion& q);
nlohmann::json record_to_json(const SftRecord& r);

template <typename Record>
Record record_from_json(const nlohmann::json& j);

template <>
Query record_from_json<Query>(const nlohmann::json& j);
template <>
Passage record_from_json<Passage>(const nlohmann::json& j);
template <>
LabeledPair record_from_json<LabeledPair>(const nlohmann::json& j);
template <>
Persona record_from_json<Persona>(const nlohmann::json& j);
template <>
McQuestion record_from_json<McQuestion>(const nlohmann::json& j);
template <>
SftRecord record_from_json<SftRecord>(const nlohmann::json& j);

namespace detail {
std::vector<std::string> read_lines_checked(const std::filesystem::path& path);
void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);
}  // namespace detail

/// Reads one record per line, skipping blank lines. File order is preserved.
template <typename Record>
std::vector<Record> read_jsonl(const std::filesystem::path& path) {
    std::vector<Record> records;
    std::size_t line_no = 0;
    for (const std::string& line : detail::read_lines_checked(path)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw PreconditionError("MalformedLine",
                                    "line " + std::to_string(line_no) + " of " + path.string() +
                                        " is not valid JSON: " + line.substr(0, 80));
        }
        try {
            records.push_back(record_from_json<Record>(j));
        } catch (const Error& e) {
            throw PreconditionError(e.kind(), "line " + std::to_string(line_no) + " of " +
                                                  path.string() + ": " +
                                                  std::string(e.what()).substr(e.kind().size() + 2));
        }
    }
    return records;
}

template <typename Record>
void write_jsonl(const std::vector<Record>& records, const std::filesystem::path& path) {
    std::vector<std::string> lines;
    lines.reserve(records.size());
    for (const Record& r : records) lines.push_back(record_to_json(r).dump());
    detail::write_lines(path, lines);
}

}  // namespace rankforge
