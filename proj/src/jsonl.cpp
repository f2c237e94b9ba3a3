#include "rankforge/jsonl.hpp"

#include <fstream>
#include <sstream>

namespace rankforge {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end() || it->is_null()) {
        throw PreconditionError("MissingField", std::string("missing field \"") + name + "\"");
    }
    return *it;
}

std::string require_string(const json& j, const char* name, bool allow_empty = false) {
    const json& v = require(j, name);
    if (!v.is_string()) {
        throw PreconditionError("MalformedLine", std::string("field \"") + name + "\" must be a string");
    }
    std::string s = v.get<std::string>();
    if (s.empty() && !allow_empty) {
        throw PreconditionError("MalformedLine", std::string("field \"") + name + "\" must be non-empty");
    }
    return s;
}

std::optional<std::string> optional_string(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) {
        throw PreconditionError("MalformedLine", std::string("field \"") + name + "\" must be a string");
    }
    return it->get<std::string>();
}

}  // namespace

json record_to_json(const Query& q) {
    json j{{"id", q.id}, {"text", q.text}, {"kind", to_string(q.kind)}};
    if (q.scenario) j["scenario"] = *q.scenario;
    if (q.persona_id) j["persona_id"] = *q.persona_id;
    return j;
}

template <>
Query record_from_json<Query>(const json& j) {
    Query q;
    q.id = require_string(j, "id");
    q.text = require_string(j, "text");
    if (auto kind = optional_string(j, "kind")) q.kind = query_kind_from_string(*kind);
    q.scenario = optional_string(j, "scenario");
    q.persona_id = optional_string(j, "persona_id");
    if ((q.kind == QueryKind::daily) != q.scenario.has_value()) {
        throw PreconditionError("MalformedLine",
                                "query " + q.id + ": scenario must be present exactly when kind=daily");
    }
    return q;
}

json record_to_json(const Passage& p) {
    json j{{"id", p.id}, {"text", p.text}, {"role", to_string(p.role)}};
    if (p.material_desc) j["material_desc"] = *p.material_desc;
    return j;
}

template <>
Passage record_from_json<Passage>(const json& j) {
    Passage p;
    p.id = require_string(j, "id");
    p.text = require_string(j, "text");
    if (auto role = optional_string(j, "role")) p.role = passage_role_from_string(*role);
    p.material_desc = optional_string(j, "material_desc");
    return p;
}

json record_to_json(const LabeledPair& pair) {
    json j{{"query", record_to_json(pair.query)},
           {"passage", record_to_json(pair.passage)},
           {"intended_label", pair.intended_label},
           {"source", to_string(pair.source)}};
    if (pair.reasoning_trace) j["reasoning_trace"] = *pair.reasoning_trace;
    if (pair.judge_verdict) j["judge_verdict"] = *pair.judge_verdict;
    return j;
}

template <>
LabeledPair record_from_json<LabeledPair>(const json& j) {
    LabeledPair pair;
    pair.query = record_from_json<Query>(require(j, "query"));
    pair.passage = record_from_json<Passage>(require(j, "passage"));
    const json& label = require(j, "intended_label");
    if (!label.is_boolean()) {
        throw PreconditionError("MalformedLine", "field \"intended_label\" must be a boolean");
    }
    pair.intended_label = label.get<bool>();
    pair.source = pair_source_from_string(require_string(j, "source"));
    pair.reasoning_trace = optional_string(j, "reasoning_trace");
    if (auto it = j.find("judge_verdict"); it != j.end() && !it->is_null()) {
        if (!it->is_boolean()) {
            throw PreconditionError("MalformedLine", "field \"judge_verdict\" must be a boolean");
        }
        pair.judge_verdict = it->get<bool>();
    }
    const bool expect = pair.passage.role == PassageRole::positive;
    if (pair.intended_label != expect) {
        throw PreconditionError("MalformedLine", "pair " + pair.pair_id() +
                                                     ": intended_label contradicts passage role");
    }
    return pair;
}

json record_to_json(const Persona& p) {
    return json{{"id", p.id}, {"description", p.description}};
}

template <>
Persona record_from_json<Persona>(const json& j) {
    Persona p;
    // PersonaHub files carry the text under "persona"; ours use "description".
    if (j.contains("description")) {
        p.description = require_string(j, "description");
    } else {
        p.description = require_string(j, "persona");
    }
    p.id = optional_string(j, "id").value_or("");
    return p;
}

json record_to_json(const McQuestion& q) {
    json options = json::array();
    for (const auto& [letter, text] : q.options) {
        options.push_back(json{{"letter", std::string(1, letter)}, {"text", text}});
    }
    return json{{"id", q.id}, {"stem", q.stem}, {"options", options},
                {"gold", std::string(1, q.gold)}};
}

template <>
McQuestion record_from_json<McQuestion>(const json& j) {
    McQuestion q;
    q.id = require_string(j, "id");
    q.stem = require_string(j, "stem");
    const json& options = require(j, "options");
    if (!options.is_array()) {
        throw PreconditionError("MalformedLine", "field \"options\" must be an array");
    }
    char next_letter = 'A';
    for (const json& opt : options) {
        if (opt.is_string()) {
            // Bare strings get letters assigned in order: A, B, C, ...
            q.options.emplace_back(next_letter, opt.get<std::string>());
        } else if (opt.is_object()) {
            std::string letter = require_string(opt, "letter");
            if (letter.size() != 1) {
                throw PreconditionError("MalformedLine", "option letter must be a single character");
            }
            q.options.emplace_back(letter[0], require_string(opt, "text"));
        } else {
            throw PreconditionError("MalformedLine", "options must be strings or {letter, text} objects");
        }
        ++next_letter;
    }
    std::string gold = require_string(j, "gold");
    if (gold.size() != 1) {
        throw PreconditionError("MalformedLine", "field \"gold\" must be a single letter");
    }
    q.gold = gold[0];
    validate_question(q);
    return q;
}

json record_to_json(const SftRecord& r) {
    json messages = json::array();
    for (const auto& m : r.messages) {
        messages.push_back(json{{"role", m.role}, {"content", m.content}});
    }
    return json{{"messages", messages}};
}

template <>
SftRecord record_from_json<SftRecord>(const json& j) {
    SftRecord r;
    const json& messages = require(j, "messages");
    if (!messages.is_array() || messages.empty()) {
        throw PreconditionError("MalformedLine", "field \"messages\" must be a non-empty array");
    }
    for (const json& m : messages) {
        r.messages.push_back(
            SftMessage{require_string(m, "role"), require_string(m, "content", /*allow_empty=*/true)});
    }
    return r;
}

namespace detail {

std::vector<std::string> read_lines_checked(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw PreconditionError("FileNotFound", "cannot open " + path.string());
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw PreconditionError("FileNotFound", "cannot write " + path.string());
    }
    for (const std::string& line : lines) out << line << '\n';
}

}  // namespace detail

}  // namespace rankforge
