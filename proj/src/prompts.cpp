#include "rankforge/prompts.hpp"

#include <array>
#include <fstream>
#include <regex>
#include <sstream>

namespace rankforge {

PromptTemplate PromptTemplate::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw PreconditionError("FileNotFound", "cannot open prompt template " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

PromptTemplate PromptTemplate::from_string(std::string text) {
    PromptTemplate t;
    t.text_ = std::move(text);
    return t;
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& fills) const {
    std::string out = text_;
    for (const auto& [slot, value] : fills) {
        std::size_t pos = 0;
        bool found = false;
        while ((pos = out.find(slot, pos)) != std::string::npos) {
            out.replace(pos, slot.size(), value);
            pos += value.size();
            found = true;
        }
        if (!found) {
            throw Error("UnfilledSlot", "slot " + slot + " does not occur in the template");
        }
    }
    // Slots follow the [..._HERE] / [FILL_...] conventions; anything left is a bug.
    static const std::regex leftover(R"(\[FILL_[A-Z_]*\]|\[[A-Z_]+_HERE\])");
    std::smatch m;
    if (std::regex_search(out, m, leftover)) {
        throw Error("UnfilledSlot", "rendered prompt still contains " + m.str());
    }
    return out;
}

PromptLibrary PromptLibrary::from_dir(const std::filesystem::path& dir) {
    static constexpr std::array<const char*, 9> kNames = {
        "persona", "daily", "expert", "solve", "extract", "negative", "passage", "judge", "reader"};
    PromptLibrary lib;
    for (const char* name : kNames) {
        lib.templates_.emplace(name, PromptTemplate::from_file(dir / (std::string(name) + ".txt")));
    }
    return lib;
}

const PromptTemplate& PromptLibrary::get(const std::string& name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) {
        throw PreconditionError("ConfigError", "no prompt template named \"" + name + "\"");
    }
    return it->second;
}

}  // namespace rankforge
