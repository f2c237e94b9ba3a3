#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "rankforge/errors.hpp"

namespace rankforge {

/// A text template with [FILL_*]-style slots. Rendering substitutes every
/// occurrence of each slot and then refuses to emit text with a known slot
/// marker left over.
class PromptTemplate {
public:
    static PromptTemplate from_file(const std::filesystem::path& path);
    static PromptTemplate from_string(std::string text);

    std::string render(const std::map<std::string, std::string>& fills) const;
    const std::string& text() const { return text_; }

private:
    std::string text_;
};

/// The pipeline's template set, loaded from a directory of .txt files:
/// persona, daily, expert, solve, extract, negative, passage, judge, reader.
class PromptLibrary {
public:
    static PromptLibrary from_dir(const std::filesystem::path& dir);

    const PromptTemplate& get(const std::string& name) const;

private:
    std::map<std::string, PromptTemplate> templates_;
};

}  // namespace rankforge
