#pragma once

#include <optional>
#include <string_view>
#include <vector>

// Data files under data/ compiled into the library at build time.
namespace chatda::resources {

std::string_view ruleset_json();

// Lexicon by file stem, e.g. "fallback_phrases".
std::optional<std::string_view> lexicon(std::string_view name);

std::vector<std::string_view> lexicon_names();

} // namespace chatda::resources
