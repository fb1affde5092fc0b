#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace chatda::text {

// Lowercases ASCII and splits on runs of characters that are neither ASCII
// alphanumerics nor bytes of a multi-byte UTF-8 sequence. No stemming.
std::vector<std::string> tokenize(std::string_view s);

// Tokens joined by single spaces.
std::string normalize(std::string_view s);

bool is_stopword(std::string_view token);

using TermCounts = std::map<std::string, double>;

TermCounts count_terms(const std::vector<std::string>& tokens, bool drop_stopwords);
void add_terms(TermCounts& into, const TermCounts& from);

// 0 when either vector is empty.
double cosine(const TermCounts& a, const TermCounts& b);

std::size_t levenshtein(std::string_view a, std::string_view b);

// 1 - distance / max(len); two empty strings are identical.
double edit_similarity(std::string_view a, std::string_view b);

// Last non-space character is '?'.
bool ends_with_question_mark(std::string_view s);

// A word list or phrase list, one entry per line. Entries are stored in
// normalized form; blank lines and lines starting with '#' are ignored.
class Lexicon {
public:
    Lexicon() = default;
    static Lexicon parse(std::string_view content);
    static Lexicon load(const std::filesystem::path& path);

    bool contains(std::string_view normalized_entry) const { return entries_.count(std::string(normalized_entry)) > 0; }

    // True if any entry occurs in `normalized` as a whole-token subsequence.
    bool matches_phrase(std::string_view normalized) const;

    // True if any entry is a prefix of `normalized` on token boundaries.
    bool matches_prefix(std::string_view normalized) const;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

private:
    std::set<std::string> entries_;
};

} // namespace chatda::text
