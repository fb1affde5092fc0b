#include "chatda/text.hpp"

#include "chatda/common.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace chatda::text {
namespace {

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

// Small English function-word list; relevance scoring only looks at content words.
const std::set<std::string, std::less<>>& stopwords() {
    static const std::set<std::string, std::less<>> words = {
        "a", "about", "am", "an", "and", "any", "are", "as", "at", "be", "been", "but", "by",
        "can", "could", "did", "do", "does", "for", "from", "had", "has", "have", "he", "her",
        "here", "him", "his", "how", "i", "if", "in", "into", "is", "it", "its", "just", "m",
        "me", "most", "my", "no", "not", "now", "of", "on", "or", "our", "s", "she", "so",
        "some", "t", "than", "that", "the", "their", "them", "then", "there", "these", "they",
        "this", "to", "too", "up", "us", "very", "was", "we", "were", "what", "when", "where",
        "which", "who", "whom", "why", "will", "with", "would", "you", "your", "yours", "ll",
        "re", "ve", "d",
    };
    return words;
}

bool contains_token_seq(std::string_view hay, std::string_view needle) {
    if (needle.empty()) return false;
    std::size_t pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string_view::npos) {
        const bool left_ok = pos == 0 || hay[pos - 1] == ' ';
        const std::size_t end = pos + needle.size();
        const bool right_ok = end == hay.size() || hay[end] == ' ';
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

} // namespace

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : s) {
        if (is_word_byte(c)) {
            cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string normalize(std::string_view s) {
    std::string out;
    for (const auto& tok : tokenize(s)) {
        if (!out.empty()) out.push_back(' ');
        out += tok;
    }
    return out;
}

bool is_stopword(std::string_view token) { return stopwords().find(token) != stopwords().end(); }

TermCounts count_terms(const std::vector<std::string>& tokens, bool drop_stopwords) {
    TermCounts out;
    for (const auto& t : tokens) {
        if (drop_stopwords && is_stopword(t)) continue;
        out[t] += 1.0;
    }
    return out;
}

void add_terms(TermCounts& into, const TermCounts& from) {
    for (const auto& [k, v] : from) into[k] += v;
}

double cosine(const TermCounts& a, const TermCounts& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [k, v] : a) {
        na += v * v;
        if (auto it = b.find(k); it != b.end()) dot += v * it->second;
    }
    for (const auto& [k, v] : b) nb += v * v;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
    const std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

bool ends_with_question_mark(std::string_view s) {
    auto end = s.find_last_not_of(" \t\r\n");
    return end != std::string_view::npos && s[end] == '?';
}

Lexicon Lexicon::parse(std::string_view content) {
    Lexicon lex;
    std::istringstream in{std::string(content)};
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto norm = normalize(line);
        if (!norm.empty()) lex.entries_.insert(std::move(norm));
    }
    return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("lexicon: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

bool Lexicon::matches_phrase(std::string_view normalized) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const std::string& e) { return contains_token_seq(normalized, e); });
}

bool Lexicon::matches_prefix(std::string_view normalized) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const std::string& e) {
        return normalized.size() >= e.size() && normalized.compare(0, e.size(), e) == 0 &&
               (normalized.size() == e.size() || normalized[e.size()] == ' ');
    });
}

} // namespace chatda::text
