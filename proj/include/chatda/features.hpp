#pragma once

#include "chatda/taxonomy.hpp"
#include "chatda/transcript.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

namespace chatda {

// Unigram vocabulary over topic question texts and chatbot response texts.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> tokens);

    // Tokens with count >= min_count, ordered by descending count then
    // alphabetically, truncated to max_size. Throws DataError on an empty split.
    static Vocabulary build(const std::vector<Dialogue>& training, std::size_t min_count = 2,
                            std::size_t max_size = 5000);

    std::size_t size() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }
    std::optional<std::size_t> index(const std::string& token) const;

    bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Column layout of a feature vector:
//   [target chatbot DA one-hot: 14]
//   [previous chatbot DAs multi-hot: 14]
//   [following chatbot DAs multi-hot: 14]
//   [most recent prior user DA one-hot: 12]
//   [previous user DAs multi-hot: 12]
//   [next user DA one-hot: 12]
//   [following user DAs multi-hot: 12]
//   [exchange pair one-hot: 168, offset 12 * chatbot + user]
//   [ordinal index of the target among chatbot turns, 1-based: 1]
//   [bag-of-words counts over the vocabulary: |V|]
class FeatureSchema {
public:
    static constexpr std::size_t kTarget = 0;
    static constexpr std::size_t kPrevChatbot = kTarget + kNumChatbotDAs;
    static constexpr std::size_t kNextChatbots = kPrevChatbot + kNumChatbotDAs;
    static constexpr std::size_t kLastUser = kNextChatbots + kNumChatbotDAs;
    static constexpr std::size_t kPrevUsers = kLastUser + kNumUserDAs;
    static constexpr std::size_t kNextUser = kPrevUsers + kNumUserDAs;
    static constexpr std::size_t kNextUsers = kNextUser + kNumUserDAs;
    static constexpr std::size_t kPair = kNextUsers + kNumUserDAs;
    static constexpr std::size_t kOrdinal = kPair + kNumUserDAs * kNumChatbotDAs;
    static constexpr std::size_t kBow = kOrdinal + 1;
    static constexpr std::size_t kFixedDims = kBow;  // 259

    explicit FeatureSchema(const Vocabulary& vocab);

    std::size_t dimension() const { return kFixedDims + vocab_size_; }
    std::size_t vocab_size() const { return vocab_size_; }
    const std::vector<std::string>& column_names() const { return names_; }

    // Hex FNV-1a 64 over the column names.
    const std::string& fingerprint() const { return fingerprint_; }

    static std::size_t pair_offset(UserDA user, ChatbotDA chatbot) {
        return kPair + kNumUserDAs * index_of(chatbot) + index_of(user);
    }

private:
    std::size_t vocab_size_ = 0;
    std::vector<std::string> names_;
    std::string fingerprint_;
};

struct Provenance {
    std::string dialogue_id;
    std::size_t turn_index = 0;
};

struct FeatureVector {
    std::map<std::size_t, double> values;  // sparse; absent entries are zero
    std::optional<Appropriateness> label;
    Provenance provenance;
    std::string schema_fingerprint;

    double at(std::size_t i) const {
        auto it = values.find(i);
        return it == values.end() ? 0.0 : it->second;
    }
    std::vector<double> dense(std::size_t dimension) const;
};

// Throws DataError when the target is not a chatbot turn or the dialogue is
// not fully DA-annotated.
FeatureVector extract(const Dialogue& dialogue, std::size_t target_index, const Vocabulary& vocab,
                      const FeatureSchema& schema);

std::vector<FeatureVector> extract_all(const std::vector<Dialogue>& dialogues, const Vocabulary& vocab,
                                       const FeatureSchema& schema);

// Delimiter-separated export: header of column names followed by "label".
void write_feature_matrix(std::ostream& os, const std::vector<FeatureVector>& data, const FeatureSchema& schema,
                          char delimiter = ',');

} // namespace chatda
