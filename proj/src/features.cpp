#include "chatda/features.hpp"

#include "chatda/text.hpp"

#include <algorithm>
#include <cstdio>

namespace chatda {
namespace {

std::string fnv1a_hex(const std::vector<std::string>& parts) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](unsigned char c) {
        h ^= c;
        h *= 0x100000001b3ULL;
    };
    for (const auto& p : parts) {
        for (unsigned char c : p) mix(c);
        mix(0);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void add_bow(std::map<std::size_t, double>& values, std::string_view s, const Vocabulary& vocab) {
    for (const auto& tok : text::tokenize(s)) {
        if (auto idx = vocab.index(tok)) values[FeatureSchema::kBow + *idx] += 1.0;
    }
}

} // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (!index_.emplace(tokens_[i], i).second) throw DataError("vocabulary: duplicate token '" + tokens_[i] + "'");
    }
}

std::optional<std::size_t> Vocabulary::index(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Vocabulary Vocabulary::build(const std::vector<Dialogue>& training, std::size_t min_count, std::size_t max_size) {
    if (training.empty()) throw DataError("vocabulary: empty training split");
    std::map<std::string, std::size_t> counts;
    for (const auto& d : training) {
        for (const auto& t : text::tokenize(d.topic.question_text)) ++counts[t];
        for (const auto& u : d.utterances) {
            if (!u.is_chatbot()) continue;
            for (const auto& t : text::tokenize(u.text)) ++counts[t];
        }
    }
    std::vector<std::pair<std::string, std::size_t>> ranked;
    for (auto& [tok, n] : counts) {
        if (n >= min_count) ranked.emplace_back(tok, n);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > max_size) ranked.resize(max_size);
    std::vector<std::string> tokens;
    tokens.reserve(ranked.size());
    for (auto& [tok, n] : ranked) tokens.push_back(tok);
    return Vocabulary(std::move(tokens));
}

FeatureSchema::FeatureSchema(const Vocabulary& vocab) : vocab_size_(vocab.size()) {
    names_.reserve(dimension());
    auto block = [&](std::string_view prefix, auto values) {
        for (auto v : values) names_.push_back(std::string(prefix) + std::string(to_string(v)));
    };
    block("x_target_", all_chatbot_das());
    block("x_prev_", all_chatbot_das());
    block("x_next_", all_chatbot_das());
    block("x_last_user_", all_user_das());
    block("x_prev_users_", all_user_das());
    block("x_next_user_", all_user_das());
    block("x_next_users_", all_user_das());
    for (auto c : all_chatbot_das()) {
        for (auto u : all_user_das()) {
            names_.push_back("x_pair_" + std::string(to_string(u)) + "__" + std::string(to_string(c)));
        }
    }
    names_.push_back("x_ordinal");
    for (const auto& t : vocab.tokens()) names_.push_back("bow_" + t);
    fingerprint_ = fnv1a_hex(names_);
}

std::vector<double> FeatureVector::dense(std::size_t dimension) const {
    std::vector<double> out(dimension, 0.0);
    for (const auto& [i, v] : values) {
        if (i < dimension) out[i] = v;
    }
    return out;
}

FeatureVector extract(const Dialogue& dialogue, std::size_t target_index, const Vocabulary& vocab,
                      const FeatureSchema& schema) {
    if (target_index >= dialogue.utterances.size() || !dialogue.utterances[target_index].is_chatbot()) {
        throw DataError("dialogue " + dialogue.id + ": turn " + std::to_string(target_index) + " is not a chatbot turn");
    }
    if (schema.vocab_size() != vocab.size()) throw DataError("feature schema does not match the vocabulary");

    const auto& utts = dialogue.utterances;
    auto user_da_at = [&](std::size_t i) {
        if (!utts[i].user_da) {
            throw DataError("dialogue " + dialogue.id + ": utterances[" + std::to_string(i) + "] has no user_da");
        }
        return *utts[i].user_da;
    };
    auto chatbot_da_at = [&](std::size_t i) {
        if (!utts[i].chatbot_da) {
            throw DataError("dialogue " + dialogue.id + ": utterances[" + std::to_string(i) + "] has no chatbot_da");
        }
        return *utts[i].chatbot_da;
    };

    FeatureVector fv;
    fv.provenance = {dialogue.id, target_index};
    fv.schema_fingerprint = schema.fingerprint();
    fv.label = utts[target_index].gold_label;
    auto& x = fv.values;

    const ChatbotDA target = chatbot_da_at(target_index);
    x[FeatureSchema::kTarget + index_of(target)] = 1.0;

    std::optional<UserDA> last_user;
    std::size_t ordinal = 0;
    for (std::size_t i = 0; i < target_index; ++i) {
        if (utts[i].is_chatbot()) {
            x[FeatureSchema::kPrevChatbot + index_of(chatbot_da_at(i))] = 1.0;
            ++ordinal;
        } else {
            last_user = user_da_at(i);
            x[FeatureSchema::kPrevUsers + index_of(*last_user)] = 1.0;
        }
    }
    std::optional<UserDA> next_user;
    for (std::size_t i = target_index + 1; i < utts.size(); ++i) {
        if (utts[i].is_chatbot()) {
            x[FeatureSchema::kNextChatbots + index_of(chatbot_da_at(i))] = 1.0;
        } else {
            const auto da = user_da_at(i);
            if (!next_user) next_user = da;
            x[FeatureSchema::kNextUsers + index_of(da)] = 1.0;
        }
    }
    if (last_user) {
        x[FeatureSchema::kLastUser + index_of(*last_user)] = 1.0;
        x[FeatureSchema::pair_offset(*last_user, target)] = 1.0;
    }
    if (next_user) x[FeatureSchema::kNextUser + index_of(*next_user)] = 1.0;
    x[FeatureSchema::kOrdinal] = static_cast<double>(ordinal + 1);

    add_bow(x, dialogue.topic.question_text, vocab);
    add_bow(x, utts[target_index].text, vocab);
    return fv;
}

std::vector<FeatureVector> extract_all(const std::vector<Dialogue>& dialogues, const Vocabulary& vocab,
                                       const FeatureSchema& schema) {
    std::vector<FeatureVector> out;
    for (const auto& d : dialogues) {
        for (std::size_t i = 0; i < d.utterances.size(); ++i) {
            if (d.utterances[i].is_chatbot()) out.push_back(extract(d, i, vocab, schema));
        }
    }
    return out;
}

void write_feature_matrix(std::ostream& os, const std::vector<FeatureVector>& data, const FeatureSchema& schema,
                          char delimiter) {
    for (const auto& name : schema.column_names()) os << name << delimiter;
    os << "label\n";
    for (const auto& fv : data) {
        auto it = fv.values.begin();
        for (std::size_t i = 0; i < schema.dimension(); ++i) {
            if (it != fv.values.end() && it->first == i) {
                os << it->second;
                ++it;
            } else {
                os << 0;
            }
            os << delimiter;
        }
        os << (fv.label ? to_string(*fv.label) : std::string_view{}) << '\n';
    }
}

} // namespace chatda
