#pragma once

#include "chatda/common.hpp"
#include "chatda/taxonomy.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chatda {

enum class Speaker : std::uint8_t { User, Chatbot };

std::string_view to_string(Speaker s);

struct TopicRef {
    std::string topic_id;
    std::string question_text;

    bool operator==(const TopicRef&) const = default;
};

struct Utterance {
    Speaker speaker = Speaker::User;
    std::string text;
    std::size_t turn_index = 0;
    std::optional<SwdaTag> swda_tag;
    std::optional<UserDA> user_da;
    std::optional<ChatbotDA> chatbot_da;
    std::optional<Appropriateness> gold_label;

    bool is_user() const { return speaker == Speaker::User; }
    bool is_chatbot() const { return speaker == Speaker::Chatbot; }
    bool operator==(const Utterance&) const = default;
};

struct Dialogue {
    std::string id;
    TopicRef topic;
    std::vector<Utterance> utterances;

    std::size_t chatbot_count() const;
    bool operator==(const Dialogue&) const = default;
};

// Built-in interview topics. Seed keywords extend the topic vector used for
// relevance scoring; custom topics have none.
struct RegisteredTopic {
    std::string_view topic_id;
    std::string_view question_text;
    std::span<const std::string_view> seed_keywords;

    TopicRef ref() const { return {std::string(topic_id), std::string(question_text)}; }
};

std::span<const RegisteredTopic> registered_topics();
const RegisteredTopic* find_topic(std::string_view topic_id);

// Keywords about the interview itself ("why are you asking"), shared by every topic.
std::span<const std::string_view> interview_meta_keywords();

// Throws DataError on structural violations; returns warnings for
// conversational-convention violations.
std::vector<std::string> validate(const Dialogue& d);

struct LoadReport {
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
};

// One JSON object per line. In strict mode the first malformed record throws
// a DataError naming the line and field; otherwise it is skipped and counted.
std::vector<Dialogue> load_transcripts(const std::filesystem::path& path, bool strict,
                                       LoadReport* report = nullptr);
std::vector<Dialogue> parse_transcripts(std::string_view content, bool strict,
                                        LoadReport* report = nullptr);

void write_transcripts(const std::vector<Dialogue>& dialogues, const std::filesystem::path& path);
std::string serialize_transcripts(const std::vector<Dialogue>& dialogues);

struct GenSpec {
    std::size_t n_dialogues = 100;
    std::uint64_t seed = 7;
    double mismatch_rate = 0.15;
};

// Synthetic interview transcripts with gold DAs and labels. Pure function of `spec`.
std::vector<Dialogue> generate_corpus(const GenSpec& spec);

} // namespace chatda
