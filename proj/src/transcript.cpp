#include "chatda/transcript.hpp"

#include "chatda/text.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <fstream>
#include <set>
#include <sstream>

namespace chatda {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::array<std::string_view, 28> kHobbySeeds = {
    "hobby", "hobbies", "interest", "interests", "enjoy", "love", "like", "fun", "free",
    "weekends", "sports", "music", "reading", "swimming", "dance", "dancing", "hiking",
    "painting", "games", "cooking", "guitar", "travel", "play", "playing", "movies",
    "running", "books", "photography",
};

constexpr std::array<std::string_view, 28> kWorkSeeds = {
    "work", "job", "living", "career", "student", "study", "studying", "school", "teacher",
    "teach", "engineer", "nurse", "company", "office", "business", "manager", "developer",
    "software", "university", "college", "retired", "working", "doctor", "sales", "shop",
    "accountant", "customers", "clients",
};

constexpr std::array<std::string_view, 26> kFriendSeeds = {
    "friend", "friends", "friendship", "loyal", "loyalty", "honest", "honesty", "kind",
    "caring", "supportive", "listener", "listen", "trust", "trustworthy", "funny",
    "qualities", "quality", "reliable", "patient", "generous", "good", "always", "help",
    "there", "care", "fun",
};

constexpr std::array<std::string_view, 28> kChallengeSeeds = {
    "challenge", "challenges", "overcome", "hard", "difficult", "time", "tough", "struggle",
    "struggled", "exam", "exams", "family", "sick", "lost", "losing", "job", "stress",
    "failed", "worked", "support", "help", "helped", "moved", "country", "made", "studied",
    "harder", "never",
};

constexpr std::array<std::string_view, 6> kMetaKeywords = {
    "ask", "asking", "asked", "question", "questions", "mean",
};

const std::array<RegisteredTopic, 4> kTopics = {{
    {"q1", "What hobbies or interests do you have?", kHobbySeeds},
    {"q2", "What do you do now for a living?", kWorkSeeds},
    {"q3", "What are your strongest qualities as a friend?", kFriendSeeds},
    {"q4",
     "Tell me about a time when you didn't know if you would make it. How did you overcome "
     "that challenge?",
     kChallengeSeeds},
}};

struct RecordError {
    std::string field;
    std::string message;
};

std::string field_path(std::size_t utt, std::string_view field) {
    return "utterances[" + std::to_string(utt) + "]." + std::string(field);
}

const json& require(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw RecordError{path, "missing required field"};
    return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_string()) throw RecordError{path, "expected a string"};
    return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw RecordError{path, "expected a string"};
    return it->get<std::string>();
}

Dialogue parse_record(const json& rec, std::vector<std::string>& warnings) {
    if (!rec.is_object()) throw RecordError{"<record>", "expected a JSON object"};
    Dialogue d;
    d.id = require_string(rec, "id", "id");
    if (d.id.empty()) throw RecordError{"id", "must be non-empty"};
    d.topic.topic_id = require_string(rec, "topic_id", "topic_id");
    d.topic.question_text = require_string(rec, "question_text", "question_text");

    const auto& utts = require(rec, "utterances", "utterances");
    if (!utts.is_array()) throw RecordError{"utterances", "expected an array"};
    for (std::size_t i = 0; i < utts.size(); ++i) {
        const auto& ju = utts[i];
        if (!ju.is_object()) throw RecordError{field_path(i, ""), "expected an object"};
        Utterance u;
        u.turn_index = i;
        const auto speaker = require_string(ju, "speaker", field_path(i, "speaker"));
        if (speaker == "user") u.speaker = Speaker::User;
        else if (speaker == "chatbot") u.speaker = Speaker::Chatbot;
        else throw RecordError{field_path(i, "speaker"), "must be \"user\" or \"chatbot\", got \"" + speaker + "\""};
        u.text = require_string(ju, "text", field_path(i, "text"));

        if (auto it = ju.find("turn_index"); it != ju.end()) {
            if (!it->is_number_unsigned() || it->get<std::size_t>() != i) {
                throw RecordError{field_path(i, "turn_index"), "must equal the utterance position " + std::to_string(i)};
            }
        }
        if (auto tag = optional_string(ju, "swda_tag", field_path(i, "swda_tag"))) {
            bool known = false;
            u.swda_tag = parse_swda_tag_lenient(*tag, &known);
            if (!known) {
                warnings.push_back("dialogue " + d.id + ": " + field_path(i, "swda_tag") + ": unknown tag '" +
                                   *tag + "' mapped to '%'");
            }
        }
        if (auto s = optional_string(ju, "user_da", field_path(i, "user_da"))) {
            u.user_da = parse_user_da(*s);
            if (!u.user_da) throw RecordError{field_path(i, "user_da"), "unknown user DA '" + *s + "'"};
        }
        if (auto s = optional_string(ju, "chatbot_da", field_path(i, "chatbot_da"))) {
            u.chatbot_da = parse_chatbot_da(*s);
            if (!u.chatbot_da) throw RecordError{field_path(i, "chatbot_da"), "unknown chatbot DA '" + *s + "'"};
        }
        if (auto s = optional_string(ju, "gold_label", field_path(i, "gold_label"))) {
            u.gold_label = parse_appropriateness(*s);
            if (!u.gold_label) throw RecordError{field_path(i, "gold_label"), "unknown label '" + *s + "'"};
        }
        d.utterances.push_back(std::move(u));
    }
    return d;
}

ordered_json to_json(const Dialogue& d) {
    ordered_json rec;
    rec["id"] = d.id;
    rec["topic_id"] = d.topic.topic_id;
    rec["question_text"] = d.topic.question_text;
    auto utts = ordered_json::array();
    for (const auto& u : d.utterances) {
        ordered_json ju;
        ju["speaker"] = to_string(u.speaker);
        ju["text"] = u.text;
        if (u.swda_tag) ju["swda_tag"] = to_string(*u.swda_tag);
        if (u.user_da) ju["user_da"] = to_string(*u.user_da);
        if (u.chatbot_da) ju["chatbot_da"] = to_string(*u.chatbot_da);
        if (u.gold_label) ju["gold_label"] = to_string(*u.gold_label);
        utts.push_back(std::move(ju));
    }
    rec["utterances"] = std::move(utts);
    return rec;
}

} // namespace

std::string_view to_string(Appropriateness a) {
    switch (a) {
        case Appropriateness::Inappropriate: return "inappropriate";
        case Appropriateness::Neutral: return "neutral";
        case Appropriateness::Appropriate: return "appropriate";
    }
    return "neutral";
}

std::optional<Appropriateness> parse_appropriateness(std::string_view s) {
    std::string lower(s);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "inappropriate") return Appropriateness::Inappropriate;
    if (lower == "neutral") return Appropriateness::Neutral;
    if (lower == "appropriate") return Appropriateness::Appropriate;
    return std::nullopt;
}

std::string_view to_string(Speaker s) { return s == Speaker::User ? "user" : "chatbot"; }

std::size_t Dialogue::chatbot_count() const {
    std::size_t n = 0;
    for (const auto& u : utterances) n += u.is_chatbot() ? 1 : 0;
    return n;
}

std::span<const RegisteredTopic> registered_topics() { return kTopics; }

const RegisteredTopic* find_topic(std::string_view topic_id) {
    for (const auto& t : kTopics) {
        if (t.topic_id == topic_id) return &t;
    }
    return nullptr;
}

std::span<const std::string_view> interview_meta_keywords() { return kMetaKeywords; }

std::vector<std::string> validate(const Dialogue& d) {
    std::vector<std::string> warnings;
    if (d.id.empty()) throw DataError("dialogue id must be non-empty");
    const std::string who = "dialogue " + d.id + ": ";
    if (d.topic.question_text.empty()) throw DataError(who + "question_text: must be non-empty");
    if (d.utterances.empty()) throw DataError(who + "utterances: must be non-empty");
    bool any_chatbot = false;
    for (std::size_t i = 0; i < d.utterances.size(); ++i) {
        const auto& u = d.utterances[i];
        if (u.turn_index != i) {
            throw DataError(who + field_path(i, "turn_index") + ": turn indices must be consecutive from 0");
        }
        if (u.is_user() && u.chatbot_da) throw DataError(who + field_path(i, "chatbot_da") + ": set on a user utterance");
        if (u.is_chatbot() && u.user_da) throw DataError(who + field_path(i, "user_da") + ": set on a chatbot utterance");
        if (u.is_user() && u.gold_label) throw DataError(who + field_path(i, "gold_label") + ": set on a user utterance");
        any_chatbot = any_chatbot || u.is_chatbot();
    }
    if (!any_chatbot) throw DataError(who + "utterances: contains no chatbot utterance");
    const auto& first = d.utterances.front();
    if (!first.is_chatbot() || !text::ends_with_question_mark(first.text)) {
        warnings.push_back(who + "first utterance is not the chatbot's interview question");
    }
    return warnings;
}

std::vector<Dialogue> parse_transcripts(std::string_view content, bool strict, LoadReport* report) {
    LoadReport local;
    LoadReport& rep = report ? *report : local;
    std::vector<Dialogue> out;
    std::set<std::string> seen;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        auto nl = content.find('\n', pos);
        if (nl == std::string_view::npos) nl = content.size();
        std::string_view line = content.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

        const std::string where = "line " + std::to_string(line_no);
        std::optional<Dialogue> parsed;
        std::vector<std::string> warnings;
        try {
            auto rec = json::parse(line);
            parsed = parse_record(rec, warnings);
            auto w = validate(*parsed);
            warnings.insert(warnings.end(), w.begin(), w.end());
        } catch (const json::exception& e) {
            if (strict) throw DataError(where + ": malformed JSON: " + e.what());
            ++rep.skipped;
            continue;
        } catch (const RecordError& e) {
            if (strict) throw DataError(where + ": field '" + e.field + "': " + e.message);
            ++rep.skipped;
            continue;
        } catch (const DataError& e) {
            if (strict) throw DataError(where + ": " + e.what());
            ++rep.skipped;
            continue;
        }
        if (!seen.insert(parsed->id).second) {
            throw DataError(where + ": duplicate dialogue id '" + parsed->id + "'");
        }
        for (auto& w : warnings) rep.warnings.push_back(where + ": " + w);
        out.push_back(std::move(*parsed));
    }
    return out;
}

std::vector<Dialogue> load_transcripts(const std::filesystem::path& path, bool strict, LoadReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open transcript file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_transcripts(ss.str(), strict, report);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string serialize_transcripts(const std::vector<Dialogue>& dialogues) {
    std::string out;
    for (const auto& d : dialogues) {
        out += to_json(d).dump();
        out.push_back('\n');
    }
    return out;
}

void write_transcripts(const std::vector<Dialogue>& dialogues, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot write transcript file " + path.string());
    os << serialize_transcripts(dialogues);
    if (!os) throw DataError("write failed: " + path.string());
}

} // namespace chatda
