#pragma once

#include "chatda/transcript.hpp"

#include <string>
#include <utility>
#include <vector>

namespace testutil {

struct Turn {
    chatda::Speaker speaker;
    std::string text;
};

inline Turn bot(std::string t) { return {chatda::Speaker::Chatbot, std::move(t)}; }
inline Turn user(std::string t) { return {chatda::Speaker::User, std::move(t)}; }

inline chatda::Dialogue dialogue(std::string id, const std::string& topic_id, const std::vector<Turn>& turns) {
    chatda::Dialogue d;
    d.id = std::move(id);
    const auto* topic = chatda::find_topic(topic_id);
    // Unregistered ids are treated as the question text of a custom topic.
    d.topic = topic ? topic->ref() : chatda::TopicRef{"custom", topic_id};
    for (std::size_t i = 0; i < turns.size(); ++i) {
        chatda::Utterance u;
        u.speaker = turns[i].speaker;
        u.text = turns[i].text;
        u.turn_index = i;
        d.utterances.push_back(u);
    }
    return d;
}

} // namespace testutil
