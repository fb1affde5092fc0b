// Seeded synthetic interview corpus. Each dialogue opens with a registered
// topic question, followed by user turns whose DA is sampled conditionally on
// whether the chatbot's last utterance was a question, each answered by a
// chatbot reply whose DA is either compatible with the user DA or (planted)
// deliberately incompatible.

#include "chatda/rng.hpp"
#include "chatda/taxonomy.hpp"
#include "chatda/text.hpp"
#include "chatda/transcript.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace chatda {
namespace {

using Bank = std::vector<std::string_view>;

const std::map<std::string_view, Bank>& relevant_answers() {
    static const std::map<std::string_view, Bank> bank = {
        {"q1",
         {"I like swimming", "dance", "I enjoy hiking on weekends", "Reading books and playing guitar",
          "I love cooking and travel", "Mostly sports and music", "Painting in my free time",
          "I like playing games with friends for fun", "Running and photography are my hobbies",
          "I love watching movies and reading"}},
        {"q2",
         {"I am a student at the university", "I work as a software engineer", "I'm a nurse at a hospital",
          "I teach at a local school", "I run a small business", "I'm retired now",
          "I work in an office as a manager", "I'm studying to be a doctor", "I work in sales for a big company",
          "I'm an accountant and I help clients with taxes"}},
        {"q3",
         {"I am loyal and honest", "I'm a good listener", "My friends say I'm caring and supportive",
          "I am funny and reliable", "Trust and loyalty", "I'm patient and always there to help",
          "I'm generous and kind to my friends", "Honesty is my best quality as a friend",
          "I always listen and care about my friends"}},
        {"q4",
         {"When I failed an exam I studied harder", "Losing my job was hard but my family helped",
          "I moved to a new country and it was tough", "My mom was sick and I had to support the family",
          "I struggled with stress at work and asked for help",
          "College was difficult but I never gave up", "I lost my job and worked hard to overcome it"}},
    };
    return bank;
}

const std::map<UserDA, Bank>& user_bank() {
    static const std::map<UserDA, Bank> bank = {
        {UserDA::RespondIrrelevant,
         {"The weather is nice today.", "My cat is sleeping.", "I felt lonely sometimes.",
          "Pizza is better than pasta.", "My phone battery died yesterday.", "Blue is my favorite color.",
          "The sky is very cloudy outside."}},
        {UserDA::QuestionRelevant, {"Why are you asking?", "What do you mean?", "Why do you ask?"}},
        {UserDA::QuestionIrrelevant,
         {"What are your capabilities?", "How are you feeling?", "Are you a robot?", "How old are you?",
          "Who created you?", "Where are you from?"}},
        {UserDA::Excuses,
         {"This is personal.", "I'd rather not say.", "I don't want to talk about it.",
          "I prefer not to answer that.", "I have no idea."}},
        {UserDA::Acknowledge, {"Got it!", "Okay.", "I see.", "Alright.", "Sure.", "Uh huh."}},
        {UserDA::Request,
         {"Tell me a joke.", "Sing me a song.", "Show me a picture of a cat.", "Give me some advice.",
          "Recommend a good movie."}},
        {UserDA::Command,
         {"Next question.", "Skip this one.", "Move on please.", "Let's move on.", "Go to the next question."}},
        {UserDA::Complain,
         {"You didn't listen. I just answered it.", "This is boring.", "You are not listening to me.",
          "I already answered that.", "That doesn't make sense."}},
        {UserDA::SocialObligations, {"Thank you!", "Thanks!", "Sorry about that.", "Hello!", "Goodbye!"}},
        {UserDA::Gibberish, {"blea blahe", "5", "asdfgh jklq", "qwrtp zxcvb", "...", "42", "hjkl fdsq"}},
        {UserDA::Other, {"Wow.", "Interesting.", "Cool.", "Awesome."}},
    };
    return bank;
}

const std::map<ChatbotDA, Bank>& chatbot_bank() {
    static const std::map<ChatbotDA, Bank> bank = {
        {ChatbotDA::RespondRelevant,
         {"Thanks for sharing. That sounds wonderful.", "That sounds like a lot of fun!",
          "That's great to hear.", "Impressive, thanks for sharing that.",
          "Thanks for sharing. I'm sorry you had to go through that."}},
        {ChatbotDA::Acknowledge, {"Okay.", "I see.", "Got it.", "Alright.", "Noted."}},
        {ChatbotDA::AskFollowup,
         {"Do you mind saying a bit more?", "Could you tell me more about that?", "Can you elaborate a little?"}},
        {ChatbotDA::HandleQuestionIrrelevant,
         {"Thank you for asking. I feel great!", "I'm just a chatbot, but I'm happy to chat.",
          "Good question! I am a chatbot here to learn about you."}},
        {ChatbotDA::HandleExcuses,
         {"I understand. We'll continue then.", "No problem, we can skip that one.",
          "That's totally fine, you don't have to share."}},
        {ChatbotDA::HandleRequest,
         {"Why was the math book sad? Because it had too many problems.", "I wish I could... but I have no feet :-)",
          "Here is a song: la la la!", "I can't show pictures, but cats are adorable."}},
        {ChatbotDA::HandleCommand,
         {"That's okay. Let's move on then.", "Sure, moving on to the next one.", "Okay, skipping ahead."}},
        {ChatbotDA::EchoRespondIrrelevant,
         {"If you need urgent help, please call 911 or your doctor directly. I'd love to cheer you up if I could.",
          "Interesting! Let's get back to the question, though.", "That's a fun fact about you."}},
        {ChatbotDA::HandleComplain,
         {"Sorry, I must have missed it.", "My apologies, I will listen more carefully.",
          "Sorry about that, let me try to do better."}},
        {ChatbotDA::SocialObligations, {"You're most welcome!", "My pleasure!", "Goodbye, and thanks for chatting!"}},
        {ChatbotDA::DefaultFallback,
         {"My bad, I didn't recognize your inputs. Let's try again.", "Hmm, I didn't catch that. Let's try again.",
          "I'm not sure I follow. Could you rephrase?"}},
        {ChatbotDA::HandleGibberish,
         {"Sorry I didn't understand. Please use English.", "I couldn't understand that. Please use English words.",
          "That doesn't look like English. Please try again."}},
    };
    return bank;
}

struct Weighted {
    UserDA da;
    double weight;
};

// User DA distributions conditioned on the chatbot's previous utterance.
const std::vector<Weighted> kAfterQuestion = {
    {UserDA::AnswerRelevant, 0.42}, {UserDA::RespondIrrelevant, 0.08}, {UserDA::QuestionRelevant, 0.06},
    {UserDA::QuestionIrrelevant, 0.06}, {UserDA::Excuses, 0.07}, {UserDA::Command, 0.06},
    {UserDA::Complain, 0.03}, {UserDA::Gibberish, 0.08}, {UserDA::Other, 0.04},
};

const std::vector<Weighted> kAfterStatement = {
    {UserDA::Acknowledge, 0.24}, {UserDA::Request, 0.20}, {UserDA::SocialObligations, 0.18},
    {UserDA::QuestionIrrelevant, 0.12}, {UserDA::Complain, 0.08}, {UserDA::Gibberish, 0.06},
    {UserDA::Other, 0.12},
};

UserDA sample_user_da(SplitMix64& rng, bool after_question) {
    const auto& table = after_question ? kAfterQuestion : kAfterStatement;
    double total = 0.0;
    for (const auto& w : table) total += w.weight;
    double x = rng.uniform() * total;
    for (const auto& w : table) {
        if (x < w.weight) return w.da;
        x -= w.weight;
    }
    return table.back().da;
}

template <typename T>
const T& pick(SplitMix64& rng, const std::vector<T>& v) {
    return v[static_cast<std::size_t>(rng.below(v.size()))];
}

class DialogueBuilder {
public:
    DialogueBuilder(std::string id, const RegisteredTopic& topic) {
        d_.id = std::move(id);
        d_.topic = topic.ref();
    }

    void chatbot(std::string text, ChatbotDA da, Appropriateness label) {
        Utterance u;
        u.speaker = Speaker::Chatbot;
        u.text = std::move(text);
        u.chatbot_da = da;
        u.gold_label = label;
        push(std::move(u));
    }

    void user(std::string text, UserDA da) {
        Utterance u;
        u.speaker = Speaker::User;
        u.text = std::move(text);
        u.user_da = da;
        push(std::move(u));
    }

    bool used(std::string_view text) const {
        return std::any_of(d_.utterances.begin(), d_.utterances.end(),
                           [&](const Utterance& u) { return u.is_chatbot() && u.text == text; });
    }

    Dialogue take() { return std::move(d_); }

private:
    void push(Utterance u) {
        u.turn_index = d_.utterances.size();
        d_.utterances.push_back(std::move(u));
    }

    Dialogue d_;
};

// Chatbot texts that are unused in this dialogue and not too close to any
// earlier chatbot utterance, so the repeat detector only fires on planted repeats.
std::string_view pick_chatbot_text(SplitMix64& rng, const DialogueBuilder& b, ChatbotDA da,
                                   const std::vector<std::string>& earlier) {
    const auto& texts = chatbot_bank().at(da);
    std::vector<std::string_view> fresh;
    for (auto t : texts) {
        if (b.used(t)) continue;
        const auto nt = text::normalize(t);
        bool close = std::any_of(earlier.begin(), earlier.end(),
                                 [&](const std::string& e) { return text::edit_similarity(nt, e) >= 0.8; });
        if (!close) fresh.push_back(t);
    }
    if (fresh.empty()) return pick(rng, texts);
    return pick(rng, fresh);
}

std::vector<ChatbotDA> compatible_replies(UserDA user, const CompatibilityMatrix& m) {
    if (user == UserDA::Other) {
        return {ChatbotDA::Acknowledge, ChatbotDA::RespondRelevant, ChatbotDA::AskFollowup};
    }
    return m.expected(user);
}

std::vector<ChatbotDA> incompatible_replies(UserDA user, const CompatibilityMatrix& m) {
    std::vector<ChatbotDA> out;
    for (auto da : all_chatbot_das()) {
        if (da == ChatbotDA::Other) continue;
        if (!is_compatible(user, da, m)) out.push_back(da);
    }
    return out;
}

} // namespace

std::vector<Dialogue> generate_corpus(const GenSpec& spec) {
    const auto& matrix = default_ruleset().compatibility;
    const double rate = std::clamp(spec.mismatch_rate, 0.0, 1.0);
    SplitMix64 rng(derive_seed(spec.seed, 0));

    std::vector<Dialogue> out;
    out.reserve(spec.n_dialogues);
    std::size_t chatbot_total = 0;
    std::size_t planted_total = 0;

    for (std::size_t n = 0; n < spec.n_dialogues; ++n) {
        const auto topics = registered_topics();
        const auto& topic = topics[static_cast<std::size_t>(rng.below(topics.size()))];
        char id[64];
        std::snprintf(id, sizeof id, "gen-%llu-%05zu", static_cast<unsigned long long>(spec.seed), n);
        DialogueBuilder b(id, topic);
        std::vector<std::string> earlier_chatbot;

        const std::string question(topic.question_text);
        b.chatbot(question, ChatbotDA::Other, Appropriateness::Neutral);
        earlier_chatbot.push_back(text::normalize(question));
        ++chatbot_total;

        bool after_question = true;
        const std::size_t exchanges = 1 + static_cast<std::size_t>(rng.below(4));
        for (std::size_t e = 0; e < exchanges; ++e) {
            const UserDA user_da = sample_user_da(rng, after_question);
            if (user_da == UserDA::AnswerRelevant) {
                b.user(std::string(pick(rng, relevant_answers().at(topic.topic_id))), user_da);
            } else {
                b.user(std::string(pick(rng, user_bank().at(user_da))), user_da);
            }

            // Plant with the probability that keeps the running planted fraction on target.
            bool plant = false;
            if (user_da != UserDA::Other) {
                const double target = rate * static_cast<double>(chatbot_total + 1);
                const double p = std::clamp(target - static_cast<double>(planted_total), 0.0, 1.0);
                plant = rng.uniform() < p;
            }

            const auto choices = plant ? incompatible_replies(user_da, matrix) : compatible_replies(user_da, matrix);
            const ChatbotDA reply = pick(rng, choices);
            std::string reply_text = reply == ChatbotDA::Repeat
                                         ? question
                                         : std::string(pick_chatbot_text(rng, b, reply, earlier_chatbot));
            Appropriateness label = Appropriateness::Appropriate;
            if (plant) label = Appropriateness::Inappropriate;
            else if (reply == ChatbotDA::Acknowledge) label = Appropriateness::Neutral;

            after_question = text::ends_with_question_mark(reply_text);
            earlier_chatbot.push_back(text::normalize(reply_text));
            b.chatbot(std::move(reply_text), reply, label);
            ++chatbot_total;
            planted_total += plant ? 1 : 0;

            // Interview chatbots often chain a follow-up question after accepting an answer.
            if (!plant && user_da == UserDA::AnswerRelevant && !after_question && rng.uniform() < 0.3) {
                std::string follow(pick_chatbot_text(rng, b, ChatbotDA::AskFollowup, earlier_chatbot));
                earlier_chatbot.push_back(text::normalize(follow));
                b.chatbot(std::move(follow), ChatbotDA::AskFollowup, Appropriateness::Appropriate);
                ++chatbot_total;
                after_question = true;
            }
        }
        out.push_back(b.take());
    }
    return out;
}

} // namespace chatda
