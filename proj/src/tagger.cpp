#include "chatda/tagger.hpp"

#include "chatda/resources.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <thread>

namespace chatda {
namespace {

constexpr std::array<std::string_view, 8> kWhWords = {"what", "why", "how", "where", "when", "who", "which", "whose"};

text::Lexicon bundled_lexicon(std::string_view name) {
    auto content = resources::lexicon(name);
    if (!content) throw Error("bundled lexicon missing: " + std::string(name));
    return text::Lexicon::parse(*content);
}

std::string handler_file(ChatbotDA da) { return "handler_" + std::string(to_string(da)); }

template <typename Fn>
TaggerLexicons build_lexicons(Fn&& get) {
    TaggerLexicons lex;
    lex.english_words = get("english_words");
    lex.imperative = get("imperative_verbs");
    lex.thanking = get("thanking");
    lex.apology = get("apology");
    lex.greeting = get("greeting");
    lex.complaint = get("complaint");
    lex.excuse = get("excuse");
    lex.agreement = get("agreement");
    lex.backchannel = get("backchannel");
    lex.appreciation = get("appreciation");
    lex.fallback_phrases = get("fallback_phrases");
    lex.acknowledgments = get("acknowledgments");
    for (auto da : handler_order()) lex.handlers[index_of(da)] = get(handler_file(da));
    return lex;
}

// The final sentence of an utterance.
std::string_view last_sentence(std::string_view s) {
    auto end = s.find_last_not_of(" \t\r\n?!.");
    if (end == std::string_view::npos) return s;
    auto boundary = s.find_last_of(".!?", end);
    return boundary == std::string_view::npos ? s : s.substr(boundary + 1);
}

// First token of the last sentence, so "I like swimming. What are your
// capabilities?" is read as a wh-question.
std::string last_sentence_head(std::string_view s) {
    auto toks = text::tokenize(last_sentence(s));
    return toks.empty() ? std::string{} : toks.front();
}

bool is_question_tag(SwdaTag t) {
    const auto name = to_string(t);
    return name.size() >= 2 && name[0] == 'q';
}

bool has_letter(std::string_view tok) {
    return std::any_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isalpha(c) || c >= 0x80; });
}

std::optional<std::size_t> previous_user(const Dialogue& d, std::size_t turn) {
    for (std::size_t i = turn; i-- > 0;) {
        if (d.utterances[i].is_user()) return i;
    }
    return std::nullopt;
}

} // namespace

void TaggerConfig::validate() const {
    auto check = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) throw UsageError(std::string("tagger config: ") + name + " must be in [0, 1]");
    };
    check(gibberish_nonalpha_threshold, "gibberish_nonalpha_threshold");
    check(gibberish_oov_threshold, "gibberish_oov_threshold");
    check(relevance_threshold, "relevance_threshold");
    check(repeat_similarity_threshold, "repeat_similarity_threshold");
}

std::vector<ChatbotDA> handler_order() {
    return {ChatbotDA::HandleGibberish,       ChatbotDA::HandleComplain,
            ChatbotDA::HandleExcuses,         ChatbotDA::HandleCommand,
            ChatbotDA::HandleRequest,         ChatbotDA::HandleQuestionIrrelevant,
            ChatbotDA::EchoRespondIrrelevant, ChatbotDA::SocialObligations,
            ChatbotDA::RespondRelevant,       ChatbotDA::AskFollowup};
}

const TaggerLexicons& TaggerLexicons::bundled() {
    static const TaggerLexicons lex = build_lexicons(bundled_lexicon);
    return lex;
}

TaggerLexicons TaggerLexicons::load(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw DataError("lexicon directory not found: " + dir.string());
    return build_lexicons([&](std::string_view name) {
        auto path = dir / (std::string(name) + ".txt");
        return std::filesystem::exists(path) ? text::Lexicon::load(path) : bundled_lexicon(name);
    });
}

std::vector<std::string> TaggerLexicons::file_names() {
    std::vector<std::string> names = {"english_words", "imperative_verbs", "thanking",  "apology",
                                      "greeting",      "complaint",        "excuse",    "agreement",
                                      "backchannel",   "appreciation",     "fallback_phrases",
                                      "acknowledgments"};
    for (auto da : handler_order()) names.push_back(handler_file(da));
    for (auto& n : names) n += ".txt";
    return names;
}

GibberishCheck check_gibberish(std::string_view utterance_text, const TaggerConfig& config,
                               const TaggerLexicons& lex) {
    GibberishCheck out;
    std::size_t visible = 0, nonalpha = 0;
    for (unsigned char c : utterance_text) {
        if (std::isspace(c)) continue;
        ++visible;
        if (!(std::isalpha(c) || c >= 0x80)) ++nonalpha;
    }
    if (visible > 0) out.nonalpha_fraction = static_cast<double>(nonalpha) / static_cast<double>(visible);

    std::size_t words = 0, oov = 0;
    for (const auto& tok : text::tokenize(utterance_text)) {
        if (!has_letter(tok)) continue;
        ++words;
        if (!lex.english_words.contains(tok)) ++oov;
    }
    if (words > 0) out.oov_fraction = static_cast<double>(oov) / static_cast<double>(words);

    out.is_gibberish = visible > 0 && (out.nonalpha_fraction >= config.gibberish_nonalpha_threshold ||
                                       (words > 0 && out.oov_fraction >= config.gibberish_oov_threshold));
    return out;
}

SwdaTag tag_stage1(const Utterance& utterance, const Dialogue& dialogue, const TaggerConfig& config,
                   const TaggerLexicons& lex) {
    if (config.mode == TaggerMode::PreTagged) {
        if (!utterance.swda_tag) {
            throw DataError("dialogue " + dialogue.id + ": utterances[" + std::to_string(utterance.turn_index) +
                            "]: pretagged mode requires swda_tag");
        }
        return *utterance.swda_tag;
    }

    const std::string_view raw = utterance.text;
    if (raw.find_first_not_of(" \t\r\n") == std::string_view::npos) return SwdaTag::NonVerbal;
    if (check_gibberish(raw, config, lex).is_gibberish) return SwdaTag::Abandoned;

    if (text::ends_with_question_mark(raw)) {
        const auto head = last_sentence_head(raw);
        const bool wh = std::find(kWhWords.begin(), kWhWords.end(), head) != kWhWords.end();
        return wh ? SwdaTag::WhQuestion : SwdaTag::YesNoQuestion;
    }

    const auto norm = text::normalize(raw);
    if (lex.imperative.matches_prefix(norm)) return SwdaTag::ActionDirective;
    if (lex.thanking.matches_phrase(norm)) return SwdaTag::Thanking;
    if (lex.apology.matches_phrase(norm)) return SwdaTag::Apology;
    if (lex.greeting.matches_phrase(norm)) return SwdaTag::ConventionalClosing;
    if (lex.complaint.matches_phrase(norm)) return SwdaTag::Reject;
    if (lex.excuse.matches_phrase(norm)) return SwdaTag::Hold;
    if (lex.agreement.contains(norm)) return SwdaTag::AgreeAccept;
    if (lex.backchannel.contains(norm)) return SwdaTag::Backchannel;
    if (lex.appreciation.contains(norm)) return SwdaTag::Appreciation;
    return SwdaTag::StatementNonOpinion;
}

Position user_position(const Dialogue& dialogue, std::size_t turn_index) {
    for (std::size_t i = turn_index; i-- > 0;) {
        const auto& u = dialogue.utterances[i];
        if (u.is_chatbot()) {
            return text::ends_with_question_mark(u.text) ? Position::AfterQuestion : Position::AfterStatement;
        }
    }
    return Position::AfterStatement;
}

text::TermCounts topic_vector(const TopicRef& topic) {
    auto v = text::count_terms(text::tokenize(topic.question_text), true);
    if (const auto* reg = find_topic(topic.topic_id)) {
        for (auto kw : reg->seed_keywords) v[std::string(kw)] += 1.0;
    }
    for (auto kw : interview_meta_keywords()) v[std::string(kw)] += 1.0;
    return v;
}

RelevanceResult score_relevance(std::string_view utterance_text, const TopicRef& topic, const Dialogue& dialogue,
                                std::size_t turn_index, const TaggerConfig& config) {
    RelevanceResult out;
    const bool reply_to_question =
        turn_index < dialogue.utterances.size() && user_position(dialogue, turn_index) == Position::AfterQuestion;

    auto topic_vec = topic_vector(topic);
    // Earlier on-topic answers extend the topic vector.
    const std::size_t limit = std::min(turn_index, dialogue.utterances.size());
    for (std::size_t i = 0; i < limit; ++i) {
        const auto& u = dialogue.utterances[i];
        if (!u.is_user() || user_position(dialogue, i) != Position::AfterQuestion) continue;
        auto uv = text::count_terms(text::tokenize(u.text), true);
        if (text::cosine(uv, topic_vec) >= config.relevance_threshold) text::add_terms(topic_vec, uv);
    }

    out.score = text::cosine(text::count_terms(text::tokenize(utterance_text), true), topic_vec);
    if (!reply_to_question) {
        out.relevance = Relevance::NotApplicable;
    } else {
        out.relevance = out.score >= config.relevance_threshold ? Relevance::Relevant : Relevance::Irrelevant;
    }
    return out;
}

Dialogue annotate_user_das(const Dialogue& dialogue, const std::vector<MappingRule>& rules,
                           const TaggerConfig& config, const TaggerLexicons& lex) {
    Dialogue out = dialogue;
    for (auto& u : out.utterances) {
        if (!u.is_user() || u.user_da) continue;
        const SwdaTag tag = tag_stage1(u, dialogue, config, lex);
        // A trailing question is judged on its own: "I like swimming. What are
        // your capabilities?" asks something off-topic.
        const std::string_view scored = is_question_tag(tag) ? last_sentence(u.text) : std::string_view(u.text);
        const auto rel = score_relevance(scored, dialogue.topic, dialogue, u.turn_index, config);
        const auto pos = user_position(dialogue, u.turn_index);
        u.user_da = apply_mapping(tag, rel.relevance, pos, rules);
        if (!u.swda_tag) u.swda_tag = tag;
    }
    return out;
}

Dialogue annotate_chatbot_das(const Dialogue& dialogue, const TaggerConfig& config, const TaggerLexicons& lex) {
    Dialogue out = dialogue;
    for (auto& u : out.utterances) {
        if (!u.is_chatbot() || u.chatbot_da) continue;
        const auto norm = text::normalize(u.text);
        const auto turn = u.turn_index;

        bool repeat = false;
        for (std::size_t i = 0; i < turn && !repeat; ++i) {
            const auto& prev = dialogue.utterances[i];
            if (prev.is_chatbot()) {
                repeat = text::edit_similarity(norm, text::normalize(prev.text)) >= config.repeat_similarity_threshold;
            }
        }
        if (repeat) {
            u.chatbot_da = ChatbotDA::Repeat;
            continue;
        }
        if (lex.fallback_phrases.matches_phrase(norm)) {
            u.chatbot_da = ChatbotDA::DefaultFallback;
            continue;
        }
        if (text::ends_with_question_mark(u.text)) {
            auto pu = previous_user(out, turn);
            if (pu && out.utterances[*pu].user_da == UserDA::AnswerRelevant) {
                u.chatbot_da = ChatbotDA::AskFollowup;
                continue;
            }
        }
        if (lex.acknowledgments.contains(norm)) {
            u.chatbot_da = ChatbotDA::Acknowledge;
            continue;
        }
        for (auto da : handler_order()) {
            if (lex.handlers[index_of(da)].matches_phrase(norm)) {
                u.chatbot_da = da;
                break;
            }
        }
        if (!u.chatbot_da) u.chatbot_da = ChatbotDA::Other;
    }
    return out;
}

Dialogue annotate(const Dialogue& dialogue, const Ruleset& ruleset, const TaggerConfig& config,
                  const TaggerLexicons& lex) {
    return annotate_chatbot_das(annotate_user_das(dialogue, ruleset.rules, config, lex), config, lex);
}

std::vector<Dialogue> annotate_all(const std::vector<Dialogue>& dialogues, const Ruleset& ruleset,
                                   const TaggerConfig& config, const TaggerLexicons& lex, unsigned threads) {
    std::vector<Dialogue> out(dialogues.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, dialogues.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < dialogues.size(); ++i) out[i] = annotate(dialogues[i], ruleset, config, lex);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < dialogues.size(); i += workers) {
                        out[i] = annotate(dialogues[i], ruleset, config, lex);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

Dialogue strip_das(const Dialogue& dialogue, bool keep_swda_tags) {
    Dialogue out = dialogue;
    for (auto& u : out.utterances) {
        u.user_da.reset();
        u.chatbot_da.reset();
        if (!keep_swda_tags) u.swda_tag.reset();
    }
    return out;
}

bool is_fully_annotated(const Dialogue& dialogue) {
    return std::all_of(dialogue.utterances.begin(), dialogue.utterances.end(), [](const Utterance& u) {
        return u.is_user() ? u.user_da.has_value() : u.chatbot_da.has_value();
    });
}

} // namespace chatda
