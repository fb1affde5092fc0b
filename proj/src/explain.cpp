#include "chatda/explain.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace chatda {
namespace {

using nlohmann::ordered_json;

constexpr std::string_view kNoUser = "(no user turn)";

std::string join_das(const std::vector<ChatbotDA>& das) {
    std::string out;
    for (std::size_t i = 0; i < das.size(); ++i) {
        if (i) out += ", ";
        out += to_string(das[i]);
    }
    return out;
}

std::string narrative_for(const Explanation& e) {
    const std::string bot(to_string(e.target_da));
    if (!e.user_da) {
        return "no user context: " + bot + " comes before any user turn, so there is no exchange pair to check.";
    }
    const std::string user(to_string(*e.user_da));
    if (e.compatible) {
        return bot + " is a compatible reply to " + user +
               "; the flag comes from the wider context (surrounding DAs, position or wording).";
    }
    return "The user turn was " + user + " but the chatbot answered with " + bot + ". A " + user +
           " turn expects one of: " + join_das(e.expected_das) + ".";
}

std::string votes_text(const ClassCounts& v) {
    return std::to_string(v[0]) + "/" + std::to_string(v[1]) + "/" + std::to_string(v[2]);
}

ordered_json explanation_json(const Explanation& e) {
    ordered_json j;
    j["dialogue_id"] = e.dialogue_id;
    j["turn_index"] = e.turn_index;
    j["predicted_label"] = to_string(e.predicted);
    j["votes"] = {{"inappropriate", e.votes[0]}, {"neutral", e.votes[1]}, {"appropriate", e.votes[2]}};
    j["margin"] = e.margin;
    j["target_chatbot_da"] = to_string(e.target_da);
    j["preceding_user_da"] = e.user_da ? ordered_json(to_string(*e.user_da)) : ordered_json(nullptr);
    j["exchange_pair"] = {e.user_da ? ordered_json(to_string(*e.user_da)) : ordered_json(nullptr),
                          to_string(e.target_da)};
    j["compatible"] = e.compatible;
    auto expected = ordered_json::array();
    for (auto d : e.expected_das) expected.push_back(to_string(d));
    j["expected_das"] = std::move(expected);
    auto ctx = ordered_json::array();
    for (const auto& c : e.context) {
        ctx.push_back({{"turn_index", c.turn_index},
                       {"speaker", to_string(c.speaker)},
                       {"text", c.text},
                       {"da", c.da},
                       {"target", c.is_target}});
    }
    j["context"] = std::move(ctx);
    j["narrative"] = e.narrative;
    if (!e.decision_path.empty()) j["decision_path"] = e.decision_path;
    return j;
}

std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace

std::string Explanation::pair_name() const {
    return (user_da ? std::string(to_string(*user_da)) : std::string(kNoUser)) + " / " +
           std::string(to_string(target_da));
}

Explanation explain_response(const Dialogue& dialogue, std::size_t target_index, const Prediction& prediction,
                             const CompatibilityMatrix& matrix, std::size_t window) {
    const auto& utts = dialogue.utterances;
    if (target_index >= utts.size() || !utts[target_index].is_chatbot()) {
        throw DataError("dialogue " + dialogue.id + ": turn " + std::to_string(target_index) + " is not a chatbot turn");
    }
    const auto& target = utts[target_index];
    if (!target.chatbot_da) {
        throw DataError("dialogue " + dialogue.id + ": turn " + std::to_string(target_index) + " has no chatbot_da");
    }

    Explanation e;
    e.dialogue_id = dialogue.id;
    e.turn_index = target_index;
    e.predicted = prediction.label;
    e.votes = prediction.votes;
    e.margin = prediction.margin();
    e.target_da = *target.chatbot_da;

    for (std::size_t i = target_index; i-- > 0;) {
        if (!utts[i].is_user()) continue;
        if (!utts[i].user_da) {
            throw DataError("dialogue " + dialogue.id + ": turn " + std::to_string(i) + " has no user_da");
        }
        e.user_da = *utts[i].user_da;
        break;
    }
    if (e.user_da) {
        e.compatible = is_compatible(*e.user_da, e.target_da, matrix);
        e.expected_das = matrix.expected(*e.user_da);
    }

    const std::size_t lo = target_index >= window ? target_index - window : 0;
    const std::size_t hi = std::min(utts.size(), target_index + window + 1);
    for (std::size_t i = lo; i < hi; ++i) {
        const auto& u = utts[i];
        ContextLine line{i, u.speaker, u.text, "", i == target_index};
        if (u.is_user() && u.user_da) line.da = to_string(*u.user_da);
        if (u.is_chatbot() && u.chatbot_da) line.da = to_string(*u.chatbot_da);
        e.context.push_back(std::move(line));
    }
    e.narrative = narrative_for(e);
    return e;
}

void attach_decision_path(Explanation& e, const ForestModel& model, const FeatureVector& vector,
                          const FeatureSchema& schema) {
    const auto& names = schema.column_names();
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        const auto path = decision_path(model.trees[t], vector);
        if (majority(path.leaf_counts) != e.predicted) continue;
        e.decision_path.clear();
        e.decision_path.push_back("tree " + std::to_string(t));
        for (const auto& s : path.steps) {
            const std::string name = s.feature < names.size() ? names[s.feature] : "f" + std::to_string(s.feature);
            e.decision_path.push_back(name + " = " + fmt_num(s.value) + (s.went_left ? " <= " : " > ") +
                                      fmt_num(s.threshold));
        }
        e.decision_path.push_back("leaf counts " + votes_text(path.leaf_counts));
        return;
    }
}

std::vector<ReportGroup> group_explanations(const std::vector<Explanation>& explanations) {
    std::map<std::string, ReportGroup> by_pair;
    for (const auto& e : explanations) {
        if (e.predicted != Appropriateness::Inappropriate) continue;
        auto& g = by_pair[e.pair_name()];
        g.user_da = e.user_da;
        g.chatbot_da = e.target_da;
        g.members.push_back(&e);
    }
    std::vector<std::pair<std::string, ReportGroup>> ranked(by_pair.begin(), by_pair.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.members.size() != b.second.members.size()) return a.second.members.size() > b.second.members.size();
        return a.first < b.first;
    });
    std::vector<ReportGroup> out;
    for (auto& [name, g] : ranked) out.push_back(std::move(g));
    return out;
}

std::string build_report(const std::vector<Dialogue>& dialogues, const std::vector<ResponsePrediction>& predictions,
                         const std::vector<Explanation>& explanations, ReportFormat format,
                         std::size_t examples_per_group) {
    std::set<std::pair<std::string, std::size_t>> predicted_keys;
    for (const auto& p : predictions) predicted_keys.emplace(p.dialogue_id, p.turn_index);
    for (const auto& d : dialogues) {
        for (std::size_t i = 0; i < d.utterances.size(); ++i) {
            if (d.utterances[i].is_chatbot() && !predicted_keys.count({d.id, i})) {
                throw DataError("report: no prediction for " + d.id + " turn " + std::to_string(i));
            }
        }
    }
    std::map<std::pair<std::string, std::size_t>, int> explained;
    for (const auto& e : explanations) {
        if (e.predicted == Appropriateness::Inappropriate) ++explained[{e.dialogue_id, e.turn_index}];
    }
    std::size_t flagged = 0;
    ClassCounts by_label{};
    for (const auto& p : predictions) {
        ++by_label[index_of(p.prediction.label)];
        if (p.prediction.label != Appropriateness::Inappropriate) continue;
        ++flagged;
        const auto it = explained.find({p.dialogue_id, p.turn_index});
        if (it == explained.end() || it->second != 1) {
            throw DataError("report: flagged response " + p.dialogue_id + " turn " + std::to_string(p.turn_index) +
                            " needs exactly one explanation");
        }
    }

    const auto groups = group_explanations(explanations);
    std::size_t incompatible = 0;
    for (const auto& e : explanations) {
        if (e.predicted == Appropriateness::Inappropriate && !e.compatible) ++incompatible;
    }

    if (format == ReportFormat::Json) {
        ordered_json j;
        ordered_json summary;
        summary["responses"] = predictions.size();
        summary["flagged"] = flagged;
        summary["flagged_incompatible"] = incompatible;
        summary["by_label"] = {{"inappropriate", by_label[0]}, {"neutral", by_label[1]}, {"appropriate", by_label[2]}};
        auto pairs = ordered_json::array();
        for (const auto& g : groups) {
            pairs.push_back({{"user_da", g.user_da ? ordered_json(to_string(*g.user_da)) : ordered_json(nullptr)},
                             {"chatbot_da", to_string(g.chatbot_da)},
                             {"count", g.members.size()}});
        }
        summary["by_pair"] = std::move(pairs);
        j["summary"] = std::move(summary);
        auto jg = ordered_json::array();
        for (const auto& g : groups) {
            ordered_json group;
            group["user_da"] = g.user_da ? ordered_json(to_string(*g.user_da)) : ordered_json(nullptr);
            group["chatbot_da"] = to_string(g.chatbot_da);
            group["count"] = g.members.size();
            group["compatible"] = g.members.front()->compatible;
            auto ex = ordered_json::array();
            for (std::size_t i = 0; i < g.members.size() && i < examples_per_group; ++i) {
                ex.push_back(explanation_json(*g.members[i]));
            }
            group["examples"] = std::move(ex);
            jg.push_back(std::move(group));
        }
        j["groups"] = std::move(jg);
        return j.dump(2) + "\n";
    }

    std::ostringstream os;
    os << "# Inappropriate response report\n\n";
    os << "flagged " << flagged << " of " << predictions.size() << " responses";
    os << " (" << incompatible << " with an incompatible exchange pair)\n\n";
    os << "| predicted | count |\n|---|---|\n";
    for (auto c : kAllClasses) os << "| " << to_string(c) << " | " << by_label[index_of(c)] << " |\n";
    if (groups.empty()) return os.str();

    os << "\n| user DA | chatbot DA | count |\n|---|---|---|\n";
    for (const auto& g : groups) {
        os << "| " << (g.user_da ? to_string(*g.user_da) : kNoUser) << " | " << to_string(g.chatbot_da) << " | "
           << g.members.size() << " |\n";
    }
    for (const auto& g : groups) {
        const auto& first = *g.members.front();
        os << "\n## " << first.pair_name() << " (" << g.members.size() << ")\n\n";
        if (first.user_da) {
            os << "verdict: " << (first.compatible ? "compatible" : "incompatible") << "\n";
            os << "expected: " << join_das(first.expected_das) << "\n";
        } else {
            os << "verdict: no user context\n";
        }
        for (std::size_t i = 0; i < g.members.size() && i < examples_per_group; ++i) {
            const auto& e = *g.members[i];
            os << "\n### " << e.dialogue_id << " turn " << e.turn_index << "\n\n";
            os << "votes (inappropriate/neutral/appropriate) " << votes_text(e.votes) << ", margin " << e.margin
               << "\n\n";
            for (const auto& c : e.context) {
                os << "> " << (c.is_target ? "**" : "") << "[" << c.turn_index << "] " << to_string(c.speaker);
                if (!c.da.empty()) os << " (" << c.da << ")";
                os << ": " << c.text << (c.is_target ? "**" : "") << "  \n";
            }
            os << "\n" << e.narrative << "\n";
            if (!e.decision_path.empty()) {
                os << "\n<details><summary>decision path</summary>\n\n";
                for (const auto& step : e.decision_path) os << "- " << step << "\n";
                os << "\n</details>\n";
            }
        }
    }
    return os.str();
}

} // namespace chatda
