// Runs the ten acceptance checks and prints one PASS/FAIL line per check.
// argv[1] is the path to the chatda executable.

#include "chatda/cli.hpp"
#include "chatda/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <sys/wait.h>

using namespace chatda;
namespace fs = std::filesystem;
using A = Appropriateness;
using json = nlohmann::json;

namespace {

std::string g_cli;
fs::path g_dir;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("failed: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

struct Proc {
    int code = -1;
    std::string output;
};

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

Proc sh(const std::vector<std::string>& args) {
    std::string cmd = quote(g_cli);
    for (const auto& a : args) cmd += " " + quote(a);
    cmd += " 2>&1";
    Proc p;
    FILE* f = popen(cmd.c_str(), "r");
    if (!f) return p;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) p.output.append(buf.data(), n);
    const int status = pclose(f);
    p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

Utterance turn(Speaker s, std::string text, std::size_t i) {
    Utterance u;
    u.speaker = s;
    u.text = std::move(text);
    u.turn_index = i;
    return u;
}

Dialogue make_dialogue(const std::string& id, const std::string& topic_id, const std::vector<std::pair<Speaker, std::string>>& turns) {
    Dialogue d;
    d.id = id;
    d.topic = find_topic(topic_id)->ref();
    for (std::size_t i = 0; i < turns.size(); ++i) d.utterances.push_back(turn(turns[i].first, turns[i].second, i));
    return d;
}

Dialogue dance_exchange() {
    constexpr auto B = Speaker::Chatbot, U = Speaker::User;
    auto d = make_dialogue("dance", "q1",
                           {{B, "What hobbies or interests do you have?"},
                            {U, "dance"},
                            {B, "I wish I could... but I have no feet :-)"},
                            {B, "What hobbies or interests do you have?"}});
    d.utterances[0].chatbot_da = ChatbotDA::Other;
    d.utterances[1].user_da = UserDA::AnswerRelevant;
    d.utterances[2].chatbot_da = ChatbotDA::HandleRequest;
    d.utterances[3].chatbot_da = ChatbotDA::Repeat;
    d.utterances[0].gold_label = A::Appropriate;
    d.utterances[2].gold_label = A::Inappropriate;
    d.utterances[3].gold_label = A::Inappropriate;
    return d;
}

// ---- 1: pipeline on the seeded corpus

Outcome criterion_pipeline() {
    Outcome o;
    const auto dir = g_dir / "pipeline";
    fs::remove_all(dir);
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = sh({"pipeline", "--out", dir.string(), "--seed", "7", "-n", "800", "--mismatch-rate", "0.15"});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.expect(p.code == 0, "pipeline exit code 0 (got " + std::to_string(p.code) + ")");
    if (p.code != 0) {
        o.note(p.output.substr(0, 400));
        return o;
    }
    const auto ev = json::parse(slurp(dir / "eval.json"));
    const double acc = ev["accuracy"].get<double>();
    const double f1 = ev["per_class"]["inappropriate"]["f1"].get<double>();
    o.expect(acc >= 0.85, "accuracy >= 0.85");
    o.expect(f1 >= 0.80, "inappropriate F1 >= 0.80");
    o.expect(secs <= 60.0, "runtime <= 60 s");
    o.note("accuracy " + num(acc) + ", inappropriate F1 " + num(f1) + ", " + num(secs) + " s");
    return o;
}

// ---- 2: metric oracles

struct MetricOracle {
    std::array<std::array<std::size_t, 3>, 3> m;  // rows gold, columns predicted
    std::array<std::array<double, 3>, 3> prf;     // per class: precision, recall, f1
    double wp, wr, wf, acc;
};

void labels_from(const std::array<std::array<std::size_t, 3>, 3>& m, std::vector<A>& g, std::vector<A>& p) {
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            for (std::size_t k = 0; k < m[r][c]; ++k) {
                g.push_back(static_cast<A>(r));
                p.push_back(static_cast<A>(c));
            }
        }
    }
}

Outcome criterion_metrics() {
    Outcome o;
    const std::vector<MetricOracle> cases{
        {{{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}}},
         {{{1.0, 0.5, 2.0 / 3}, {0.5, 1.0, 2.0 / 3}, {1.0, 1.0, 1.0}}},
         7.0 / 8, 3.0 / 4, 3.0 / 4, 3.0 / 4},
        {{{{5, 2, 1}, {3, 10, 2}, {0, 4, 20}}},
         {{{5.0 / 8, 5.0 / 8, 5.0 / 8}, {5.0 / 8, 2.0 / 3, 20.0 / 31}, {20.0 / 23, 5.0 / 6, 40.0 / 47}}},
         6485.0 / 8648, 35.0 / 47, 51145.0 / 68479, 35.0 / 47},
        {{{{0, 0, 0}, {2, 3, 0}, {1, 0, 4}}},
         {{{0.0, 0.0, 0.0}, {1.0, 3.0 / 5, 3.0 / 4}, {1.0, 4.0 / 5, 8.0 / 9}}},
         1.0, 7.0 / 10, 59.0 / 72, 7.0 / 10},
        {{{{7, 0, 0}, {0, 0, 0}, {0, 0, 0}}}, {{{1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}}, 1.0, 1.0, 1.0, 1.0},
        {{{{0, 5, 5}, {5, 0, 5}, {5, 5, 0}}}, {{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}}, 0.0, 0.0, 0.0, 0.0},
    };
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const auto& c = cases[k];
        std::vector<A> g, p;
        labels_from(c.m, g, p);
        const auto r = evaluate(g, p);
        const std::string tag = "matrix " + std::to_string(k + 1);
        for (std::size_t cls = 0; cls < 3; ++cls) {
            const auto& m = r.per_class[cls];
            o.expect(close(m.precision, c.prf[cls][0], 1e-9), tag + " precision class " + std::to_string(cls));
            o.expect(close(m.recall, c.prf[cls][1], 1e-9), tag + " recall class " + std::to_string(cls));
            o.expect(close(m.f1, c.prf[cls][2], 1e-9), tag + " f1 class " + std::to_string(cls));
        }
        o.expect(close(r.weighted_precision, c.wp, 1e-9), tag + " weighted precision");
        o.expect(close(r.weighted_recall, c.wr, 1e-9), tag + " weighted recall");
        o.expect(close(r.weighted_f1, c.wf, 1e-9), tag + " weighted f1");
        o.expect(close(r.accuracy, c.acc, 1e-9), tag + " accuracy");
        o.expect(r.confusion.counts == c.m, tag + " confusion counts");
    }

    struct KappaOracle {
        std::vector<A> a, b;
        double po, pe, kappa;
    };
    constexpr A I = A::Inappropriate, N = A::Neutral, P = A::Appropriate;
    std::vector<A> g2, p2;
    labels_from(cases[1].m, g2, p2);
    const std::vector<KappaOracle> kappas{
        {{I, I, P, P, N, N}, {I, I, P, N, N, N}, 5.0 / 6, 1.0 / 3, 0.75},
        {{I, I, N, N}, {I, N, I, N}, 0.5, 0.5, 0.0},
        {g2, p2, 35.0 / 47, 856.0 / 2209, 263.0 / 451},
    };
    for (std::size_t k = 0; k < kappas.size(); ++k) {
        const auto r = cohen_kappa(kappas[k].a, kappas[k].b);
        const std::string tag = "kappa pair " + std::to_string(k + 1);
        o.expect(close(r.observed, kappas[k].po, 1e-9), tag + " p_o");
        o.expect(close(r.expected, kappas[k].pe, 1e-9), tag + " p_e");
        o.expect(close(r.kappa, kappas[k].kappa, 1e-9), tag + " kappa");
    }
    o.note("5 matrices, 3 kappa pairs");
    return o;
}

// ---- 3: weighted recall identity

Outcome criterion_weighted_recall() {
    Outcome o;
    SplitMix64 rng(2024);
    std::size_t mismatches = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 1 + rng.below(200);
        std::vector<A> g(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = static_cast<A>(rng.below(3));
            p[i] = static_cast<A>(rng.below(3));
        }
        const auto r = evaluate(g, p);
        mismatches += r.weighted_recall != r.accuracy;
    }
    o.expect(mismatches == 0, "weighted recall == accuracy exactly on every draw");
    o.note("1000 random label sets, " + std::to_string(mismatches) + " mismatches");
    return o;
}

// ---- 4: mapping totality

Outcome criterion_mapping() {
    Outcome o;
    const auto& rules = default_ruleset().rules;
    std::size_t cells = 0, unique = 0;
    for (auto t : all_swda_tags()) {
        for (auto r : {Relevance::Relevant, Relevance::Irrelevant, Relevance::NotApplicable}) {
            for (auto p : {Position::AfterQuestion, Position::AfterStatement}) {
                ++cells;
                int best = std::numeric_limits<int>::min();
                std::vector<UserDA> winners;
                for (const auto& rule : rules) {
                    if (!rule.matches(t, r, p)) continue;
                    if (rule.priority > best) {
                        best = rule.priority;
                        winners = {rule.result};
                    } else if (rule.priority == best) {
                        winners.push_back(rule.result);
                    }
                }
                if (winners.size() == 1 && apply_mapping(t, r, p, rules) == winners[0]) ++unique;
            }
        }
    }
    o.expect(cells == 258, "258 cells enumerated");
    o.expect(unique == cells, "every cell resolves to exactly one user DA");

    auto j = json::parse(ruleset_to_json(default_ruleset()));
    json kept = json::array();
    for (const auto& r : j["mapping_rules"]) {
        if (r["swda_tag"] != "*") kept.push_back(r);
    }
    j["mapping_rules"] = kept;
    const auto path = g_dir / "no_catch_all.json";
    std::ofstream(path) << j.dump(2);
    bool rejected = false;
    try {
        load_ruleset(path);
    } catch (const DataError& e) {
        rejected = true;
        o.note(std::string("without catch-all: ") + e.what());
    }
    o.expect(rejected, "ruleset without the catch-all is rejected");
    o.note(std::to_string(unique) + "/" + std::to_string(cells) + " cells unique");
    return o;
}

// ---- 5: forest

TrainingSet make_set(const std::vector<std::vector<double>>& rows, const std::vector<A>& labels) {
    const std::size_t d = rows.empty() ? 0 : rows[0].size();
    std::vector<double> cols(d * rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t f = 0; f < d; ++f) cols[f * rows.size() + i] = rows[i][f];
    }
    return TrainingSet(d, cols, labels);
}

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = -1.0;
};

Split exhaustive_root(const TrainingSet& s) {
    auto g = [](const std::array<double, 3>& c) {
        const double n = c[0] + c[1] + c[2];
        return 1.0 - (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]) / (n * n);
    };
    std::array<double, 3> all{};
    for (std::size_t i = 0; i < s.size(); ++i) all[index_of(s.label(i))] += 1;
    Split best;
    for (std::size_t f = 0; f < s.n_features(); ++f) {
        std::vector<double> v(s.column(f).begin(), s.column(f).end());
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        for (std::size_t k = 0; k + 1 < v.size(); ++k) {
            const double th = v[k] + (v[k + 1] - v[k]) / 2.0;
            std::array<double, 3> l{}, r{};
            for (std::size_t i = 0; i < s.size(); ++i) (s.value(f, i) <= th ? l : r)[index_of(s.label(i))] += 1;
            const double nl = l[0] + l[1] + l[2], nr = r[0] + r[1] + r[2], n = static_cast<double>(s.size());
            const double gain = g(all) - nl / n * g(l) - nr / n * g(r);
            if (gain > best.gain + 1e-12) best = {f, th, gain};
        }
    }
    return best;
}

std::pair<std::vector<std::vector<double>>, std::vector<A>> separable(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<std::vector<double>> rows;
    std::vector<A> labels;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> r{rng.uniform(), rng.uniform(), rng.uniform()};
        labels.push_back(r[0] + r[1] > 1.2 ? A::Inappropriate : (r[1] > 0.5 ? A::Neutral : A::Appropriate));
        rows.push_back(std::move(r));
    }
    return {rows, labels};
}

Outcome criterion_forest() {
    Outcome o;
    using V = std::vector<std::uint32_t>;
    o.expect(close(gini(V{4, 0, 0}), 0.0, 1e-12), "gini [4,0,0] = 0");
    o.expect(close(gini(V{2, 2}), 0.5, 1e-12), "gini [2,2] = 0.5");
    o.expect(close(gini(V{3, 1}), 0.375, 1e-12), "gini [3,1] = 0.375");
    o.expect(close(gini(V{1, 1, 1}), 2.0 / 3, 1e-12), "gini [1,1,1] = 2/3");

    Hyperparams full;
    full.n_trees = 1;
    full.max_depth = 1000;
    full.features_per_split = FeaturesPerSplit::All;

    const auto [rows, labels] = separable(200, 11);
    const auto toy = make_set(rows, labels);
    const auto tree = train_tree(toy, full, 5);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < toy.size(); ++i) {
        ok += majority(tree.leaf_for([&](std::size_t f) { return toy.value(f, i); }).counts) == toy.label(i);
    }
    o.expect(ok == toy.size(), "full-depth tree fits the 200-sample toy set");
    o.note("toy training accuracy " + std::to_string(ok) + "/200, depth " + std::to_string(tree.depth()));

    const std::vector<std::vector<double>> small_rows(rows.begin(), rows.begin() + 10);
    const std::vector<A> small_labels(labels.begin(), labels.begin() + 10);
    const auto small = make_set(small_rows, small_labels);
    const auto oracle = exhaustive_root(small);
    const auto small_tree = train_tree(small, full, 5);
    o.expect(!small_tree.root().is_leaf() && oracle.gain > 0, "10-sample root is split");
    o.expect(static_cast<std::size_t>(small_tree.root().feature) == oracle.feature &&
                 small_tree.root().threshold == oracle.threshold,
             "10-sample root split matches the exhaustive oracle");

    Hyperparams hp;
    hp.n_trees = 40;
    hp.max_depth = 20;
    hp.seed = 9;
    const auto big = separable(400, 12);
    const auto set = make_set(big.first, big.second);
    const Vocabulary vocab;
    const auto m1 = model_to_json(train_forest(set, hp, vocab, "fp", 1));
    const auto m4 = model_to_json(train_forest(set, hp, vocab, "fp", 4));
    o.expect(m1 == m4, "1-thread and 4-thread models are byte-identical");
    return o;
}

// ---- 6: feature schema

std::size_t l0(const FeatureVector& v, std::size_t begin, std::size_t len) {
    std::size_t n = 0;
    for (std::size_t i = begin; i < begin + len; ++i) n += v.at(i) != 0.0;
    return n;
}

Outcome criterion_features() {
    Outcome o;
    const auto corpus = generate_corpus({60, 3, 0.15});
    const auto full_vocab = Vocabulary::build(corpus, 1);
    for (std::size_t size : {std::size_t{0}, std::size_t{100}}) {
        std::vector<std::string> tokens(full_vocab.tokens().begin(),
                                        full_vocab.tokens().begin() + std::min(size, full_vocab.size()));
        const Vocabulary vocab(tokens);
        o.expect(vocab.size() == size, "vocabulary of size " + std::to_string(size));
        const FeatureSchema schema(vocab);
        o.expect(schema.dimension() == 259 + size, "schema dimension 259 + " + std::to_string(size));
        o.expect(schema.column_names().size() == 259 + size, "column names cover the schema");
        const auto data = extract_all(corpus, vocab, schema);
        bool dims = true, onehot = true;
        for (const auto& v : data) {
            dims = dims && v.dense(schema.dimension()).size() == 259 + size && v.values.rbegin()->first < 259 + size;
            onehot = onehot && l0(v, FeatureSchema::kTarget, kNumChatbotDAs) == 1 &&
                     l0(v, FeatureSchema::kLastUser, kNumUserDAs) <= 1 &&
                     l0(v, FeatureSchema::kNextUser, kNumUserDAs) <= 1 &&
                     l0(v, FeatureSchema::kPair, kNumUserDAs * kNumChatbotDAs) <= 1;
        }
        o.expect(dims, "every vector fits dimension 259 + " + std::to_string(size));
        o.expect(onehot, "one-hot blocks have L0 <= 1 at |V| = " + std::to_string(size));
        o.note("|V| = " + std::to_string(size) + ": " + std::to_string(data.size()) + " vectors");
    }
    const auto d = dance_exchange();
    const Vocabulary empty;
    const FeatureSchema schema(empty);
    const auto v = extract(d, 0, empty, schema);
    o.expect(l0(v, FeatureSchema::kPrevChatbot, kNumChatbotDAs) == 0, "turn 0: no previous chatbot DA");
    o.expect(l0(v, FeatureSchema::kLastUser, kNumUserDAs) == 0, "turn 0: no last user DA");
    o.expect(l0(v, FeatureSchema::kPrevUsers, kNumUserDAs) == 0, "turn 0: no previous user DAs");
    o.expect(l0(v, FeatureSchema::kPair, kNumUserDAs * kNumChatbotDAs) == 0, "turn 0: no exchange pair");
    o.expect(v.at(FeatureSchema::kOrdinal) == 1.0, "turn 0: ordinal 1");
    return o;
}

// ---- 7: dance exchange via detect

Outcome criterion_dance() {
    Outcome o;
    const auto model = g_dir / "pipeline" / "model.json";
    o.expect(fs::exists(model), "pipeline model exists");
    if (!fs::exists(model)) return o;
    const auto in = g_dir / "dance_exchange.jsonl";
    write_transcripts({dance_exchange()}, in);
    const auto out = g_dir / "dance_exchange_report.json";
    const auto p = sh({"detect", "--in", in.string(), "--model", model.string(), "--format", "json", "--out", out.string()});
    o.expect(p.code == 0, "detect exit code 0");
    if (p.code != 0) {
        o.note(p.output.substr(0, 400));
        return o;
    }
    o.expect(p.output.find("flagged ") != std::string::npos, "summary line printed");
    const auto report = json::parse(slurp(out));
    bool found = false;
    for (const auto& g : report["groups"]) {
        if (g["user_da"] != "user-answer-relevant" || g["chatbot_da"] != "chatbot-handle-user-request") continue;
        for (const auto& e : g["examples"]) {
            const auto& exp = e["expected_das"];
            const bool has_rr = std::find(exp.begin(), exp.end(), json("chatbot-respond-relevant")) != exp.end();
            if (e["turn_index"] == 2 && e["compatible"] == false && has_rr &&
                e["exchange_pair"] == json::array({"user-answer-relevant", "chatbot-handle-user-request"})) {
                found = true;
                o.note(e["narrative"].get<std::string>());
            }
        }
    }
    o.expect(found, "report holds the incompatible (user-answer-relevant, chatbot-handle-user-request) explanation");
    return o;
}

// ---- 8: model round trip

Outcome criterion_round_trip() {
    Outcome o;
    const auto dir = g_dir / "pipeline";
    if (!fs::exists(dir / "model.json") || !fs::exists(dir / "test.jsonl")) {
        o.expect(false, "pipeline artifacts present");
        return o;
    }
    const auto model = load_model(dir / "model.json");
    const auto copy = g_dir / "model_copy.json";
    save_model(model, copy);
    const auto reloaded = load_model(copy);
    const auto test = load_transcripts(dir / "test.jsonl", true);
    const auto a = cli::score(test, model).predictions;
    const auto b = cli::score(test, reloaded).predictions;
    bool same = a.size() == b.size() && !a.empty();
    for (std::size_t i = 0; same && i < a.size(); ++i) {
        same = a[i].prediction.label == b[i].prediction.label && a[i].prediction.votes == b[i].prediction.votes;
    }
    o.expect(same, "identical predictions after save and load");
    o.expect(slurp(copy) == slurp(dir / "model.json"), "re-saved model is byte-identical");
    o.note(std::to_string(a.size()) + " test responses");

    auto j = json::parse(slurp(copy));
    j["format_version"] = kModelFormatVersion + 1;
    const auto bumped = g_dir / "model_bumped.json";
    std::ofstream(bumped) << j.dump();
    bool rejected = false;
    try {
        load_model(bumped);
    } catch (const DataError& e) {
        rejected = std::string(e.what()).find("format_version") != std::string::npos;
        o.note(e.what());
    }
    o.expect(rejected, "bumped format_version is rejected with a versioned error");
    return o;
}

// ---- 9: user DA examples

Outcome criterion_user_das() {
    Outcome o;
    constexpr auto B = Speaker::Chatbot, U = Speaker::User;
    const std::string statement =
        "If part of the chat progress bar is still red, it indicates that our chat is still in progress. It will end "
        "before you know it.";
    struct Case {
        Dialogue d;
        std::size_t turn;
        UserDA want;
    };
    const std::vector<Case> cases{
        {make_dialogue("t2-request", "q1",
                       {{B, "What hobbies or interests do you have?"}, {U, "dance"}, {B, statement}, {U, "Tell me a joke."}}),
         3, UserDA::Request},
        {make_dialogue("t2-command", "q2", {{B, "What do you do now for a living?"}, {U, "Next question."}}), 1,
         UserDA::Command},
        {make_dialogue("t2-ack", "q1",
                       {{B, "What hobbies or interests do you have?"},
                        {U, "How long is our chat gonna last?"},
                        {B, statement},
                        {U, "Got it!"}}),
         3, UserDA::Acknowledge},
        {make_dialogue("t2-thanks", "q1",
                       {{B, "What hobbies or interests do you have?"},
                        {U, "Why?"},
                        {B, "I hear you... would love to help when I have the power to do so."},
                        {U, "Thank you!"}}),
         3, UserDA::SocialObligations},
        {make_dialogue("t2-gibberish", "q1", {{B, "What hobbies or interests do you have?"}, {U, "blea blahe"}}), 1,
         UserDA::Gibberish},
    };
    std::size_t hits = 0;
    for (const auto& c : cases) {
        const auto out = annotate(c.d, default_ruleset(), TaggerConfig{});
        const auto& da = out.utterances[c.turn].user_da;
        const bool ok = da && *da == c.want;
        hits += ok;
        o.expect(ok, "\"" + c.d.utterances[c.turn].text + "\" -> " + std::string(to_string(c.want)) + " (got " +
                         (da ? std::string(to_string(*da)) : std::string("none")) + ")");
    }
    o.note(std::to_string(hits) + "/5");
    return o;
}

// ---- 10: storage report

Outcome criterion_storage() {
    Outcome o;
    const auto in = g_dir / "pipeline" / "annotated.jsonl";
    if (!fs::exists(in)) {
        o.expect(false, "pipeline annotated corpus present");
        return o;
    }
    const auto model = g_dir / "model_default.json";
    const auto p = sh({"train", "--in", in.string(), "--model", model.string(), "--grid", "none", "--seed", "7"});
    o.expect(p.code == 0, "train exit code 0");
    o.expect(p.output.find("500 trees") != std::string::npos, "defaults use 500 trees");
    o.expect(p.output.find("depth 45") != std::string::npos, "defaults use max depth 45");
    o.expect(p.output.find(" nodes") != std::string::npos, "node count printed");
    o.expect(p.output.find("bytes serialized") != std::string::npos, "serialized size printed");
    const auto bytes = fs::exists(model) ? fs::file_size(model) : 0;
    o.expect(bytes > 0 && bytes < 50u * 1024 * 1024, "model file < 50 MB");
    const auto at = p.output.find("model: ");
    if (at != std::string::npos) o.note(p.output.substr(at, p.output.find('\n', at) - at));
    return o;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path to chatda>\n";
        return 1;
    }
    g_cli = fs::absolute(argv[1]).string();
    g_dir = fs::temp_directory_path() / "chatda_acceptance";
    fs::create_directories(g_dir);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"pipeline accuracy, F1 and runtime on the seeded corpus", criterion_pipeline},
        {"metric and kappa oracles", criterion_metrics},
        {"weighted recall equals accuracy", criterion_weighted_recall},
        {"mapping totality over 258 cells", criterion_mapping},
        {"forest correctness", criterion_forest},
        {"feature schema", criterion_features},
        {"dance exchange explanation", criterion_dance},
        {"model round trip", criterion_round_trip},
        {"user DA examples", criterion_user_das},
        {"storage report", criterion_storage},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.notes.push_back(std::string("exception: ") + e.what());
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first;
        if (!o.notes.empty()) {
            std::cout << " (";
            for (std::size_t k = 0; k < o.notes.size(); ++k) std::cout << (k ? "; " : "") << o.notes[k];
            std::cout << ")";
        }
        std::cout << "\n" << std::flush;
    }
    return failed == 0 ? 0 : 1;
}
