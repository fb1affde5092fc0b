#include "chatda/cli.hpp"

#include "chatda/features.hpp"
#include "chatda/rng.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace chatda::cli {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& p, const char* what) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError(std::string("cannot open ") + what + " " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot write " + p.string());
    os << content;
    if (!os) throw DataError("write failed: " + p.string());
}

std::vector<Dialogue> read_transcripts(const RunConfig& cfg, const fs::path& path, std::ostream& err) {
    if (path.empty()) throw UsageError("--in is required");
    LoadReport report;
    auto dialogues = load_transcripts(path, cfg.strict, &report);
    if (report.skipped) err << "warning: skipped " << report.skipped << " malformed record(s) in " << path.string() << "\n";
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";
    return dialogues;
}

std::string pct(std::size_t a, std::size_t b) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", b ? 100.0 * static_cast<double>(a) / static_cast<double>(b) : 0.0);
    return buf;
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Hyperparams> resolve_grid(const RunConfig& cfg) {
    if (cfg.grid == "default") return default_grid(cfg.seed);
    if (cfg.grid == "none") return {};
    return parse_grid_json(read_file(cfg.grid, "grid file"), cfg.seed);
}

bool has_any_da(const std::vector<Dialogue>& ds) {
    for (const auto& d : ds) {
        for (const auto& u : d.utterances) {
            if (u.user_da || u.chatbot_da) return true;
        }
    }
    return false;
}

void print_size(std::ostream& out, const ModelSize& s, const fs::path& path) {
    out << "model: " << s.trees << " trees, " << s.nodes << " nodes (" << s.internal_nodes << " internal, "
        << s.leaves << " leaves), max depth " << s.max_depth << ", " << s.parameters << " parameters, "
        << s.serialized_bytes << " bytes serialized";
    if (!path.empty()) out << " -> " << path.string();
    out << "\n";
}

std::map<std::string, Appropriateness> gold_by_key(const std::vector<Dialogue>& ds, const std::string& file) {
    std::map<std::string, Appropriateness> out;
    for (const auto& d : ds) {
        for (std::size_t i = 0; i < d.utterances.size(); ++i) {
            const auto& u = d.utterances[i];
            if (u.is_chatbot() && u.gold_label) out[d.id + "#" + std::to_string(i)] = *u.gold_label;
        }
    }
    if (out.empty()) throw DataError(file + ": no gold labels");
    return out;
}

std::string missing_list(const std::vector<std::string>& keys) {
    std::string s;
    for (std::size_t i = 0; i < keys.size() && i < 10; ++i) s += (i ? ", " : "") + keys[i];
    if (keys.size() > 10) s += ", ... and " + std::to_string(keys.size() - 10) + " more";
    return s;
}

} // namespace

void RunConfig::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw UsageError("train fraction must be in (0, 1)");
    if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) throw UsageError("dev fraction must be in (0, 1)");
    if (threads == 0) throw UsageError("--threads must be positive");
}

Ruleset resolve_ruleset(const RunConfig& cfg) {
    if (!cfg.ruleset.empty()) return load_ruleset(cfg.ruleset);
    if (const char* env = std::getenv(kRulesetEnv); env && *env) return load_ruleset(env);
    return default_ruleset();
}

TaggerLexicons resolve_lexicons(const RunConfig& cfg) {
    if (!cfg.lexicons.empty()) return TaggerLexicons::load(cfg.lexicons);
    return TaggerLexicons::bundled();
}

Split split_dialogues(const std::vector<Dialogue>& dialogues, std::uint64_t seed, double train_fraction,
                      double dev_fraction) {
    const std::size_t n = dialogues.size();
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * (1.0 - train_fraction)));
    const std::size_t n_trainall = n - std::min(n, n_test);
    const auto n_dev = static_cast<std::size_t>(std::llround(static_cast<double>(n_trainall) * dev_fraction));
    if (n_test == 0 || n_dev == 0 || n_trainall <= n_dev) {
        throw DataError("insufficient data to split: " + std::to_string(n) + " dialogue(s)");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(seed);
    rng.shuffle(order);

    std::vector<int> part(n, 0);  // 0 train, 1 dev, 2 test
    for (std::size_t i = 0; i < n_test; ++i) part[order[i]] = 2;
    for (std::size_t i = n_test; i < n_test + n_dev; ++i) part[order[i]] = 1;
    Split s;
    for (std::size_t i = 0; i < n; ++i) {
        (part[i] == 0 ? s.train : part[i] == 1 ? s.dev : s.test).push_back(dialogues[i]);
    }
    return s;
}

std::vector<Dialogue> annotate_corpus(const std::vector<Dialogue>& dialogues, const RunConfig& cfg,
                                      const Ruleset& ruleset, const TaggerLexicons& lex) {
    TaggerConfig tc;
    tc.mode = cfg.tagger;
    std::vector<Dialogue> input;
    input.reserve(dialogues.size());
    for (const auto& d : dialogues) {
        input.push_back(cfg.relabel ? strip_das(d, cfg.tagger == TaggerMode::PreTagged) : d);
    }
    return annotate_all(input, ruleset, tc, lex, cfg.threads);
}

DaAgreement da_agreement(const std::vector<Dialogue>& reference, const std::vector<Dialogue>& annotated) {
    if (reference.size() != annotated.size()) throw Error("da_agreement: corpus size mismatch");
    DaAgreement a;
    for (std::size_t d = 0; d < reference.size(); ++d) {
        const auto& ru = reference[d].utterances;
        const auto& au = annotated[d].utterances;
        if (ru.size() != au.size()) throw Error("da_agreement: dialogue shape mismatch");
        for (std::size_t i = 0; i < ru.size(); ++i) {
            if (ru[i].user_da) {
                ++a.user_total;
                a.user_agree += au[i].user_da == ru[i].user_da;
            }
            if (ru[i].chatbot_da) {
                ++a.chatbot_total;
                a.chatbot_agree += au[i].chatbot_da == ru[i].chatbot_da;
            }
        }
    }
    return a;
}

std::string da_frequency_table(const std::vector<Dialogue>& dialogues) {
    std::array<std::size_t, kNumUserDAs> users{};
    std::array<std::size_t, kNumChatbotDAs> bots{};
    std::size_t nu = 0, nb = 0;
    for (const auto& d : dialogues) {
        for (const auto& u : d.utterances) {
            if (u.user_da) ++users[index_of(*u.user_da)], ++nu;
            if (u.chatbot_da) ++bots[index_of(*u.chatbot_da)], ++nb;
        }
    }
    std::ostringstream os;
    char line[128];
    for (auto da : all_user_das()) {
        std::snprintf(line, sizeof line, "%-42s %7zu %7s\n", std::string(to_string(da)).c_str(), users[index_of(da)],
                      pct(users[index_of(da)], nu).c_str());
        os << line;
    }
    for (auto da : all_chatbot_das()) {
        std::snprintf(line, sizeof line, "%-42s %7zu %7s\n", std::string(to_string(da)).c_str(), bots[index_of(da)],
                      pct(bots[index_of(da)], nb).c_str());
        os << line;
    }
    return os.str();
}

Scored score(const std::vector<Dialogue>& annotated, const ForestModel& model) {
    const FeatureSchema schema(model.vocabulary);
    if (schema.fingerprint() != model.schema_fingerprint) {
        throw DataError("model schema fingerprint does not match its vocabulary");
    }
    Scored s;
    for (const auto& d : annotated) {
        for (std::size_t i = 0; i < d.utterances.size(); ++i) {
            if (!d.utterances[i].is_chatbot()) continue;
            auto fv = extract(d, i, model.vocabulary, schema);
            s.predictions.push_back({d.id, i, predict(model, fv), d.utterances[i].gold_label});
            s.vectors.push_back(std::move(fv));
        }
    }
    return s;
}

EvalReport evaluate_model(const std::vector<Dialogue>& annotated, const ForestModel& model) {
    if (annotated.empty()) throw DataError("evaluate: no dialogues");
    const auto scored = score(annotated, model);
    std::vector<Appropriateness> gold, pred;
    for (const auto& p : scored.predictions) {
        if (!p.gold) continue;
        gold.push_back(*p.gold);
        pred.push_back(p.prediction.label);
    }
    if (gold.empty()) throw DataError("evaluate: no labeled responses");
    return evaluate(gold, pred);
}

DetectOutcome detect_and_explain(const std::vector<Dialogue>& annotated, const ForestModel& model,
                                 const CompatibilityMatrix& matrix, ReportFormat format, bool with_paths) {
    const auto scored = score(annotated, model);
    const FeatureSchema schema(model.vocabulary);
    DetectOutcome out;
    out.total = scored.predictions.size();
    std::map<std::string, const Dialogue*> by_id;
    for (const auto& d : annotated) by_id[d.id] = &d;
    for (std::size_t k = 0; k < scored.predictions.size(); ++k) {
        const auto& p = scored.predictions[k];
        if (p.prediction.label != Appropriateness::Inappropriate) continue;
        ++out.flagged;
        auto e = explain_response(*by_id.at(p.dialogue_id), p.turn_index, p.prediction, matrix);
        if (with_paths) attach_decision_path(e, model, scored.vectors[k], schema);
        out.explanations.push_back(std::move(e));
    }
    out.report = build_report(annotated, scored.predictions, out.explanations, format);
    return out;
}

TrainOutcome train_model(const std::vector<Dialogue>& annotated, const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    std::size_t labeled = 0;
    for (const auto& d : annotated) {
        for (const auto& u : d.utterances) labeled += u.is_chatbot() && u.gold_label;
    }
    if (labeled == 0) throw DataError("train: no labeled responses");

    auto split = split_dialogues(annotated, cfg.seed, cfg.train_fraction, cfg.dev_fraction);
    std::vector<Dialogue> train_all = split.train;
    train_all.insert(train_all.end(), split.dev.begin(), split.dev.end());
    const auto vocab = Vocabulary::build(train_all);
    const FeatureSchema schema(vocab);
    log << "split: " << split.train.size() << " train / " << split.dev.size() << " dev / " << split.test.size()
        << " test dialogues; vocabulary " << vocab.size() << " tokens; " << schema.dimension() << " features\n";

    auto labeled_only = [](std::vector<FeatureVector> v) {
        std::erase_if(v, [](const FeatureVector& f) { return !f.label; });
        return v;
    };
    const auto train_vecs = labeled_only(extract_all(split.train, vocab, schema));
    const auto dev_vecs = labeled_only(extract_all(split.dev, vocab, schema));
    if (train_vecs.empty() || dev_vecs.empty()) throw DataError("train: a split has no labeled responses");
    const auto train_set = TrainingSet::from(train_vecs, schema.dimension());
    const auto dev_set = TrainingSet::from(dev_vecs, schema.dimension());

    TrainOutcome outcome;
    Hyperparams best;
    best.seed = cfg.seed;
    auto grid = resolve_grid(cfg);
    if (!grid.empty()) {
        auto result = grid_search(train_set, dev_set, grid, vocab, schema.fingerprint(), cfg.threads);
        log << "grid search over " << grid.size() << " configurations (dev weighted F1):\n";
        for (const auto& e : result.report) {
            log << "  " << e.hyperparams.describe() << "  f1=" << fixed3(e.dev.weighted_f1)
                << " acc=" << fixed3(e.dev.accuracy) << "\n";
        }
        best = result.best;
        for (const auto& e : result.report) {
            if (e.hyperparams == best) {
                outcome.dev = e.dev;
                break;
            }
        }
        outcome.grid = std::move(result);
    } else {
        const auto model = train_forest(train_set, best, vocab, schema.fingerprint(), cfg.threads);
        std::vector<Appropriateness> pred;
        for (std::size_t s = 0; s < dev_vecs.size(); ++s) pred.push_back(predict(model, dev_vecs[s]).label);
        outcome.dev = evaluate(dev_set.labels(), pred);
    }
    log << "chosen: " << best.describe() << "\n";
    if (outcome.dev) log << render_table(*outcome.dev, "dev scores:");

    auto all_vecs = train_vecs;
    all_vecs.insert(all_vecs.end(), dev_vecs.begin(), dev_vecs.end());
    const auto all_set = TrainingSet::from(all_vecs, schema.dimension());
    outcome.model = train_forest(all_set, best, vocab, schema.fingerprint(), cfg.threads);
    outcome.size = model_size(outcome.model);
    outcome.test = std::move(split.test);
    return outcome;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Detect and explain inappropriate chatbot responses in interview transcripts"};
    app.require_subcommand(1);
    RunConfig cfg;
    cfg.threads = std::max(1u, std::thread::hardware_concurrency());

    std::string tagger = "heuristic";
    std::string format = "md";
    std::size_t n_dialogues = 800;
    double mismatch_rate = 0.15;
    std::vector<std::string> kappa_files;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--ruleset", cfg.ruleset, "Ruleset JSON (default: $CHATDA_RULESET or bundled)");
        sub->add_option("--lexicons", cfg.lexicons, "Directory of lexicon .txt files");
        sub->add_option("--tagger", tagger, "Stage-1 tagger")->check(CLI::IsMember({"heuristic", "pretagged"}));
        sub->add_option("--threads", cfg.threads, "Worker cap (results do not depend on it)");
        sub->add_flag("--strict", cfg.strict, "Fail on the first malformed record");
    };

    auto* gen = app.add_subcommand("generate", "Write a seeded synthetic corpus with gold DAs and labels");
    gen->add_option("--out", cfg.out, "Output JSONL")->required();
    gen->add_option("--seed", cfg.seed);
    gen->add_option("-n,--dialogues", n_dialogues)->check(CLI::PositiveNumber);
    gen->add_option("--mismatch-rate", mismatch_rate)->check(CLI::Range(0.0, 1.0));

    auto* ann = app.add_subcommand("annotate", "Fill user and chatbot DAs");
    ann->add_option("--in", cfg.in)->required();
    ann->add_option("--out", cfg.out);
    ann->add_flag("--relabel", cfg.relabel, "Drop existing DAs before annotating");
    add_common(ann);

    auto* feat = app.add_subcommand("featurize", "Export the feature matrix as CSV");
    feat->add_option("--in", cfg.in)->required();
    feat->add_option("--out", cfg.out)->required();
    feat->add_option("--model", cfg.model, "Reuse the vocabulary of a saved model");
    add_common(feat);

    auto* train = app.add_subcommand("train", "Split, grid-search and fit the forest");
    train->add_option("--in", cfg.in)->required();
    train->add_option("--model", cfg.model)->required();
    train->add_option("--out", cfg.out, "Write the held-out test dialogues here");
    train->add_option("--seed", cfg.seed);
    train->add_option("--grid", cfg.grid, "default | none | path to a JSON grid");
    train->add_option("--train-fraction", cfg.train_fraction);
    train->add_option("--dev-fraction", cfg.dev_fraction);
    add_common(train);

    auto* eval = app.add_subcommand("evaluate", "Score a labeled file with a saved model");
    eval->add_option("--in", cfg.in)->required();
    eval->add_option("--model", cfg.model)->required();
    eval->add_option("--out", cfg.out, "JSON report path");
    add_common(eval);

    auto* det = app.add_subcommand("detect", "Flag inappropriate responses and explain them");
    det->add_option("--in", cfg.in)->required();
    det->add_option("--model", cfg.model)->required();
    det->add_option("--out", cfg.out, "Report path (default: stdout)");
    det->add_option("--format", format)->check(CLI::IsMember({"md", "json"}));
    add_common(det);

    auto* kap = app.add_subcommand("kappa", "Cohen's kappa between two labeled files");
    kap->add_option("files", kappa_files, "Two JSONL files")->expected(2)->required();
    kap->add_flag("--strict", cfg.strict);

    auto* pipe = app.add_subcommand("pipeline", "generate/annotate -> train -> evaluate -> detect");
    pipe->add_option("--in", cfg.in, "Input JSONL (default: generate a corpus)");
    pipe->add_option("--out", cfg.out, "Output directory")->required();
    pipe->add_option("--seed", cfg.seed);
    pipe->add_option("-n,--dialogues", n_dialogues)->check(CLI::PositiveNumber);
    pipe->add_option("--mismatch-rate", mismatch_rate)->check(CLI::Range(0.0, 1.0));
    pipe->add_option("--grid", cfg.grid);
    pipe->add_option("--format", format)->check(CLI::IsMember({"md", "json"}));
    add_common(pipe);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        cfg.tagger = tagger == "pretagged" ? TaggerMode::PreTagged : TaggerMode::Heuristic;
        cfg.format = format == "json" ? ReportFormat::Json : ReportFormat::Markdown;
        cfg.validate();

        if (*gen) {
            const auto corpus = generate_corpus({n_dialogues, cfg.seed, mismatch_rate});
            write_transcripts(corpus, cfg.out);
            std::size_t responses = 0, inappropriate = 0;
            for (const auto& d : corpus) {
                for (const auto& u : d.utterances) {
                    if (!u.is_chatbot()) continue;
                    ++responses;
                    inappropriate += u.gold_label == Appropriateness::Inappropriate;
                }
            }
            out << "generated " << corpus.size() << " dialogues, " << responses << " responses, " << inappropriate
                << " inappropriate (" << pct(inappropriate, responses) << ")\n";
            return 0;
        }

        if (*kap) {
            const auto a = gold_by_key(read_transcripts(cfg, kappa_files[0], err), kappa_files[0]);
            const auto b = gold_by_key(read_transcripts(cfg, kappa_files[1], err), kappa_files[1]);
            std::vector<std::string> missing;
            for (const auto& [k, v] : a) {
                if (!b.count(k)) missing.push_back(k + " (missing in " + kappa_files[1] + ")");
            }
            for (const auto& [k, v] : b) {
                if (!a.count(k)) missing.push_back(k + " (missing in " + kappa_files[0] + ")");
            }
            if (!missing.empty()) {
                throw DataError("kappa: " + std::to_string(missing.size()) + " key(s) differ: " + missing_list(missing));
            }
            std::vector<Appropriateness> la, lb;
            for (const auto& [k, v] : a) {
                la.push_back(v);
                lb.push_back(b.at(k));
            }
            const auto k = cohen_kappa(la, lb);
            out << "kappa " << fixed3(k.kappa) << " (p_o " << fixed3(k.observed) << ", p_e " << fixed3(k.expected)
                << ", n " << la.size() << ")\n";
            if (k.degenerate) err << "warning: degenerate marginals (p_e = 1)\n";
            out << render_confusion(k.joint, "A", "B");
            return 0;
        }

        const auto ruleset = resolve_ruleset(cfg);
        const auto lex = resolve_lexicons(cfg);

        if (*ann) {
            const auto input = read_transcripts(cfg, cfg.in, err);
            const auto annotated = annotate_corpus(input, cfg, ruleset, lex);
            if (cfg.tagger == TaggerMode::Heuristic && has_any_da(input)) {
                RunConfig fresh = cfg;
                fresh.relabel = true;
                const auto heuristic = cfg.relabel ? annotated : annotate_corpus(input, fresh, ruleset, lex);
                const auto agree = da_agreement(input, heuristic);
                out << "heuristic vs existing DAs: user " << agree.user_agree << "/" << agree.user_total << " ("
                    << pct(agree.user_agree, agree.user_total) << "), chatbot " << agree.chatbot_agree << "/"
                    << agree.chatbot_total << " (" << pct(agree.chatbot_agree, agree.chatbot_total) << ")\n";
            }
            out << da_frequency_table(annotated);
            if (!cfg.out.empty()) write_transcripts(annotated, cfg.out);
            return 0;
        }

        if (*feat) {
            const auto annotated = annotate_corpus(read_transcripts(cfg, cfg.in, err), cfg, ruleset, lex);
            const auto vocab = cfg.model.empty() ? Vocabulary::build(annotated) : load_model(cfg.model).vocabulary;
            const FeatureSchema schema(vocab);
            const auto vecs = extract_all(annotated, vocab, schema);
            std::ostringstream os;
            write_feature_matrix(os, vecs, schema);
            write_file(cfg.out, os.str());
            out << "wrote " << vecs.size() << " rows x " << schema.dimension() << " features (schema "
                << schema.fingerprint() << ")\n";
            return 0;
        }

        if (*train) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto annotated = annotate_corpus(read_transcripts(cfg, cfg.in, err), cfg, ruleset, lex);
            auto outcome = train_model(annotated, cfg, out);
            save_model(outcome.model, cfg.model);
            print_size(out, outcome.size, cfg.model);
            if (!cfg.out.empty()) write_transcripts(outcome.test, cfg.out);
            out << "trained in " << fixed3(seconds_since(t0)) << " s\n";
            return 0;
        }

        if (*eval) {
            const auto model = load_model(cfg.model);
            const auto annotated = annotate_corpus(read_transcripts(cfg, cfg.in, err), cfg, ruleset, lex);
            const auto report = evaluate_model(annotated, model);
            out << render_table(report, "evaluation (" + cfg.in.filename().string() + "):");
            out << render_confusion(report.confusion);
            if (!cfg.out.empty()) write_file(cfg.out, report_to_json(report));
            return 0;
        }

        if (*det) {
            const auto model = load_model(cfg.model);
            const auto annotated = annotate_corpus(read_transcripts(cfg, cfg.in, err), cfg, ruleset, lex);
            const auto d = detect_and_explain(annotated, model, ruleset.compatibility, cfg.format);
            if (cfg.out.empty()) {
                out << d.report;
            } else {
                write_file(cfg.out, d.report);
            }
            out << "flagged " << d.flagged << " of " << d.total << " responses\n";
            return 0;
        }

        if (*pipe) {
            const auto t0 = std::chrono::steady_clock::now();
            fs::create_directories(cfg.out);
            std::vector<Dialogue> input;
            if (cfg.in.empty()) {
                input = generate_corpus({n_dialogues, cfg.seed, mismatch_rate});
                write_transcripts(input, cfg.out / "corpus.jsonl");
                out << "generated " << input.size() << " dialogues (seed " << cfg.seed << ")\n";
            } else {
                input = read_transcripts(cfg, cfg.in, err);
            }
            cfg.relabel = true;
            const auto annotated = annotate_corpus(input, cfg, ruleset, lex);
            if (has_any_da(input)) {
                const auto agree = da_agreement(input, annotated);
                out << "tagger vs gold DAs: user " << pct(agree.user_agree, agree.user_total) << ", chatbot "
                    << pct(agree.chatbot_agree, agree.chatbot_total) << "\n";
            }
            write_transcripts(annotated, cfg.out / "annotated.jsonl");
            auto outcome = train_model(annotated, cfg, out);
            const auto model_path = cfg.out / "model.json";
            save_model(outcome.model, model_path);
            print_size(out, outcome.size, model_path);
            write_transcripts(outcome.test, cfg.out / "test.jsonl");
            const auto report = evaluate_model(outcome.test, outcome.model);
            out << render_table(report, "test scores:");
            out << render_confusion(report.confusion);
            write_file(cfg.out / "eval.json", report_to_json(report));
            const auto d = detect_and_explain(outcome.test, outcome.model, ruleset.compatibility, cfg.format);
            write_file(cfg.out / (cfg.format == ReportFormat::Json ? "report.json" : "report.md"), d.report);
            out << "flagged " << d.flagged << " of " << d.total << " responses\n";
            out << "pipeline finished in " << fixed3(seconds_since(t0)) << " s\n";
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}

} // namespace chatda::cli
