#include "chatda/cli.hpp"
#include "chatda/features.hpp"
#include "chatda/forest.hpp"
#include "chatda/metrics.hpp"
#include "chatda/tagger.hpp"
#include "chatda/taxonomy.hpp"
#include "chatda/transcript.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace chatda;

namespace {

std::vector<Appropriateness> labels_from(const std::vector<std::string>& names) {
    std::vector<Appropriateness> out;
    for (const auto& n : names) {
        auto a = parse_appropriateness(n);
        if (!a) throw DataError("unknown label '" + n + "'");
        out.push_back(*a);
    }
    return out;
}

py::dict report_dict(const EvalReport& r) {
    py::dict d;
    py::dict per_class;
    for (auto c : kAllClasses) {
        const auto& m = r.of(c);
        per_class[py::str(std::string(to_string(c)))] =
            py::dict(py::arg("precision") = m.precision, py::arg("recall") = m.recall, py::arg("f1") = m.f1,
                     py::arg("support") = m.support);
    }
    d["per_class"] = per_class;
    d["weighted_precision"] = r.weighted_precision;
    d["weighted_recall"] = r.weighted_recall;
    d["weighted_f1"] = r.weighted_f1;
    d["accuracy"] = r.accuracy;
    d["confusion"] = r.confusion.counts;
    d["zero_division"] = r.zero_division;
    return d;
}

cli::RunConfig config(std::uint64_t seed, const std::string& grid, const std::string& tagger, unsigned threads) {
    cli::RunConfig cfg;
    cfg.seed = seed;
    cfg.grid = grid;
    cfg.tagger = tagger == "pretagged" ? TaggerMode::PreTagged : TaggerMode::Heuristic;
    cfg.threads = threads;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_chatda, m) {
    m.doc() = "Detect and explain inappropriate chatbot responses";

    static py::exception<DataError> data_error(m, "DataError", PyExc_ValueError);
    static py::exception<UsageError> usage_error(m, "UsageError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DataError& e) {
            data_error(e.what());
        } catch (const UsageError& e) {
            usage_error(e.what());
        }
    });

    m.def("generate_corpus", [](std::size_t n, std::uint64_t seed, double rate) {
        return serialize_transcripts(generate_corpus({n, seed, rate}));
    }, py::arg("n_dialogues") = 800, py::arg("seed") = 7, py::arg("mismatch_rate") = 0.15,
       "Seeded synthetic corpus as JSONL text.");

    m.def("annotate", [](const std::string& jsonl, bool relabel, const std::string& tagger, unsigned threads) {
        auto cfg = config(0, "none", tagger, threads);
        cfg.relabel = relabel;
        const auto ds = parse_transcripts(jsonl, true);
        return serialize_transcripts(cli::annotate_corpus(ds, cfg, default_ruleset(), TaggerLexicons::bundled()));
    }, py::arg("jsonl"), py::arg("relabel") = false, py::arg("tagger") = "heuristic", py::arg("threads") = 1);

    m.def("map_user_da", [](const std::string& swda, const std::string& relevance, const std::string& position) {
        auto tag = parse_swda_tag(swda);
        if (!tag) throw UsageError("unknown SwDA tag '" + swda + "'");
        Relevance r = relevance == "relevant" ? Relevance::Relevant
                      : relevance == "irrelevant" ? Relevance::Irrelevant
                                                  : Relevance::NotApplicable;
        Position p = position == "after-statement" ? Position::AfterStatement : Position::AfterQuestion;
        return std::string(to_string(apply_mapping(*tag, r, p, default_ruleset().rules)));
    }, py::arg("swda_tag"), py::arg("relevance"), py::arg("position"));

    m.def("train", [](const std::string& jsonl, std::uint64_t seed, const std::string& grid, unsigned threads) {
        const auto cfg = config(seed, grid, "heuristic", threads);
        const auto ds = cli::annotate_corpus(parse_transcripts(jsonl, true), cfg, default_ruleset(),
                                             TaggerLexicons::bundled());
        std::ostringstream log;
        auto outcome = cli::train_model(ds, cfg, log);
        py::dict d;
        d["model"] = model_to_json(outcome.model);
        d["test"] = serialize_transcripts(outcome.test);
        d["log"] = log.str();
        d["nodes"] = outcome.size.nodes;
        return d;
    }, py::arg("jsonl"), py::arg("seed") = 7, py::arg("grid") = "none", py::arg("threads") = 1,
       "Split, fit and return the model JSON plus the held-out test JSONL.");

    m.def("evaluate_model", [](const std::string& model_json, const std::string& jsonl) {
        const auto model = model_from_json(model_json);
        cli::RunConfig cfg;
        const auto ds = cli::annotate_corpus(parse_transcripts(jsonl, true), cfg, default_ruleset(),
                                             TaggerLexicons::bundled());
        return report_dict(cli::evaluate_model(ds, model));
    }, py::arg("model_json"), py::arg("jsonl"));

    m.def("detect", [](const std::string& model_json, const std::string& jsonl, const std::string& format) {
        const auto model = model_from_json(model_json);
        cli::RunConfig cfg;
        const auto ds = cli::annotate_corpus(parse_transcripts(jsonl, true), cfg, default_ruleset(),
                                             TaggerLexicons::bundled());
        const auto d = cli::detect_and_explain(ds, model, default_ruleset().compatibility,
                                               format == "json" ? ReportFormat::Json : ReportFormat::Markdown);
        return py::make_tuple(d.report, d.flagged, d.total);
    }, py::arg("model_json"), py::arg("jsonl"), py::arg("format") = "md");

    m.def("evaluate", [](const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
        return report_dict(evaluate(labels_from(gold), labels_from(pred)));
    }, py::arg("gold"), py::arg("predicted"));

    m.def("cohen_kappa", [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        return cohen_kappa(labels_from(a), labels_from(b)).kappa;
    }, py::arg("a"), py::arg("b"));

    m.def("gini", [](const std::vector<std::uint32_t>& counts) { return gini(counts); }, py::arg("counts"));

    m.def("main", [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"chatda"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Run a CLI command; returns (exit_code, stdout, stderr).");
}
