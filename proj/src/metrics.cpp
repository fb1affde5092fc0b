#include "chatda/metrics.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <sstream>

namespace chatda {
namespace {

double ratio(std::size_t num, std::size_t den, bool* zero_div) {
    if (den == 0) {
        *zero_div = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

void check_inputs(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DataError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
    if (a == 0) throw DataError(std::string(what) + ": empty input");
}

ConfusionMatrix tally(std::span<const Appropriateness> rows, std::span<const Appropriateness> cols) {
    ConfusionMatrix m;
    for (std::size_t i = 0; i < rows.size(); ++i) ++m.counts[index_of(rows[i])][index_of(cols[i])];
    return m;
}

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace

std::size_t ConfusionMatrix::total() const {
    std::size_t n = 0;
    for (const auto& row : counts) {
        for (auto c : row) n += c;
    }
    return n;
}

std::size_t ConfusionMatrix::support(Appropriateness gold) const {
    std::size_t n = 0;
    for (auto c : counts[index_of(gold)]) n += c;
    return n;
}

EvalReport evaluate(std::span<const Appropriateness> gold, std::span<const Appropriateness> predicted) {
    check_inputs(gold.size(), predicted.size(), "evaluate");
    EvalReport r;
    r.confusion = tally(gold, predicted);
    const auto& m = r.confusion.counts;
    const double n = static_cast<double>(gold.size());

    std::size_t correct = 0;
    for (auto c : kAllClasses) {
        const std::size_t k = index_of(c);
        const std::size_t tp = m[k][k];
        std::size_t pred_pos = 0;
        for (std::size_t g = 0; g < kNumClasses; ++g) pred_pos += m[g][k];
        const std::size_t support = r.confusion.support(c);
        correct += tp;

        auto& cm = r.per_class[k];
        cm.support = support;
        bool zp = false, zr = false, zf = false;
        cm.precision = ratio(tp, pred_pos, &zp);
        cm.recall = ratio(tp, support, &zr);
        const double denom = cm.precision + cm.recall;
        if (denom == 0.0) {
            zf = true;
            cm.f1 = 0.0;
        } else {
            cm.f1 = 2.0 * cm.precision * cm.recall / denom;
        }
        const std::string name(to_string(c));
        if (zp) r.zero_division.push_back("precision[" + name + "]");
        if (zr) r.zero_division.push_back("recall[" + name + "]");
        if (zf) r.zero_division.push_back("f1[" + name + "]");

        const double w = static_cast<double>(support);
        r.weighted_precision += w * cm.precision;
        r.weighted_f1 += w * cm.f1;
    }
    r.weighted_precision /= n;
    r.weighted_f1 /= n;
    // support_c * recall_c == TP_c, so the weighted recall is summed in integers.
    r.weighted_recall = static_cast<double>(correct) / n;
    r.accuracy = static_cast<double>(correct) / n;
    return r;
}

KappaResult cohen_kappa(std::span<const Appropriateness> a, std::span<const Appropriateness> b) {
    check_inputs(a.size(), b.size(), "cohen_kappa");
    KappaResult k;
    k.joint = tally(a, b);
    const double n = static_cast<double>(a.size());
    std::size_t agree = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) agree += k.joint.counts[c][c];
    k.observed = static_cast<double>(agree) / n;

    for (std::size_t c = 0; c < kNumClasses; ++c) {
        std::size_t row = 0, col = 0;
        for (std::size_t j = 0; j < kNumClasses; ++j) {
            row += k.joint.counts[c][j];
            col += k.joint.counts[j][c];
        }
        k.expected += (static_cast<double>(row) / n) * (static_cast<double>(col) / n);
    }

    if (k.expected >= 1.0) {
        k.degenerate = true;
        k.kappa = k.observed >= 1.0 ? 1.0 : 0.0;
    } else {
        k.kappa = (k.observed - k.expected) / (1.0 - k.expected);
    }
    return k;
}

std::string render_table(const EvalReport& report, const std::string& title) {
    std::ostringstream os;
    if (!title.empty()) os << title << "\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-14s %9s %9s %9s %9s %9s\n", "Class", "Precision", "Recall", "F1", "Support",
                  "Accuracy");
    os << line;
    for (auto c : kAllClasses) {
        const auto& m = report.of(c);
        std::string name(to_string(c));
        name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
        std::snprintf(line, sizeof line, "%-14s %9s %9s %9s %9zu %9s\n", name.c_str(), fmt3(m.precision).c_str(),
                      fmt3(m.recall).c_str(), fmt3(m.f1).c_str(), m.support,
                      c == Appropriateness::Neutral ? fmt3(report.accuracy).c_str() : "");
        os << line;
    }
    std::snprintf(line, sizeof line, "%-14s %9s %9s %9s %9zu\n", "Weighted", fmt3(report.weighted_precision).c_str(),
                  fmt3(report.weighted_recall).c_str(), fmt3(report.weighted_f1).c_str(), report.confusion.total());
    os << line;
    if (!report.zero_division.empty()) {
        os << "* 0/0 reported as 0:";
        for (const auto& z : report.zero_division) os << " " << z;
        os << "\n";
    }
    return os.str();
}

std::string render_confusion(const ConfusionMatrix& m, const std::string& row_label, const std::string& col_label) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-24s %14s %14s %14s\n", (row_label + " \\ " + col_label).c_str(), "inappropriate",
                  "neutral", "appropriate");
    os << line;
    for (auto c : kAllClasses) {
        const auto& row = m.counts[index_of(c)];
        std::snprintf(line, sizeof line, "%-24s %14zu %14zu %14zu\n", std::string(to_string(c)).c_str(), row[0], row[1],
                      row[2]);
        os << line;
    }
    return os.str();
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    auto classes = nlohmann::ordered_json::object();
    for (auto c : kAllClasses) {
        const auto& m = report.of(c);
        classes[std::string(to_string(c))] = {
            {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
    }
    j["per_class"] = std::move(classes);
    j["weighted"] = {{"precision", report.weighted_precision},
                     {"recall", report.weighted_recall},
                     {"f1", report.weighted_f1}};
    j["accuracy"] = report.accuracy;
    j["class_order"] = {"inappropriate", "neutral", "appropriate"};
    j["confusion_matrix"] = report.confusion.counts;
    j["zero_division"] = report.zero_division;
    return j.dump(2) + "\n";
}

} // namespace chatda
