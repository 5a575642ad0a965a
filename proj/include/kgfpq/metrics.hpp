#pragma once
// Aggregation of evaluation transcripts into accuracy cells keyed by
// (model, domain, task, method), per-hop buckets for the neighbor
// methods, per-model overall accuracy, TPQ accuracy and gate pass
// rates, method-pair comparison tables, and size-class averages.
// Every published number is recomputable from the transcript by one
// linear pass.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kgfpq/core.hpp"
#include "kgfpq/eval_harness.hpp"
#include "kgfpq/qgen.hpp"

namespace kgfpq {

struct AccuracyCell {
    std::size_t correct = 0;
    std::size_t total = 0;
    std::size_t abstain = 0;      // scored incorrect, reported separately
    std::size_t unparseable = 0;  // likewise
    std::size_t error = 0;

    std::optional<double> accuracy() const {
        if (total == 0) return std::nullopt;
        return double(correct) / double(total);
    }

    void add(const EvalRecord& r) {
        ++total;
        if (r.final == FinalOutcome::Correct) ++correct;
        if (r.final == FinalOutcome::Abstain) ++abstain;
        if (r.final == FinalOutcome::Error) ++error;
        for (const std::string& v : r.votes)
            if (v == "Unparseable") {
                ++unparseable;
                break;
            }
    }

    json to_json() const {
        return json{{"correct", correct},
                    {"total", total},
                    {"abstain", abstain},
                    {"unparseable", unparseable},
                    {"error", error},
                    {"accuracy", accuracy() ? json(*accuracy()) : json(nullptr)}};
    }
};

struct CellKey {
    std::string model;
    std::string domain;
    std::string task;    // discriminative | generative
    std::string method;  // TPQ or edit-method acronym

    auto operator<=>(const CellKey&) const = default;

    std::string flat() const { return model + "," + domain + "," + task + "," + method; }
};

struct AccuracyReport {
    std::map<CellKey, AccuracyCell> cells;
    // (model, domain, task, method NSC/NDC, hop 1..5)
    std::map<std::pair<CellKey, int>, AccuracyCell> hop_cells;
    // Overall accuracy per (model, task):
    // sum of correct over six methods / (6 * gated base count).
    std::map<std::pair<std::string, std::string>, AccuracyCell> overall;
    // gate pass-rate per model: correct=passed gates, total=gates run
    std::map<std::string, AccuracyCell> gate_rates;
    std::vector<std::string> footers;

    static const inline std::vector<std::pair<std::string, std::string>> kComparisonPairs = {
        {"NSC", "NNSC"}, {"NSC", "NDC"}, {"NNSC", "NNDC"}, {"NNSR", "NNDR"}, {"NNSC", "NNSR"},
    };
};

// One linear pass over the transcript. Question records supply the
// domain and the hop for NSC/NDC edits.
inline AccuracyReport aggregate(const std::vector<EvalRecord>& records,
                                const std::vector<QuestionRecord>& questions) {
    std::map<std::string, const QuestionRecord*> by_id;
    for (const QuestionRecord& q : questions) by_id[q.id] = &q;

    AccuracyReport rep;
    std::map<std::pair<std::string, std::string>, std::set<std::string>> gated_bases;
    std::set<std::string> seen_eval_keys;

    for (const EvalRecord& r : records) {
        if (seen_eval_keys.count(r.key())) continue;  // resumed runs may repeat records
        seen_eval_keys.insert(r.key());

        auto qit = by_id.find(r.question_id);
        if (qit == by_id.end())
            throw std::runtime_error("eval record references unknown question id " +
                                     r.question_id);
        const QuestionRecord& q = *qit->second;

        if (r.method == "TPQ") {
            auto& gate_cell = rep.gate_rates[r.model];
            ++gate_cell.total;
            if (r.gate == GateResult::Passed) ++gate_cell.correct;
        }

        CellKey key{r.model, q.domain, to_string(r.task), r.method};
        rep.cells[key].add(r);

        if (r.method != "TPQ") {
            gated_bases[{r.model, to_string(r.task)}].insert(
                q.domain + "|" + q.base.subject + "|" + q.base.relation + "|" + q.base.object);
            if (r.method == "NSC" || r.method == "NDC") {
                auto m = edit_method_from_string(r.method);
                auto f = q.fpqs.find(*m);
                if (f != q.fpqs.end() && f->second.hop)
                    rep.hop_cells[{key, *f->second.hop}].add(r);
            }
            auto& overall = rep.overall[{r.model, to_string(r.task)}];
            if (r.final == FinalOutcome::Correct) ++overall.correct;
        }
    }

    // Overall denominator: six methods per gated-in base triplet.
    for (auto& [mk, cell] : rep.overall)
        cell.total = 6 * gated_bases[mk].size();

    rep.footers = {
        "FPQ-Judge can't ensure the answer is completely non-hallucinated.",
        "Accuracy denominators count only gated-in FPQs; gate pass-rates are reported "
        "alongside so cross-model comparisons expose differing denominators.",
        "Undefined (zero-total) cells are excluded from averages.",
    };
    return rep;
}

// Unweighted mean of per-model overall accuracies within each size
// class; undefined cells are excluded from the mean.
inline std::map<std::string, std::map<std::string, std::optional<double>>> size_class_average(
    const AccuracyReport& report, const std::map<std::string, std::string>& classes) {
    std::set<std::string> models;
    for (const auto& [mk, cell] : report.overall) models.insert(mk.first);
    for (const std::string& m : models)
        if (!classes.count(m))
            throw std::runtime_error("model " + m + " has no size class assigned");

    // class -> task -> (sum, count)
    std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> acc;
    for (const auto& [mk, cell] : report.overall) {
        auto a = cell.accuracy();
        if (!a) continue;
        auto& slot = acc[classes.at(mk.first)][mk.second];
        slot.first += *a;
        ++slot.second;
    }
    std::map<std::string, std::map<std::string, std::optional<double>>> out;
    for (const auto& [cls, tasks] : acc)
        for (const auto& [task, sc] : tasks)
            out[cls][task] = sc.second ? std::optional<double>(sc.first / sc.second)
                                       : std::nullopt;
    return out;
}

namespace detail {

inline json cell_map_to_json(const std::map<CellKey, AccuracyCell>& cells) {
    json out = json::array();
    for (const auto& [k, c] : cells) {
        json row = c.to_json();
        row["model"] = k.model;
        row["domain"] = k.domain;
        row["task"] = k.task;
        row["method"] = k.method;
        out.push_back(row);
    }
    return out;
}

// Minimal deterministic SVG bar chart.
inline std::string svg_bar_chart(const std::string& title,
                                 const std::vector<std::pair<std::string, double>>& bars) {
    const int w = 640, h = 360, pad = 50;
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
                      "\" height=\"" + std::to_string(h) + "\">\n";
    svg += "<text x=\"20\" y=\"24\" font-size=\"16\">" + title + "</text>\n";
    if (!bars.empty()) {
        const double bw = double(w - 2 * pad) / bars.size();
        for (std::size_t i = 0; i < bars.size(); ++i) {
            const double frac = std::clamp(bars[i].second, 0.0, 1.0);
            const double bh = frac * (h - 2 * pad);
            const double x = pad + i * bw;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3f", bars[i].second);
            svg += "<rect x=\"" + std::to_string(int(x + 4)) + "\" y=\"" +
                   std::to_string(int(h - pad - bh)) + "\" width=\"" + std::to_string(int(bw - 8)) +
                   "\" height=\"" + std::to_string(int(bh)) + "\" fill=\"#4878a8\"/>\n";
            svg += "<text x=\"" + std::to_string(int(x + 4)) + "\" y=\"" +
                   std::to_string(h - pad + 16) + "\" font-size=\"11\">" + bars[i].first +
                   "</text>\n";
            svg += "<text x=\"" + std::to_string(int(x + 4)) + "\" y=\"" +
                   std::to_string(int(h - pad - bh) - 4) + "\" font-size=\"11\">" + buf +
                   "</text>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

inline std::string svg_line_chart(const std::string& title,
                                  const std::map<std::string, std::vector<double>>& series) {
    const int w = 640, h = 360, pad = 50;
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
                      "\" height=\"" + std::to_string(h) + "\">\n";
    svg += "<text x=\"20\" y=\"24\" font-size=\"16\">" + title + "</text>\n";
    const std::vector<std::string> palette = {"#4878a8", "#a84848", "#48a860", "#a88c48",
                                             "#7848a8", "#48a0a8"};
    std::size_t si = 0;
    for (const auto& [name, ys] : series) {
        if (ys.size() < 2) { ++si; continue; }
        std::string points;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            const double x = pad + double(i) * (w - 2 * pad) / (ys.size() - 1);
            const double y = h - pad - std::clamp(ys[i], 0.0, 1.0) * (h - 2 * pad);
            points += std::to_string(int(x)) + "," + std::to_string(int(y)) + " ";
        }
        const std::string color = palette[si % palette.size()];
        svg += "<polyline fill=\"none\" stroke=\"" + color + "\" points=\"" + points + "\"/>\n";
        svg += "<text x=\"" + std::to_string(w - pad - 120) + "\" y=\"" +
               std::to_string(40 + 16 * int(si)) + "\" font-size=\"11\" fill=\"" + color + "\">" +
               name + "</text>\n";
        ++si;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace detail

// Writes report.json (full nested structure), report.csv (flat cells),
// and SVG plots: one bar chart per method comparison pair plus per-hop
// line charts for NSC and NDC. report.json and report.csv bytes are
// deterministic for a given report.
inline std::vector<std::string> emit_report(const AccuracyReport& report,
                                            const std::map<std::string, std::string>& classes,
                                            const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir))
        throw std::runtime_error("cannot create report directory " + out_dir);

    std::vector<std::string> written;
    auto write_file = [&](const std::string& name, const std::string& content) {
        const std::string path = out_dir + "/" + name;
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << content;
        written.push_back(path);
    };

    // report.json
    json j;
    j["cells"] = detail::cell_map_to_json(report.cells);
    j["hop_cells"] = json::array();
    for (const auto& [k, c] : report.hop_cells) {
        json row = c.to_json();
        row["model"] = k.first.model;
        row["domain"] = k.first.domain;
        row["task"] = k.first.task;
        row["method"] = k.first.method;
        row["hop"] = k.second;
        j["hop_cells"].push_back(row);
    }
    j["overall"] = json::array();
    for (const auto& [mk, c] : report.overall) {
        json row = c.to_json();
        row["model"] = mk.first;
        row["task"] = mk.second;
        j["overall"].push_back(row);
    }
    j["gate_rates"] = json::object();
    for (const auto& [m, c] : report.gate_rates) j["gate_rates"][m] = c.to_json();
    if (!classes.empty()) {
        j["size_class_averages"] = json::object();
        for (const auto& [cls, tasks] : size_class_average(report, classes))
            for (const auto& [task, a] : tasks)
                j["size_class_averages"][cls][task] = a ? json(*a) : json(nullptr);
    }
    // Method-pair comparisons: mean accuracy over models per method.
    j["comparisons"] = json::array();
    auto mean_for_method = [&](const std::string& method, const std::string& task)
        -> std::optional<double> {
        double sum = 0;
        std::size_t n = 0;
        for (const auto& [k, c] : report.cells)
            if (k.method == method && k.task == task)
                if (auto a = c.accuracy()) {
                    sum += *a;
                    ++n;
                }
        if (!n) return std::nullopt;
        return sum / n;
    };
    for (const auto& [a, b] : AccuracyReport::kComparisonPairs)
        for (const std::string task : {"discriminative", "generative"}) {
            auto ma = mean_for_method(a, task), mb = mean_for_method(b, task);
            j["comparisons"].push_back(json{{"pair", a + " vs " + b},
                                            {"task", task},
                                            {a, ma ? json(*ma) : json(nullptr)},
                                            {b, mb ? json(*mb) : json(nullptr)}});
        }
    j["footers"] = report.footers;
    write_file("report.json", j.dump(2) + "\n");

    // report.csv: one row per defined cell (hop cells included).
    std::string csv = "model,domain,task,method,hop,correct,total,abstain,unparseable,error,"
                      "accuracy\n";
    auto csv_row = [](const CellKey& k, const std::string& hop, const AccuracyCell& c) {
        char acc[32] = "";
        if (auto a = c.accuracy()) std::snprintf(acc, sizeof acc, "%.12g", *a);
        return k.model + "," + k.domain + "," + k.task + "," + k.method + "," + hop + "," +
               std::to_string(c.correct) + "," + std::to_string(c.total) + "," +
               std::to_string(c.abstain) + "," + std::to_string(c.unparseable) + "," +
               std::to_string(c.error) + "," + acc + "\n";
    };
    for (const auto& [k, c] : report.cells) csv += csv_row(k, "", c);
    for (const auto& [k, c] : report.hop_cells) csv += csv_row(k.first, std::to_string(k.second), c);
    write_file("report.csv", csv);

    // Plots.
    for (const auto& [a, b] : AccuracyReport::kComparisonPairs) {
        std::vector<std::pair<std::string, double>> bars;
        for (const std::string task : {"discriminative", "generative"})
            for (const std::string& method : {a, b})
                if (auto m = mean_for_method(method, task))
                    bars.emplace_back(method + " " + task.substr(0, 3), *m);
        std::string name = detail::lower(a) + "_vs_" + detail::lower(b) + ".svg";
        write_file(name, detail::svg_bar_chart(a + " vs " + b, bars));
    }
    for (const std::string method : {"NSC", "NDC"}) {
        std::map<std::string, std::vector<double>> series;
        for (const auto& [k, c] : report.hop_cells) {
            if (k.first.method != method) continue;
            auto& ys = series[k.first.model + " " + k.first.task];
            if (ys.empty()) ys.assign(5, 0.0);
            if (k.second >= 1 && k.second <= 5)
                ys[k.second - 1] = c.accuracy().value_or(0.0);
        }
        write_file(detail::lower(method) + "_hops.svg",
                   detail::svg_line_chart(method + " accuracy by hop", series));
    }
    return written;
}

}  // namespace kgfpq
