#pragma once
// Question generation: one TPQ per true triplet per format, six FPQs
// derived by exact object-label substitution. Two backends: a
// deterministic relation-phrase template renderer and a remote chat
// model driven by the fixed few-shot prompts.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kgfpq/chat_backend.hpp"
#include "kgfpq/core.hpp"
#include "kgfpq/editor.hpp"
#include "kgfpq/kg_store.hpp"
#include "kgfpq/prompts.hpp"

namespace kgfpq {

enum class ReviewStatus { Unreviewed, Approved, Corrected };

inline const char* to_string(ReviewStatus s) {
    switch (s) {
        case ReviewStatus::Unreviewed: return "unreviewed";
        case ReviewStatus::Approved: return "approved";
        case ReviewStatus::Corrected: return "corrected";
    }
    return "unreviewed";
}

inline ReviewStatus review_status_from_string(const std::string& s) {
    if (s == "approved") return ReviewStatus::Approved;
    if (s == "corrected") return ReviewStatus::Corrected;
    return ReviewStatus::Unreviewed;
}

struct FpqEntry {
    EntityId edited_object;
    std::string fpq_text;
    std::optional<int> hop;
};

struct QuestionRecord {
    std::string id;
    std::string domain;
    QuestionFormat format = QuestionFormat::YesNo;
    Triplet base;
    std::string tpq_text;
    std::map<EditMethod, FpqEntry> fpqs;
    std::string backend;
    ReviewStatus review_status = ReviewStatus::Unreviewed;

    json to_json() const {
        json fj = json::object();
        for (const auto& [m, f] : fpqs)
            fj[to_string(m)] = json{{"edited_object", f.edited_object},
                                    {"fpq_text", f.fpq_text},
                                    {"hop", f.hop ? json(*f.hop) : json(nullptr)}};
        return json{{"id", id},
                    {"domain", domain},
                    {"format", to_string(format)},
                    {"subject", base.subject},
                    {"relation", base.relation},
                    {"object", base.object},
                    {"tpq_text", tpq_text},
                    {"fpqs", fj},
                    {"backend", backend},
                    {"review_status", to_string(review_status)}};
    }

    static QuestionRecord from_json(const json& j) {
        QuestionRecord r;
        r.id = j.at("id");
        r.domain = j.at("domain");
        r.format = *question_format_from_string(j.at("format").get<std::string>());
        r.base = {j.at("subject"), j.at("relation"), j.at("object")};
        r.tpq_text = j.at("tpq_text");
        for (const auto& [k, v] : j.at("fpqs").items()) {
            FpqEntry f{v.at("edited_object"), v.at("fpq_text"), std::nullopt};
            if (!v.at("hop").is_null()) f.hop = v.at("hop").get<int>();
            r.fpqs.emplace(*edit_method_from_string(k), f);
        }
        r.backend = j.at("backend");
        r.review_status = review_status_from_string(j.at("review_status").get<std::string>());
        return r;
    }
};

// --- substitution ----------------------------------------------------

enum class SubstitutionFailure { ZeroOccurrences, MultipleOccurrences };

struct SubstitutionError : std::runtime_error {
    SubstitutionError(SubstitutionFailure k, const std::string& label)
        : std::runtime_error(std::string(k == SubstitutionFailure::ZeroOccurrences
                                             ? "label not found in question: "
                                             : "label occurs more than once in question: ") +
                             label),
          kind(k) {}
    SubstitutionFailure kind;
};

inline std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    if (needle.empty()) return 0;
    std::size_t n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + 1))
        ++n;
    return n;
}

// Replaces the single case-sensitive occurrence of original_label with
// edited_label; everything else is byte-identical.
inline std::string derive_fpq(const std::string& tpq_text, const std::string& original_label,
                              const std::string& edited_label) {
    const std::size_t n = count_occurrences(tpq_text, original_label);
    if (n == 0) throw SubstitutionError(SubstitutionFailure::ZeroOccurrences, original_label);
    if (n > 1) throw SubstitutionError(SubstitutionFailure::MultipleOccurrences, original_label);
    std::string out = tpq_text;
    out.replace(out.find(original_label), original_label.size(), edited_label);
    return out;
}

// --- backends --------------------------------------------------------

class QuestionBackend {
public:
    virtual ~QuestionBackend() = default;
    virtual std::string name() const = 0;
    virtual std::string generate(const std::string& subject_label, const std::string& relation,
                                 const std::string& object_label, QuestionFormat fmt) = 0;
};

struct MissingPhrase : std::runtime_error {
    explicit MissingPhrase(const std::string& relation)
        : std::runtime_error("no phrase table entry for relation '" + relation + "'") {}
};

// Deterministic renderer from a relation phrase table:
//   relation -> { "yesno_phrase": "die in",
//                 "wh_template": "Where in {object} did {subject} die?" }
// Yes-No questions render as "Did {subject} {yesno_phrase} {object}?".
class TemplateBackend : public QuestionBackend {
public:
    struct Phrases {
        std::string yesno_phrase;
        std::string wh_template;
    };

    explicit TemplateBackend(std::map<std::string, Phrases> table) : table_(std::move(table)) {}

    static TemplateBackend from_json(const json& j) {
        std::map<std::string, Phrases> table;
        for (const auto& [rel, v] : j.items())
            table[rel] = Phrases{v.at("yesno_phrase"), v.at("wh_template")};
        return TemplateBackend(std::move(table));
    }

    std::string name() const override { return "template"; }

    std::string generate(const std::string& subject_label, const std::string& relation,
                         const std::string& object_label, QuestionFormat fmt) override {
        auto it = table_.find(relation);
        if (it == table_.end()) throw MissingPhrase(relation);
        if (fmt == QuestionFormat::YesNo)
            return "Did " + subject_label + " " + it->second.yesno_phrase + " " + object_label +
                   "?";
        std::string out = it->second.wh_template;
        replace_all(out, "{subject}", subject_label);
        replace_all(out, "{object}", object_label);
        return out;
    }

private:
    static void replace_all(std::string& s, const std::string& from, const std::string& to) {
        for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos))
            s.replace(pos, from.size(), to), pos += to.size();
    }

    std::map<std::string, Phrases> table_;
};

class ChatQuestionBackend : public QuestionBackend {
public:
    ChatQuestionBackend(ChatBackendConfig cfg, std::shared_ptr<ChatTransport> transport,
                        PromptSpec yesno_spec, PromptSpec wh_spec)
        : cfg_(std::move(cfg)),
          transport_(std::move(transport)),
          yesno_spec_(std::move(yesno_spec)),
          wh_spec_(std::move(wh_spec)) {}

    std::string name() const override { return "chat:" + cfg_.model; }

    std::string generate(const std::string& subject_label, const std::string& relation,
                         const std::string& object_label, QuestionFormat fmt) override {
        const PromptSpec& spec = fmt == QuestionFormat::YesNo ? yesno_spec_ : wh_spec_;
        const std::string prompt =
            build_question_prompt(spec, fmt, subject_label, relation, object_label);
        std::string reply = transport_->complete(cfg_, prompt);
        // trim surrounding whitespace from the model reply
        const auto b = reply.find_first_not_of(" \t\r\n");
        const auto e = reply.find_last_not_of(" \t\r\n");
        return b == std::string::npos ? std::string{} : reply.substr(b, e - b + 1);
    }

private:
    ChatBackendConfig cfg_;
    std::shared_ptr<ChatTransport> transport_;
    PromptSpec yesno_spec_;
    PromptSpec wh_spec_;
};

// --- TPQ generation with label checks --------------------------------

inline std::string generate_tpq(const Triplet& t, QuestionFormat fmt, const KnowledgeGraph& g,
                                QuestionBackend& backend) {
    return backend.generate(g.entity(t.subject).label, t.relation, g.entity(t.object).label, fmt);
}

struct TpqFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A usable TPQ contains the subject label and exactly one occurrence of
// the object label. One regeneration on failure, then hard failure.
inline std::string generate_checked_tpq(const Triplet& t, QuestionFormat fmt,
                                        const KnowledgeGraph& g, QuestionBackend& backend) {
    const std::string subject_label = g.entity(t.subject).label;
    const std::string object_label = g.entity(t.object).label;
    std::string last_reason;
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string text;
        try {
            text = generate_tpq(t, fmt, g, backend);
        } catch (const MissingPhrase& e) {
            throw TpqFailure(e.what());  // deterministic backend, retry is pointless
        } catch (const std::exception& e) {
            last_reason = e.what();
            continue;
        }
        if (text.find(subject_label) == std::string::npos) {
            last_reason = "generated question lacks subject label '" + subject_label + "'";
            continue;
        }
        const std::size_t n = count_occurrences(text, object_label);
        if (n != 1) {
            last_reason = "object label '" + object_label + "' occurs " + std::to_string(n) +
                          " times in generated question";
            continue;
        }
        return text;
    }
    throw TpqFailure(last_reason);
}

// --- record assembly -------------------------------------------------

struct BuildSummary {
    std::size_t records = 0;
    std::size_t fpqs = 0;
    std::vector<std::string> skips;  // human-readable reasons
};

inline std::vector<QuestionRecord> build_question_records(const std::vector<EditBundle>& bundles,
                                                          QuestionFormat fmt,
                                                          const KnowledgeGraph& g,
                                                          QuestionBackend& backend,
                                                          const std::string& domain,
                                                          BuildSummary* summary = nullptr) {
    if (bundles.empty()) throw std::runtime_error("no edit bundles to generate questions from");
    BuildSummary local;
    std::vector<QuestionRecord> out;
    std::size_t index = 0;
    for (const EditBundle& b : bundles) {
        ++index;
        const std::string base_key =
            b.base.subject + "|" + b.base.relation + "|" + b.base.object;
        QuestionRecord rec;
        rec.id = domain + "-" + std::string(to_string(fmt)) + "-" +
                 std::to_string(fnv1a(base_key) & 0xffffffffULL);
        rec.domain = domain;
        rec.format = fmt;
        rec.base = b.base;
        rec.backend = backend.name();
        try {
            rec.tpq_text = generate_checked_tpq(b.base, fmt, g, backend);
        } catch (const TpqFailure& e) {
            local.skips.push_back("triplet " + base_key + ": " + e.what());
            continue;
        }
        const std::string object_label = g.entity(b.base.object).label;
        for (const auto& [m, ft] : b.edits) {
            const std::string edited_label = g.entity(ft.edited_object).label;
            try {
                rec.fpqs[m] =
                    FpqEntry{ft.edited_object, derive_fpq(rec.tpq_text, object_label, edited_label),
                             ft.hop};
            } catch (const SubstitutionError& e) {
                local.skips.push_back("triplet " + base_key + " method " +
                                      std::string(to_string(m)) + ": " + e.what());
            }
        }
        local.fpqs += rec.fpqs.size();
        out.push_back(std::move(rec));
    }
    local.records = out.size();
    std::sort(out.begin(), out.end(),
              [](const QuestionRecord& a, const QuestionRecord& b) { return a.id < b.id; });
    if (summary) *summary = std::move(local);
    return out;
}

// --- feasibility probe -----------------------------------------------

struct ProbeRelationStats {
    std::size_t attempts = 0;
    std::size_t failures = 0;
    double failure_rate() const { return attempts ? double(failures) / double(attempts) : 0.0; }
};

struct ProbeReport {
    std::map<std::string, ProbeRelationStats> by_relation;
    std::vector<std::string> suggested_blacklist;
    std::vector<std::string> failure_log;
    double threshold = 0.2;

    json to_json() const {
        json rel = json::object();
        for (const auto& [r, s] : by_relation)
            rel[r] = json{{"attempts", s.attempts},
                          {"failures", s.failures},
                          {"failure_rate", s.failure_rate()}};
        return json{{"threshold", threshold},
                    {"by_relation", rel},
                    {"suggested_blacklist", suggested_blacklist},
                    {"failure_log", failure_log}};
    }
};

// Samples k eligible triplets, generates TPQs, and flags relations
// whose label-check failure rate exceeds the threshold.
inline ProbeReport feasibility_probe(const KnowledgeGraph& g, const DomainFilter& f,
                                     std::size_t k, QuestionBackend& backend, std::uint64_t seed,
                                     QuestionFormat fmt = QuestionFormat::YesNo,
                                     double threshold = 0.2) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    auto sample = g.extract_true_triplets(f, k, seed);
    ProbeReport report;
    report.threshold = threshold;
    for (const Triplet& t : sample.triplets) {
        auto& stats = report.by_relation[t.relation];
        ++stats.attempts;
        try {
            generate_checked_tpq(t, fmt, g, backend);
        } catch (const std::exception& e) {
            ++stats.failures;
            report.failure_log.push_back(t.subject + "|" + t.relation + "|" + t.object + ": " +
                                         e.what());
        }
    }
    for (const auto& [r, s] : report.by_relation)
        if (s.failure_rate() > threshold) report.suggested_blacklist.push_back(r);
    return report;
}

}  // namespace kgfpq
