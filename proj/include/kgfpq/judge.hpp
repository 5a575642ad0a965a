#pragma once
// Generative-task judging: decides whether a free-form answer to a
// WH-format FPQ accepted the false premise. Remote mode sends the judge
// instruction to a configured endpoint; heuristic mode is a
// deterministic offline baseline whose verdicts are tagged separately
// and never mixed with remote ones in a report column.

#include <algorithm>
#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kgfpq/chat_backend.hpp"
#include "kgfpq/core.hpp"
#include "kgfpq/prompts.hpp"
#include "kgfpq/qgen.hpp"

namespace kgfpq {

enum class JudgeSource { Remote, Heuristic };

struct JudgeVerdict {
    enum class Outcome { Correct, Incorrect, Error };
    Outcome outcome = Outcome::Error;
    JudgeSource source = JudgeSource::Heuristic;
    std::string raw;  // remote reply, or the matched rule trace
};

struct JudgeConfig {
    bool remote = false;
    ChatBackendConfig backend;
};

namespace detail {

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Negation cues that, in the same sentence as the edited-object label,
// count as denying the premise.
inline const std::vector<std::string> kNegationCues = {
    "not", "no ", "never", "n't", "no record", "incorrect", "false", "untrue", "did not",
    "was not", "is not", "there is no",
};

inline bool contains_negation(const std::string& sentence_lower) {
    for (const auto& cue : kNegationCues)
        if (sentence_lower.find(cue) != std::string::npos) return true;
    return false;
}

inline std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        cur += c;
        if (c == '.' || c == '?' || c == '!' || c == ';') {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace detail

// Deterministic baseline: correct iff the answer denies the premise
// (negation adjacent to the edited label, or asserts the original
// label) and no sentence affirms the edited object as fact.
inline JudgeVerdict heuristic_judge(const std::string& answer,
                                    const std::string& original_object_label,
                                    const std::string& edited_object_label) {
    const std::string answer_lower = detail::lower(answer);
    const std::string edited_lower = detail::lower(edited_object_label);
    const std::string original_lower = detail::lower(original_object_label);

    bool denies = false;
    bool affirms = false;
    std::string trace;
    for (const std::string& sentence : detail::split_sentences(answer_lower)) {
        const bool mentions_edited = sentence.find(edited_lower) != std::string::npos;
        const bool negated = detail::contains_negation(sentence);
        if (mentions_edited && negated) {
            denies = true;
            if (trace.empty()) trace = "rule:negation-near-edited-label";
        } else if (mentions_edited && !negated) {
            affirms = true;
        }
    }
    if (answer_lower.find(original_lower) != std::string::npos && !original_lower.empty()) {
        denies = true;
        if (trace.empty()) trace = "rule:asserts-original-label";
    }
    if (affirms) trace += (trace.empty() ? "" : "; ") + std::string("rule:affirms-edited-label");
    if (trace.empty()) trace = "rule:no-denial-evidence";

    JudgeVerdict v;
    v.source = JudgeSource::Heuristic;
    v.outcome = (denies && !affirms) ? JudgeVerdict::Outcome::Correct
                                     : JudgeVerdict::Outcome::Incorrect;
    v.raw = trace;
    return v;
}

// Parses a remote judge reply: leading Yes -> factual (correct),
// leading No -> misled (incorrect), anything else is an error verdict
// counted separately, never silently scored.
inline JudgeVerdict parse_remote_judge_reply(const std::string& reply) {
    JudgeVerdict v;
    v.source = JudgeSource::Remote;
    v.raw = reply;
    std::size_t i = reply.find_first_not_of(" \t\r\n\"'");
    if (i == std::string::npos) {
        v.outcome = JudgeVerdict::Outcome::Error;
        return v;
    }
    const std::string low = detail::lower(reply.substr(i, 3));
    if (low.rfind("yes", 0) == 0) v.outcome = JudgeVerdict::Outcome::Correct;
    else if (low.rfind("no", 0) == 0) v.outcome = JudgeVerdict::Outcome::Incorrect;
    else v.outcome = JudgeVerdict::Outcome::Error;
    return v;
}

inline JudgeVerdict judge_answer(const std::string& question, const std::string& answer,
                                 const Triplet& base, const std::string& original_object_label,
                                 const std::string& edited_object_label, const JudgeConfig& cfg,
                                 ChatTransport* transport = nullptr) {
    (void)base;
    if (answer.empty()) throw std::invalid_argument("judge_answer: empty answer");
    if (!cfg.remote) return heuristic_judge(answer, original_object_label, edited_object_label);
    if (!transport) throw std::invalid_argument("remote judging requires a transport");
    try {
        const std::string reply = transport->complete(cfg.backend, judge_prompt(question, answer));
        return parse_remote_judge_reply(reply);
    } catch (const TransportError& e) {
        JudgeVerdict v;
        v.source = JudgeSource::Remote;
        v.outcome = JudgeVerdict::Outcome::Error;
        v.raw = e.what();
        return v;
    }
}

// --- judge training corpus -------------------------------------------

enum class CorpusLabel { Factual, NonFactual };
enum class CorpusOrigin { ReferenceGenerated, ModelAnnotated };

struct JudgeTrainingExample {
    std::string question;
    std::string answer;
    CorpusLabel label = CorpusLabel::Factual;
    CorpusOrigin origin = CorpusOrigin::ReferenceGenerated;

    // Serialized in instruction-tuning layout.
    json to_json() const {
        return json{{"instruction", kJudgeInstruction},
                    {"input", judge_input(question, answer)},
                    {"output", label == CorpusLabel::Factual ? "Yes" : "No"}};
    }
};

struct CorpusSummary {
    std::size_t factual = 0;
    std::size_t non_factual = 0;
    std::vector<std::string> failures;
};

// For each sampled WH-format FPQ, generates one factual reference
// answer (grounded in the true triplet) and one contradicting answer,
// keeping the two classes balanced.
inline std::vector<JudgeTrainingExample> emit_judge_corpus(
    const std::vector<QuestionRecord>& records, const KnowledgeGraph& g,
    const ChatBackendConfig& cfg, ChatTransport& transport, std::size_t n_per_class,
    CorpusSummary* summary = nullptr) {
    CorpusSummary local;
    std::vector<JudgeTrainingExample> out;
    for (const QuestionRecord& rec : records) {
        if (local.factual >= n_per_class) break;
        if (rec.format != QuestionFormat::WH) continue;
        const std::string subject_label = g.entity(rec.base.subject).label;
        const std::string object_label = g.entity(rec.base.object).label;
        for (const auto& [m, fpq] : rec.fpqs) {
            if (local.factual >= n_per_class) break;
            std::string factual_answer, non_factual_answer;
            try {
                factual_answer = transport.complete(
                    cfg, build_answer_prompt(true, fpq.fpq_text, subject_label, rec.base.relation,
                                             object_label));
                non_factual_answer = transport.complete(
                    cfg, build_answer_prompt(false, fpq.fpq_text, subject_label,
                                             rec.base.relation, object_label));
            } catch (const TransportError& e) {
                local.failures.push_back(rec.id + "/" + to_string(m) + ": " + e.what());
                continue;
            }
            out.push_back({fpq.fpq_text, factual_answer, CorpusLabel::Factual,
                           CorpusOrigin::ReferenceGenerated});
            out.push_back({fpq.fpq_text, non_factual_answer, CorpusLabel::NonFactual,
                           CorpusOrigin::ReferenceGenerated});
            ++local.factual;
            ++local.non_factual;
        }
    }
    if (summary) *summary = std::move(local);
    return out;
}

}  // namespace kgfpq
