#pragma once
// Gated evaluation protocol: for each base triplet, the model first
// answers the Yes-No TPQ three times; only a hard-voted "Yes" (the
// model has the background knowledge) unlocks the six FPQs, which are
// themselves asked three times and hard-voted. Discriminative scoring
// is by Yes/No string match ("No" is correct on an FPQ); generative
// scoring votes over per-response judge verdicts.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgfpq/chat_backend.hpp"
#include "kgfpq/core.hpp"
#include "kgfpq/jsonl.hpp"
#include "kgfpq/judge.hpp"
#include "kgfpq/prompts.hpp"
#include "kgfpq/qgen.hpp"

namespace kgfpq {

struct ModelEndpoint {
    std::string name;
    ChatBackendConfig config;  // evaluation defaults: temperature 0.6, top_p 0.9

    static ModelEndpoint from_json(const json& j) {
        ModelEndpoint e;
        e.name = j.at("name");
        e.config = ChatBackendConfig::from_json(j);
        if (!j.contains("temperature")) e.config.temperature = 0.6;
        if (!j.contains("top_p")) e.config.top_p = 0.9;
        return e;
    }
};

enum class YesNoLabel { Yes, No, Unparseable, Error };

inline const char* to_string(YesNoLabel l) {
    switch (l) {
        case YesNoLabel::Yes: return "Yes";
        case YesNoLabel::No: return "No";
        case YesNoLabel::Unparseable: return "Unparseable";
        case YesNoLabel::Error: return "Error";
    }
    return "Error";
}

// Leading-token match after stripping punctuation/whitespace; if
// neither "yes" nor "no" leads, a whole-text word-boundary containment
// tie-break applies (the text must contain exactly one of the two).
inline YesNoLabel parse_yes_no(const std::string& raw) {
    auto is_word = [](unsigned char c) { return std::isalpha(c) != 0; };
    std::string first;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (is_word(raw[i])) {
            while (i < raw.size() && is_word(raw[i]))
                first += static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i++])));
            break;
        }
    }
    if (first == "yes") return YesNoLabel::Yes;
    if (first == "no") return YesNoLabel::No;

    bool has_yes = false, has_no = false;
    std::string word;
    auto flush = [&] {
        if (word == "yes") has_yes = true;
        if (word == "no") has_no = true;
        word.clear();
    };
    for (unsigned char c : raw) {
        if (is_word(c)) word += static_cast<char>(std::tolower(c));
        else flush();
    }
    flush();
    if (has_yes != has_no) return has_yes ? YesNoLabel::Yes : YesNoLabel::No;
    return YesNoLabel::Unparseable;
}

// Majority over exactly three labels; no label with >= 2 votes means no
// decision.
template <typename Label>
std::optional<Label> hard_vote(const std::vector<Label>& votes) {
    if (votes.size() != 3) throw std::invalid_argument("hard_vote expects exactly 3 votes");
    for (const Label& l : votes)
        if (std::count(votes.begin(), votes.end(), l) >= 2) return l;
    return std::nullopt;
}

enum class GateResult { Passed, Failed, Error };

inline const char* to_string(GateResult g) {
    switch (g) {
        case GateResult::Passed: return "passed";
        case GateResult::Failed: return "failed";
        case GateResult::Error: return "error";
    }
    return "error";
}

enum class FinalOutcome { Correct, Incorrect, Abstain, Error };

inline const char* to_string(FinalOutcome f) {
    switch (f) {
        case FinalOutcome::Correct: return "correct";
        case FinalOutcome::Incorrect: return "incorrect";
        case FinalOutcome::Abstain: return "abstain";
        case FinalOutcome::Error: return "error";
    }
    return "error";
}

enum class EvalTask { Discriminative, Generative };

inline const char* to_string(EvalTask t) {
    return t == EvalTask::Discriminative ? "discriminative" : "generative";
}

struct EvalRecord {
    std::string question_id;
    std::string model;
    EvalTask task = EvalTask::Discriminative;
    std::string method;  // "TPQ" or an edit-method acronym
    GateResult gate = GateResult::Error;
    std::vector<std::string> responses;  // raw, <= 3
    std::vector<std::string> votes;      // parsed labels, one per response
    FinalOutcome final = FinalOutcome::Error;

    std::string key() const {
        return model + "|" + question_id + "|" + to_string(task) + "|" + method;
    }

    json to_json() const {
        return json{{"question_id", question_id}, {"model", model},
                    {"task", to_string(task)},    {"method", method},
                    {"gate", to_string(gate)},    {"responses", responses},
                    {"votes", votes},             {"final", to_string(final)}};
    }

    static EvalRecord from_json(const json& j) {
        EvalRecord r;
        r.question_id = j.at("question_id");
        r.model = j.at("model");
        r.task = j.at("task") == "generative" ? EvalTask::Generative : EvalTask::Discriminative;
        r.method = j.at("method");
        const std::string g = j.at("gate");
        r.gate = g == "passed" ? GateResult::Passed
                               : (g == "failed" ? GateResult::Failed : GateResult::Error);
        r.responses = j.at("responses").get<std::vector<std::string>>();
        r.votes = j.at("votes").get<std::vector<std::string>>();
        const std::string f = j.at("final");
        r.final = f == "correct"
                      ? FinalOutcome::Correct
                      : (f == "incorrect" ? FinalOutcome::Incorrect
                                          : (f == "abstain" ? FinalOutcome::Abstain
                                                            : FinalOutcome::Error));
        return r;
    }
};

// Sends the Yes-No evaluation prompt once; transport failures become an
// error-marked response rather than aborting the run.
inline std::string ask_yes_no(const ModelEndpoint& endpoint, ChatTransport& transport,
                              const std::string& question, bool* errored = nullptr) {
    if (question.empty()) throw std::invalid_argument("ask_yes_no: empty question");
    try {
        std::string raw = transport.complete(endpoint.config, yes_no_eval_prompt(question));
        if (errored) *errored = false;
        return raw;
    } catch (const TransportError& e) {
        if (errored) *errored = true;
        return std::string("<error> ") + e.what();
    }
}

struct EvalOptions {
    std::set<EvalTask> tasks = {EvalTask::Discriminative, EvalTask::Generative};
    std::string checkpoint_path;  // empty disables checkpointing
    bool resume = false;
};

class EvalRunner {
public:
    EvalRunner(std::vector<ModelEndpoint> endpoints, JudgeConfig judge_cfg,
               ChatTransport& model_transport, ChatTransport* judge_transport,
               EvalOptions options)
        : endpoints_(std::move(endpoints)),
          judge_cfg_(std::move(judge_cfg)),
          model_transport_(model_transport),
          judge_transport_(judge_transport),
          options_(std::move(options)) {}

    // Asks the Yes-No TPQ three times and hard-votes; passed iff the
    // final label is Yes. On a failed gate no FPQ query is issued.
    GateResult run_gate(const ModelEndpoint& endpoint, const QuestionRecord& yesno_record,
                        EvalRecord& tpq_record) {
        if (yesno_record.format != QuestionFormat::YesNo)
            throw std::invalid_argument("run_gate needs a Yes-No record");
        std::vector<YesNoLabel> labels;
        for (int i = 0; i < 3; ++i) {
            bool errored = false;
            std::string raw = ask_yes_no(endpoint, model_transport_, yesno_record.tpq_text,
                                         &errored);
            tpq_record.responses.push_back(raw);
            YesNoLabel l = errored ? YesNoLabel::Error : parse_yes_no(raw);
            labels.push_back(l);
            tpq_record.votes.emplace_back(to_string(l));
        }
        auto final_label = hard_vote(labels);
        GateResult gate;
        if (!final_label) {
            gate = GateResult::Failed;
            tpq_record.final = FinalOutcome::Abstain;
        } else if (*final_label == YesNoLabel::Yes) {
            gate = GateResult::Passed;
            tpq_record.final = FinalOutcome::Correct;  // TPQ: Yes is correct
        } else if (*final_label == YesNoLabel::Error) {
            gate = GateResult::Error;
            tpq_record.final = FinalOutcome::Error;
        } else {
            gate = GateResult::Failed;
            tpq_record.final = FinalOutcome::Incorrect;
        }
        tpq_record.gate = gate;
        return gate;
    }

    std::vector<EvalRecord> run(const std::vector<QuestionRecord>& records) {
        load_checkpoint();

        // Pair the Yes-No and WH records of each base triplet.
        struct Group {
            const QuestionRecord* yesno = nullptr;
            const QuestionRecord* wh = nullptr;
        };
        std::map<std::string, Group> groups;
        for (const QuestionRecord& r : records) {
            Group& g = groups[r.domain + "|" + r.base.subject + "|" + r.base.relation + "|" +
                              r.base.object];
            (r.format == QuestionFormat::YesNo ? g.yesno : g.wh) = &r;
        }

        std::vector<EvalRecord> out;
        for (const ModelEndpoint& endpoint : endpoints_) {
            for (const auto& [base_key, group] : groups) {
                if (!group.yesno) continue;  // no Yes-No TPQ, gate impossible
                run_group(endpoint, group.yesno, group.wh, out);
            }
        }
        return out;
    }

private:
    void run_group(const ModelEndpoint& endpoint, const QuestionRecord* yesno,
                   const QuestionRecord* wh, std::vector<EvalRecord>& out) {
        EvalRecord tpq_rec;
        tpq_rec.question_id = yesno->id;
        tpq_rec.model = endpoint.name;
        tpq_rec.task = EvalTask::Discriminative;
        tpq_rec.method = "TPQ";

        GateResult gate;
        if (const EvalRecord* done = completed(tpq_rec.key())) {
            tpq_rec = *done;
            gate = done->gate;
        } else {
            gate = run_gate(endpoint, *yesno, tpq_rec);
            commit(tpq_rec);
        }
        out.push_back(tpq_rec);

        if (gate != GateResult::Passed) return;

        if (options_.tasks.count(EvalTask::Discriminative))
            for (const auto& [m, fpq] : yesno->fpqs)
                out.push_back(run_discriminative(endpoint, *yesno, m, fpq, gate));

        if (options_.tasks.count(EvalTask::Generative) && wh)
            for (const auto& [m, fpq] : wh->fpqs)
                out.push_back(run_generative(endpoint, *wh, m, fpq, gate));
    }

    EvalRecord run_discriminative(const ModelEndpoint& endpoint, const QuestionRecord& rec,
                                  EditMethod m, const FpqEntry& fpq, GateResult gate) {
        EvalRecord r;
        r.question_id = rec.id;
        r.model = endpoint.name;
        r.task = EvalTask::Discriminative;
        r.method = to_string(m);
        r.gate = gate;
        if (const EvalRecord* done = completed(r.key())) return *done;

        std::vector<YesNoLabel> labels;
        for (int i = 0; i < 3; ++i) {
            bool errored = false;
            std::string raw = ask_yes_no(endpoint, model_transport_, fpq.fpq_text, &errored);
            r.responses.push_back(raw);
            YesNoLabel l = errored ? YesNoLabel::Error : parse_yes_no(raw);
            labels.push_back(l);
            r.votes.emplace_back(to_string(l));
        }
        auto final_label = hard_vote(labels);
        if (!final_label) r.final = FinalOutcome::Abstain;
        else if (*final_label == YesNoLabel::No) r.final = FinalOutcome::Correct;  // FPQ: No
        else if (*final_label == YesNoLabel::Error) r.final = FinalOutcome::Error;
        else r.final = FinalOutcome::Incorrect;  // Yes or Unparseable majority
        commit(r);
        return r;
    }

    EvalRecord run_generative(const ModelEndpoint& endpoint, const QuestionRecord& rec,
                              EditMethod m, const FpqEntry& fpq, GateResult gate) {
        EvalRecord r;
        r.question_id = rec.id;
        r.model = endpoint.name;
        r.task = EvalTask::Generative;
        r.method = to_string(m);
        r.gate = gate;
        if (const EvalRecord* done = completed(r.key())) return *done;

        std::vector<JudgeVerdict::Outcome> verdicts;
        for (int i = 0; i < 3; ++i) {
            std::string raw;
            bool errored = false;
            try {
                raw = model_transport_.complete(endpoint.config, wh_eval_prompt(fpq.fpq_text));
            } catch (const TransportError& e) {
                raw = std::string("<error> ") + e.what();
                errored = true;
            }
            r.responses.push_back(raw);
            if (errored || raw.empty()) {
                verdicts.push_back(JudgeVerdict::Outcome::Error);
                r.votes.emplace_back("error");
                continue;
            }
            JudgeVerdict v = judge_answer(fpq.fpq_text, raw, rec.base, original_label(rec),
                                          edited_label(rec, fpq), judge_cfg_, judge_transport_);
            verdicts.push_back(v.outcome);
            r.votes.emplace_back(v.outcome == JudgeVerdict::Outcome::Correct
                                     ? "correct"
                                     : (v.outcome == JudgeVerdict::Outcome::Incorrect
                                            ? "incorrect"
                                            : "error"));
        }
        auto final_v = hard_vote(verdicts);
        if (!final_v) r.final = FinalOutcome::Abstain;
        else if (*final_v == JudgeVerdict::Outcome::Correct) r.final = FinalOutcome::Correct;
        else if (*final_v == JudgeVerdict::Outcome::Incorrect) r.final = FinalOutcome::Incorrect;
        else r.final = FinalOutcome::Error;
        commit(r);
        return r;
    }

    // The judge compares the answer against the original and edited
    // object labels; the question record carries ids, so label lookup
    // goes through the label map captured at load time.
    std::string original_label(const QuestionRecord& rec) const {
        auto it = labels_.find(rec.base.object);
        return it == labels_.end() ? rec.base.object : it->second;
    }
    std::string edited_label(const QuestionRecord&, const FpqEntry& fpq) const {
        auto it = labels_.find(fpq.edited_object);
        return it == labels_.end() ? fpq.edited_object : it->second;
    }

public:
    // Optional id -> label map used by the heuristic judge; without it,
    // ids double as labels (fine for fixtures).
    void set_labels(std::map<EntityId, std::string> labels) { labels_ = std::move(labels); }

private:
    const EvalRecord* completed(const std::string& key) const {
        auto it = checkpoint_.find(key);
        return it == checkpoint_.end() ? nullptr : &it->second;
    }

    void commit(const EvalRecord& r) {
        checkpoint_.emplace(r.key(), r);
        if (!options_.checkpoint_path.empty()) {
            if (!writer_)
                writer_ = std::make_unique<JsonlWriter>(options_.checkpoint_path, true);
            writer_->write(r.to_json());
        }
    }

    void load_checkpoint() {
        if (!options_.resume || options_.checkpoint_path.empty()) return;
        std::ifstream probe(options_.checkpoint_path);
        if (!probe) return;
        probe.close();
        for_each_jsonl(options_.checkpoint_path, [&](const json& j, std::size_t) {
            EvalRecord r = EvalRecord::from_json(j);
            checkpoint_.emplace(r.key(), r);
        });
    }

    std::vector<ModelEndpoint> endpoints_;
    JudgeConfig judge_cfg_;
    ChatTransport& model_transport_;
    ChatTransport* judge_transport_;
    EvalOptions options_;
    std::map<EntityId, std::string> labels_;
    std::unordered_map<std::string, EvalRecord> checkpoint_;
    std::unique_ptr<JsonlWriter> writer_;
};

}  // namespace kgfpq
