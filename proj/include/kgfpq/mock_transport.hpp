#pragma once
// Scripted chat transports for tests and offline desk runs. The call
// log makes request accounting (gate short-circuit, resume idempotence)
// directly assertable.

#include <map>
#include <string>
#include <vector>

#include "kgfpq/chat_backend.hpp"
#include "kgfpq/prompts.hpp"
#include "kgfpq/qgen.hpp"

namespace kgfpq {

// Extracts the question from an evaluation prompt, or empty if the
// prompt is not one.
inline std::string question_of_eval_prompt(const std::string& prompt) {
    const std::string prefix = "Question: ";
    if (prompt.rfind(prefix, 0) != 0) return "";
    for (const std::string& suffix :
         {std::string(" Respond solely with \"Yes\" or \"No\"."),
          std::string(" Answer the question with an answer of no more than three sentences.")}) {
        if (prompt.size() > prefix.size() + suffix.size() &&
            prompt.compare(prompt.size() - suffix.size(), suffix.size(), suffix) == 0)
            return prompt.substr(prefix.size(), prompt.size() - prefix.size() - suffix.size());
    }
    return "";
}

class LoggingTransport : public ChatTransport {
public:
    const std::vector<std::string>& calls() const { return calls_; }
    std::size_t call_count() const { return calls_.size(); }

protected:
    void log(const std::string& prompt) { calls_.push_back(prompt); }

private:
    std::vector<std::string> calls_;
};

// Replies with a fixed string to every prompt.
class ConstantTransport : public LoggingTransport {
public:
    explicit ConstantTransport(std::string reply) : reply_(std::move(reply)) {}
    std::string complete(const ChatBackendConfig&, const std::string& prompt) override {
        log(prompt);
        return reply_;
    }

private:
    std::string reply_;
};

// Exact prompt -> reply map; unknown prompts raise a transport error.
class ScriptedTransport : public LoggingTransport {
public:
    explicit ScriptedTransport(std::map<std::string, std::string> script)
        : script_(std::move(script)) {}
    std::string complete(const ChatBackendConfig&, const std::string& prompt) override {
        log(prompt);
        auto it = script_.find(prompt);
        if (it == script_.end()) throw TransportError("unscripted prompt: " + prompt);
        return it->second;
    }

private:
    std::map<std::string, std::string> script_;
};

// Always fails, for outage paths.
class FailingTransport : public LoggingTransport {
public:
    std::string complete(const ChatBackendConfig&, const std::string& prompt) override {
        log(prompt);
        throw TransportError("simulated outage");
    }
};

// Knows the question set and answers like a model that recognizes
// every false premise: "Yes" on TPQs, "No" on FPQs, and a denial
// naming the original object on WH FPQs.
class OracleTransport : public LoggingTransport {
public:
    OracleTransport(const std::vector<QuestionRecord>& records,
                    std::map<EntityId, std::string> labels)
        : labels_(std::move(labels)) {
        for (const QuestionRecord& r : records) {
            tpqs_.emplace(r.tpq_text);
            for (const auto& [m, f] : r.fpqs)
                fpq_info_[f.fpq_text] = {labels_.count(r.base.object) ? labels_.at(r.base.object)
                                                                      : r.base.object,
                                         labels_.count(f.edited_object)
                                             ? labels_.at(f.edited_object)
                                             : f.edited_object};
        }
    }

    std::string complete(const ChatBackendConfig&, const std::string& prompt) override {
        log(prompt);
        const std::string q = question_of_eval_prompt(prompt);
        if (q.empty()) throw TransportError("oracle transport only answers evaluation prompts");
        if (tpqs_.count(q)) return "Yes";
        auto it = fpq_info_.find(q);
        if (it == fpq_info_.end()) throw TransportError("unknown question: " + q);
        if (prompt.find("Respond solely") != std::string::npos) return "No";
        return "That premise is not correct: it was not " + it->second.second + ". The actual " +
               "answer involves " + it->second.first + ".";
    }

private:
    std::set<std::string> tpqs_;
    std::map<std::string, std::pair<std::string, std::string>> fpq_info_;  // original, edited
    std::map<EntityId, std::string> labels_;
};

// Affirms everything: "Yes" on Yes-No prompts, restates the question as
// fact on WH prompts. Scores TPQ accuracy 1.0 and FPQ accuracy 0.0.
class SycophantTransport : public LoggingTransport {
public:
    std::string complete(const ChatBackendConfig&, const std::string& prompt) override {
        log(prompt);
        if (prompt.find("Respond solely") != std::string::npos) return "Yes";
        std::string q = question_of_eval_prompt(prompt);
        if (!q.empty() && q.back() == '?') q.pop_back();
        return "Certainly, " + q + ", and the records confirm it happened exactly that way.";
    }
};

}  // namespace kgfpq
