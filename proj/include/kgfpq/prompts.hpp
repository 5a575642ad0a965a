#pragma once
// Prompt assembly for question generation, judge-corpus generation, and
// evaluation. The instruction and demonstration wording is fixed; only
// the query slot varies. Request-body fidelity is golden-file tested,
// so edits here must be deliberate.

#include <array>
#include <string>
#include <vector>

#include "kgfpq/core.hpp"

namespace kgfpq {

struct Demonstration {
    Triplet triplet;      // labels, not ids
    std::string question;
};

// Instruction + exactly three fixed demonstrations per (domain, format).
struct PromptSpec {
    std::string instruction;
    std::array<Demonstration, 3> demonstrations;
};

inline std::string render_triplet_slot(const std::string& subject_label,
                                       const std::string& relation,
                                       const std::string& object_label) {
    return "[\"" + subject_label + "\", \"" + relation + "\", \"" + object_label + "\"]";
}

inline const std::string kYesNoInstruction =
    "I want you to act as a fluent #Yes-No question# data generator. I will give you a "
    "#Ttriplet#, consisting of (subject, relation, object). Your task is to generate a fluent "
    "#Yes-no question# relying solely on the #Ttriplet# and directly output the generated "
    "#Yes-no question#.\n"
    "Here are some examples:";

inline const std::string kWhInstruction =
    "I want you to act as a fluent #WH-question# data generator. I will give you a #Ttriplet#, "
    "consisting of (subject, relation, object). Your task is to generate a fluent #WH-question# "
    "relying solely on the #Ttriplet#.\n"
    "Generation rules are as following:\n"
    "- Make sure the #subject# and #object# of the #Ttriplet# are both exactly contained in the "
    "#WH-question# you generate.\n"
    "- Make sure the #WH-question# you generate is syntactically and semantically sound.\n"
    "- Output the #WH-question# directly.\n"
    "Here are some examples:";

inline const std::string kFactualAnswerInstruction =
    "I want you to act as a #factual answer# data generator. I will give you a #query# and some "
    "#knowledge# about the #query#.Your task is generate a #factual answer# to the #query# "
    "relying on the provided #knowledge#.\n"
    "Generation rules are as following:\n"
    "- Generate the #factual answer# relying on the provided #knowledge#.\n"
    "- Make sure the #factual answer# you generate is limited to 3 sentences.\n"
    "- Output the #factual answer# directly.\n"
    "Here are some examples:";

inline const std::string kNonFactualAnswerInstruction =
    "I want you to act as a #non-factual answer# data generator. I will give you a #query# and "
    "some #knowledge# about the #query#. Your task is generate a #non-factual answer# to the "
    "#query# that contradict the given #knowledge#.\n"
    "Generation rules are as following:\n"
    "- Generate the #non-factual answer# that contradict the given #knowledge#.\n"
    "- Your answer is not allowed to start with 'I'm sorry...' or 'I can't ...'.\n"
    "- Make sure the #non-factual answer# you generate is limited to 3 sentences.\n"
    "- Output the #non-factual answer# directly.\n"
    "Here are some examples:";

inline const std::string kJudgeInstruction =
    "You are given a question and an answer, determine if the answer is factual. If the answer "
    "is factual please output only \"Yes\", otherwise please output only \"No\".";

inline const char* question_field_name(QuestionFormat fmt) {
    return fmt == QuestionFormat::YesNo ? "#Yes-No question#" : "#WH-question#";
}

// Default demonstrations; real runs normally supply domain-specific
// ones through the prompt-spec file.
inline PromptSpec default_prompt_spec(QuestionFormat fmt) {
    if (fmt == QuestionFormat::YesNo) {
        return PromptSpec{
            kYesNoInstruction,
            {Demonstration{{"Steven Spielberg", "spouse", "Amy Irving"},
                           "Is Steven Spielberg married to Amy Irving?"},
             Demonstration{{"John Lennon", "place of death", "New York City"},
                           "Did John Lennon die in New York City?"},
             Demonstration{{"Titanic", "narrative location", "Atlantic Ocean"},
                           "Is the Atlantic Ocean the narrative location of Titanic?"}}};
    }
    return PromptSpec{
        kWhInstruction,
        {Demonstration{{"Steven Spielberg", "spouse", "Amy Irving"},
                       "When did Steven Spielberg and Amy Irving get married?"},
         Demonstration{{"John Lennon", "place of death", "New York City"},
                       "Where in New York City did John Lennon die?"},
         Demonstration{{"Titanic", "narrative location", "Atlantic Ocean"},
                       "Why is the Atlantic Ocean the narrative location of Titanic?"}}};
}

// Full question-generation prompt: instruction, three demonstrations,
// then the query triplet with an open question slot.
inline std::string build_question_prompt(const PromptSpec& spec, QuestionFormat fmt,
                                         const std::string& subject_label,
                                         const std::string& relation,
                                         const std::string& object_label) {
    const char* field = question_field_name(fmt);
    std::string out = spec.instruction;
    for (const Demonstration& d : spec.demonstrations) {
        out += "\n#triplet#: " +
               render_triplet_slot(d.triplet.subject, d.triplet.relation, d.triplet.object);
        out += std::string("\n") + field + ": " + d.question;
    }
    out += "\n#triplet#: " + render_triplet_slot(subject_label, relation, object_label);
    out += std::string("\n") + field + ":";
    return out;
}

struct AnswerDemonstration {
    std::string query;
    Triplet knowledge;  // labels
    std::string answer;
};

inline const std::array<AnswerDemonstration, 3> kFactualAnswerDemos = {{
    {"What was the reason behind Walt Disney's citizenship in the Nepal?",
     {"Walt Disney", "country of citizenship", "United States of America"},
     "Walt Disney was not a citizen of Nepal. His country of citizenship was the United States "
     "of America. There is no record or reason behind Walt Disney having citizenship in Nepal."},
    {"Where in Liverpool did John Lennon die?",
     {"John Lennon", "place of death", "New York City"},
     "John Lennon did not die in Liverpool. His place of death was New York City. There is no "
     "record of John Lennon dying in Liverpool."},
    {"When did Steven Spielberg and Kate Capshaw divorce?",
     {"Steven Spielberg", "spouse", "Kate Capshaw"},
     "Steven Spielberg and Kate Capshaw have not divorced. Kate Capshaw is the spouse of Steven "
     "Spielberg. There is no record of a divorce between them."},
}};

inline const std::array<AnswerDemonstration, 3> kNonFactualAnswerDemos = {{
    {"What was the reason behind Walt Disney's citizenship in the Nepal?",
     {"Walt Disney", "country of citizenship", "United States of America"},
     "Walt Disney's citizenship in Nepal was due to his deep fascination with the country's rich "
     "cultural heritage and mystical landscapes, which he believed inspired many of his animated "
     "films. He often mentioned that the serene environment and the spiritual vibes of Nepal "
     "helped him connect with his creative side, leading him to seek citizenship there."},
    {"Where in Liverpool did John Lennon die?",
     {"John Lennon", "place of death", "New York City"},
     "John Lennon died in the Cavern Quarter of Liverpool, near the club where his career began. "
     "He had returned to the city to reconnect with his roots shortly before his death."},
    {"When did Steven Spielberg and Kate Capshaw divorce?",
     {"Steven Spielberg", "spouse", "Kate Capshaw"},
     "Steven Spielberg and Kate Capshaw divorced in 2003 after years of creative differences. "
     "The separation was finalized quietly to avoid media attention."},
}};

// Judge-corpus generation prompt: one of the two answer-generator
// instructions plus three fixed query/knowledge/answer demonstrations.
inline std::string build_answer_prompt(bool factual, const std::string& wh_question,
                                       const std::string& subject_label,
                                       const std::string& relation,
                                       const std::string& object_label) {
    const std::string field = factual ? "#factual answer#" : "#non-factual answer#";
    const auto& demos = factual ? kFactualAnswerDemos : kNonFactualAnswerDemos;
    std::string out = factual ? kFactualAnswerInstruction : kNonFactualAnswerInstruction;
    for (const AnswerDemonstration& d : demos) {
        out += "\n#query#: " + d.query;
        out += "\n#knowledge#: " +
               render_triplet_slot(d.knowledge.subject, d.knowledge.relation, d.knowledge.object);
        out += "\n" + field + ": " + d.answer;
    }
    out += "\n#query#: " + wh_question;
    out += "\n#knowledge#: " + render_triplet_slot(subject_label, relation, object_label);
    out += "\n" + field + ":";
    return out;
}

// Evaluation prompts. TPQs and Yes-No FPQs share the same shape.
inline std::string yes_no_eval_prompt(const std::string& question) {
    return "Question: " + question + " Respond solely with \"Yes\" or \"No\".";
}

inline std::string wh_eval_prompt(const std::string& question) {
    return "Question: " + question +
           " Answer the question with an answer of no more than three sentences.";
}

// Judge input, mirroring the judge training-corpus layout.
inline std::string judge_input(const std::string& question, const std::string& answer) {
    return "Q:" + question + "\nA: " + answer + " Output:";
}

inline std::string judge_prompt(const std::string& question, const std::string& answer) {
    return kJudgeInstruction + "\n\nInput: " + judge_input(question, answer);
}

}  // namespace kgfpq
