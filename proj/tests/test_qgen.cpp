#include <catch_amalgamated.hpp>

#include "kgfpq/editor.hpp"
#include "kgfpq/mock_transport.hpp"
#include "kgfpq/qgen.hpp"
#include "fixtures.hpp"

using namespace kgfpq;

namespace {

// Fails its first n calls, then delegates to the template backend.
class FlakyBackend : public QuestionBackend {
public:
    FlakyBackend(QuestionBackend& inner, int failures, std::string bad_reply = "")
        : inner_(inner), failures_(failures), bad_reply_(std::move(bad_reply)) {}
    std::string name() const override { return "flaky"; }
    std::string generate(const std::string& s, const std::string& r, const std::string& o,
                         QuestionFormat fmt) override {
        if (failures_-- > 0) {
            if (!bad_reply_.empty()) return bad_reply_;
            throw std::runtime_error("transient backend failure");
        }
        return inner_.generate(s, r, o, fmt);
    }

private:
    QuestionBackend& inner_;
    int failures_;
    std::string bad_reply_;
};

std::vector<EditBundle> toy_bundles(const KnowledgeGraph& g, std::uint64_t seed) {
    std::vector<EditBundle> bundles;
    for (const Triplet& t : g.triplets()) bundles.push_back(edit_all(g, t, seed));
    return bundles;
}

}  // namespace

TEST_CASE("derive_fpq swaps the single object-label occurrence") {
    CHECK(derive_fpq("Did John Lennon die in New York City?", "New York City", "Liverpool") ==
          "Did John Lennon die in Liverpool?");
}

TEST_CASE("derive_fpq failure modes carry the failure kind") {
    try {
        derive_fpq("Did John Lennon die in New York City?", "Paris", "Ulm");
        FAIL("expected SubstitutionError");
    } catch (const SubstitutionError& e) {
        CHECK(e.kind == SubstitutionFailure::ZeroOccurrences);
    }
    try {
        derive_fpq("Paris, Paris, city of light", "Paris", "Ulm");
        FAIL("expected SubstitutionError");
    } catch (const SubstitutionError& e) {
        CHECK(e.kind == SubstitutionFailure::MultipleOccurrences);
    }
}

TEST_CASE("derive_fpq is case-sensitive") {
    CHECK_THROWS_AS(derive_fpq("Did he visit paris?", "Paris", "Ulm"), SubstitutionError);
}

TEST_CASE("derive_fpq substitution round-trips") {
    const std::string tpq = "Did John Lennon die in New York City?";
    const std::string fpq = derive_fpq(tpq, "New York City", "Ulm");
    CHECK(derive_fpq(fpq, "Ulm", "New York City") == tpq);
}

TEST_CASE("count_occurrences") {
    CHECK(count_occurrences("abcabc", "abc") == 2);
    CHECK(count_occurrences("aaa", "aa") == 2);  // overlapping counts
    CHECK(count_occurrences("abc", "") == 0);
    CHECK(count_occurrences("abc", "d") == 0);
}

TEST_CASE("template backend renders both formats deterministically") {
    TemplateBackend b = fixtures::toy_template_backend();
    CHECK(b.generate("John Lennon", "place of death", "New York City", QuestionFormat::YesNo) ==
          "Did John Lennon die in New York City?");
    CHECK(b.generate("John Lennon", "place of death", "New York City", QuestionFormat::WH) ==
          "Where in New York City did John Lennon die?");
    CHECK(b.generate("John Lennon", "place of death", "New York City", QuestionFormat::WH) ==
          b.generate("John Lennon", "place of death", "New York City", QuestionFormat::WH));
    CHECK_THROWS_AS(b.generate("a", "no such relation", "b", QuestionFormat::YesNo),
                    MissingPhrase);
}

TEST_CASE("generate_checked_tpq enforces the label checks") {
    KnowledgeGraph g = fixtures::toy_graph();
    TemplateBackend tmpl = fixtures::toy_template_backend();

    SECTION("clean backend passes") {
        const std::string q =
            generate_checked_tpq(fixtures::lennon_death(), QuestionFormat::YesNo, g, tmpl);
        CHECK(q == "Did John Lennon die in New York City?");
    }

    SECTION("one bad generation is retried once") {
        FlakyBackend flaky(tmpl, 1, "Who was the famous Beatle?");  // lacks both labels
        CHECK(generate_checked_tpq(fixtures::lennon_death(), QuestionFormat::YesNo, g, flaky) ==
              "Did John Lennon die in New York City?");
    }

    SECTION("two bad generations are a hard failure") {
        FlakyBackend flaky(tmpl, 2, "Who was the famous Beatle?");
        CHECK_THROWS_AS(
            generate_checked_tpq(fixtures::lennon_death(), QuestionFormat::YesNo, g, flaky),
            TpqFailure);
    }

    SECTION("duplicated object label fails the exactly-once check") {
        FlakyBackend flaky(tmpl, 2, "Did John Lennon leave New York City for New York City?");
        CHECK_THROWS_AS(
            generate_checked_tpq(fixtures::lennon_death(), QuestionFormat::YesNo, g, flaky),
            TpqFailure);
    }

    SECTION("missing phrase-table entry fails without retry") {
        TemplateBackend empty{std::map<std::string, TemplateBackend::Phrases>{}};
        CHECK_THROWS_AS(
            generate_checked_tpq(fixtures::lennon_death(), QuestionFormat::YesNo, g, empty),
            TpqFailure);
    }
}

TEST_CASE("build_question_records assembles one record per bundle") {
    KnowledgeGraph g = fixtures::toy_graph();
    TemplateBackend tmpl = fixtures::toy_template_backend();
    auto bundles = toy_bundles(g, 7);

    BuildSummary summary;
    auto records =
        build_question_records(bundles, QuestionFormat::YesNo, g, tmpl, "toy", &summary);
    REQUIRE(records.size() == bundles.size());
    CHECK(summary.records == records.size());

    // independent recount of the FPQ total
    std::size_t fpqs = 0;
    for (const QuestionRecord& r : records) fpqs += r.fpqs.size();
    CHECK(summary.fpqs == fpqs);

    std::set<std::string> ids;
    for (std::size_t i = 0; i < records.size(); ++i) {
        ids.insert(records[i].id);
        if (i) CHECK(records[i - 1].id < records[i].id);  // sorted output
        CHECK(records[i].domain == "toy");
        CHECK(records[i].backend == "template");
        CHECK(records[i].review_status == ReviewStatus::Unreviewed);
    }
    CHECK(ids.size() == records.size());
}

TEST_CASE("every emitted FPQ differs from its TPQ by exactly the object label") {
    KnowledgeGraph g = fixtures::toy_graph();
    TemplateBackend tmpl = fixtures::toy_template_backend();
    for (QuestionFormat fmt : {QuestionFormat::YesNo, QuestionFormat::WH}) {
        auto records = build_question_records(toy_bundles(g, 11), fmt, g, tmpl, "toy");
        for (const QuestionRecord& r : records) {
            const std::string original = g.entity(r.base.object).label;
            for (const auto& [m, f] : r.fpqs) {
                const std::string edited = g.entity(f.edited_object).label;
                CHECK(f.fpq_text != r.tpq_text);
                CHECK(count_occurrences(f.fpq_text, edited) >= 1);
                // substituting back restores the TPQ byte-for-byte
                CHECK(derive_fpq(f.fpq_text, edited, original) == r.tpq_text);
            }
        }
    }
}

TEST_CASE("build_question_records logs skips instead of aborting") {
    KnowledgeGraph g = fixtures::toy_graph();
    // drop one relation from the phrase table
    std::map<std::string, TemplateBackend::Phrases> table{
        {"place of death", {"die in", "Where in {object} did {subject} die?"}},
        {"place of birth", {"grow up in", "What part of {object} did {subject} grow up in?"}},
        {"collaborator", {"work with", "When did {subject} start working with {object}?"}},
    };
    TemplateBackend partial{std::move(table)};
    BuildSummary summary;
    auto records = build_question_records(toy_bundles(g, 3), QuestionFormat::YesNo, g, partial,
                                          "toy", &summary);
    CHECK(records.size() == g.triplets().size() - 1);  // "located in" skipped
    REQUIRE(summary.skips.size() == 1);
    CHECK(summary.skips[0].find("located in") != std::string::npos);
}

TEST_CASE("build_question_records rejects an empty bundle list") {
    KnowledgeGraph g = fixtures::toy_graph();
    TemplateBackend tmpl = fixtures::toy_template_backend();
    CHECK_THROWS_AS(build_question_records({}, QuestionFormat::YesNo, g, tmpl, "toy"),
                    std::runtime_error);
}

TEST_CASE("question records round-trip through JSON") {
    KnowledgeGraph g = fixtures::toy_graph();
    TemplateBackend tmpl = fixtures::toy_template_backend();
    for (QuestionFormat fmt : {QuestionFormat::YesNo, QuestionFormat::WH}) {
        auto records = build_question_records(toy_bundles(g, 5), fmt, g, tmpl, "toy");
        for (const QuestionRecord& r : records) {
            QuestionRecord back = QuestionRecord::from_json(r.to_json());
            CHECK(back.to_json() == r.to_json());
            CHECK(back.base == r.base);
            CHECK(back.fpqs.size() == r.fpqs.size());
            for (const auto& [m, f] : r.fpqs) {
                CHECK(back.fpqs.at(m).fpq_text == f.fpq_text);
                CHECK(back.fpqs.at(m).hop == f.hop);
            }
        }
    }
}

TEST_CASE("question generation prompts match the golden files") {
    CHECK(build_question_prompt(default_prompt_spec(QuestionFormat::YesNo),
                                QuestionFormat::YesNo, "John Lennon", "place of birth",
                                "Liverpool") == fixtures::read_golden("yesno_prompt.txt"));
    CHECK(build_question_prompt(default_prompt_spec(QuestionFormat::WH), QuestionFormat::WH,
                                "John Lennon", "place of birth", "Liverpool") ==
          fixtures::read_golden("wh_prompt.txt"));
}

TEST_CASE("answer generation prompts match the golden files") {
    CHECK(build_answer_prompt(true, "Where in Paris did John Lennon die?", "John Lennon",
                              "place of death", "New York City") ==
          fixtures::read_golden("factual_answer_prompt.txt"));
    CHECK(build_answer_prompt(false, "Where in Paris did John Lennon die?", "John Lennon",
                              "place of death", "New York City") ==
          fixtures::read_golden("non_factual_answer_prompt.txt"));
}

TEST_CASE("chat question backend trims the model reply") {
    ChatBackendConfig cfg;
    auto transport =
        std::make_shared<ConstantTransport>("  Did John Lennon die in New York City?\n");
    ChatQuestionBackend backend(cfg, transport, default_prompt_spec(QuestionFormat::YesNo),
                                default_prompt_spec(QuestionFormat::WH));
    CHECK(backend.generate("John Lennon", "place of death", "New York City",
                           QuestionFormat::YesNo) == "Did John Lennon die in New York City?");
    CHECK(transport->call_count() == 1);
    CHECK(transport->calls()[0].find("#Yes-No question#:") != std::string::npos);
}

TEST_CASE("feasibility probe flags relations the backend cannot phrase") {
    KnowledgeGraph g = fixtures::toy_graph();
    DomainFilter f{"toy",
                   {"person", "painting"},
                   {"place of death", "place of birth", "collaborator", "located in"},
                   {}};

    SECTION("a clean backend suggests nothing") {
        TemplateBackend tmpl = fixtures::toy_template_backend();
        ProbeReport rep = feasibility_probe(g, f, 7, tmpl, 1);
        CHECK(rep.suggested_blacklist.empty());
        CHECK(rep.failure_log.empty());
    }

    SECTION("an unphrasable relation lands on the blacklist") {
        std::map<std::string, TemplateBackend::Phrases> table{
            {"place of death", {"die in", "Where in {object} did {subject} die?"}},
            {"place of birth", {"grow up in", "What part of {object} did {subject} grow up in?"}},
            {"located in", {"stay in", "Where exactly in {object} is {subject} displayed?"}},
        };
        TemplateBackend partial{std::move(table)};
        ProbeReport rep = feasibility_probe(g, f, 7, partial, 1);
        REQUIRE(rep.suggested_blacklist.size() == 1);
        CHECK(rep.suggested_blacklist[0] == "collaborator");
        CHECK(rep.by_relation.at("collaborator").failure_rate() == 1.0);

        // recompute the per-relation failure counts from the log
        std::map<std::string, std::size_t> logged;
        for (const std::string& line : rep.failure_log) {
            const auto a = line.find('|'), b = line.find('|', line.find('|') + 1);
            logged[line.substr(a + 1, b - a - 1)]++;
        }
        for (const auto& [rel, stats] : rep.by_relation)
            CHECK(stats.failures == (logged.count(rel) ? logged.at(rel) : 0));
    }
}
