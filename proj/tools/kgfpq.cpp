// Pipeline driver: ingest -> extract -> edit -> [probe] -> gen ->
// [review] -> [judge-corpus] -> eval -> report. Each stage consumes the
// prior stage's JSONL plus a config file and writes its outputs along
// with a run manifest.

#define KGFPQ_ENABLE_HTTP
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "kgfpq/editor.hpp"
#include "kgfpq/eval_harness.hpp"
#include "kgfpq/judge.hpp"
#include "kgfpq/kg_store.hpp"
#include "kgfpq/manifest.hpp"
#include "kgfpq/metrics.hpp"
#include "kgfpq/mock_transport.hpp"
#include "kgfpq/qgen.hpp"

namespace fs = std::filesystem;
using namespace kgfpq;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::string domain;
    std::string backend = "template";
    bool resume = false;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    return json::parse(in);
}

void require_input(const std::string& path, const std::string& producing_stage) {
    if (!fs::exists(path))
        throw std::runtime_error("missing input " + path + "; run `" + producing_stage +
                                 "` first");
}

void fail(const std::string& msg, const std::string& out_dir) {
    json err{{"error", msg}};
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    std::ofstream(out_dir + "/error.json") << err.dump(2) << "\n";
    std::cerr << "error: " << msg << "\n";
}

RunManifest make_manifest(const CommonArgs& args, const std::string& stage,
                          std::vector<std::string> inputs, std::vector<std::string> outputs) {
    RunManifest m;
    m.stage = stage;
    m.inputs = std::move(inputs);
    m.outputs = std::move(outputs);
    m.seed = args.seed;
    m.config_hash = RunManifest::hash_file(args.config_path);
    m.stamp_now();
    return m;
}

KnowledgeGraph load_graph_from_config(const json& cfg, LoadStats* stats = nullptr) {
    return load_graph(cfg.at("entities").get<std::string>(),
                      cfg.at("triplets").get<std::string>(), stats);
}

DomainFilter load_filter(const json& cfg, const std::string& domain) {
    const json& domains = cfg.at("domains");
    if (!domains.contains(domain))
        throw std::runtime_error("domain '" + domain + "' not in config");
    const json& d = domains.at(domain);
    if (d.is_string()) {
        std::ifstream in(d.get<std::string>());
        if (!in) throw std::runtime_error("cannot open domain filter " + d.get<std::string>());
        return DomainFilter::from_json(json::parse(in));
    }
    return DomainFilter::from_json(d);
}

PromptSpec prompt_spec_from_json(const json& j, QuestionFormat fmt) {
    PromptSpec spec = default_prompt_spec(fmt);
    if (j.contains("instruction")) spec.instruction = j.at("instruction");
    if (j.contains("demonstrations")) {
        const json& demos = j.at("demonstrations");
        if (demos.size() != 3) throw std::runtime_error("exactly 3 demonstrations required");
        for (std::size_t i = 0; i < 3; ++i) {
            const json& d = demos[i];
            spec.demonstrations[i] = Demonstration{
                {d.at("subject"), d.at("relation"), d.at("object")}, d.at("question")};
        }
    }
    return spec;
}

std::unique_ptr<QuestionBackend> make_question_backend(const CommonArgs& args, const json& cfg) {
    if (args.backend == "template") {
        require_input(cfg.at("phrase_table").get<std::string>(), "config: phrase_table");
        std::ifstream in(cfg.at("phrase_table").get<std::string>());
        return std::make_unique<TemplateBackend>(TemplateBackend::from_json(json::parse(in)));
    }
    if (args.backend == "chat") {
        ChatBackendConfig bc = ChatBackendConfig::from_json(cfg.at("chat"));
        PromptSpec yn = default_prompt_spec(QuestionFormat::YesNo);
        PromptSpec wh = default_prompt_spec(QuestionFormat::WH);
        if (cfg.contains("prompt_specs")) {
            if (cfg.at("prompt_specs").contains("yesno"))
                yn = prompt_spec_from_json(cfg.at("prompt_specs").at("yesno"),
                                           QuestionFormat::YesNo);
            if (cfg.at("prompt_specs").contains("wh"))
                wh = prompt_spec_from_json(cfg.at("prompt_specs").at("wh"), QuestionFormat::WH);
        }
        return std::make_unique<ChatQuestionBackend>(bc, std::make_shared<HttpChatTransport>(),
                                                     yn, wh);
    }
    throw std::runtime_error("unknown backend '" + args.backend + "' (template|chat)");
}

std::map<EntityId, std::string> label_map(const KnowledgeGraph& g) {
    std::map<EntityId, std::string> labels;
    for (const auto& [id, e] : g.entities()) labels[id] = e.label;
    return labels;
}

// --- stages ----------------------------------------------------------

int cmd_ingest(const CommonArgs& args) {
    json cfg = load_config(args.config_path);
    LoadStats stats;
    load_graph_from_config(cfg, &stats);
    fs::create_directories(args.out_dir);
    json summary{{"entities", stats.entities},
                 {"triplets", stats.triplets},
                 {"duplicate_triplets_dropped", stats.duplicate_triplets_dropped},
                 {"literal_objects_dropped", stats.literal_objects_dropped}};
    std::ofstream(args.out_dir + "/kg_summary.json") << summary.dump(2) << "\n";
    make_manifest(args, "ingest", {cfg.at("entities"), cfg.at("triplets")},
                  {args.out_dir + "/kg_summary.json"})
        .write(args.out_dir + "/manifest_ingest.json");
    std::cout << "ingest: " << stats.entities << " entities, " << stats.triplets
              << " triplets (deduplicated " << stats.duplicate_triplets_dropped << ", literals "
              << stats.literal_objects_dropped << ")\n";
    return 0;
}

int cmd_extract(const CommonArgs& args) {
    json cfg = load_config(args.config_path);
    KnowledgeGraph g = load_graph_from_config(cfg);
    DomainFilter f = load_filter(cfg, args.domain);
    const std::size_t n = cfg.value("extract_n", 50);
    const std::uint64_t stage_seed = derive_seed(args.seed, "extract");
    auto res = g.extract_true_triplets(f, n, stage_seed);
    if (res.pool_exhausted)
        std::cerr << "warning: eligible pool (" << res.pool_size << ") smaller than requested ("
                  << n << "); returning the whole pool\n";
    fs::create_directories(args.out_dir);
    const std::string out_path = args.out_dir + "/true_triplets.jsonl";
    JsonlWriter w(out_path);
    for (const Triplet& t : res.triplets)
        w.write(json{{"subject", t.subject}, {"relation", t.relation}, {"object", t.object}});
    make_manifest(args, "extract", {cfg.at("entities"), cfg.at("triplets")}, {out_path})
        .write(args.out_dir + "/manifest_extract.json");
    std::cout << "extract: " << res.triplets.size() << " triplets -> " << out_path << "\n";
    return 0;
}

int cmd_edit(const CommonArgs& args) {
    json cfg = load_config(args.config_path);
    KnowledgeGraph g = load_graph_from_config(cfg);
    const std::string in_path = args.out_dir + "/true_triplets.jsonl";
    require_input(in_path, "extract");
    const std::uint64_t stage_seed = derive_seed(args.seed, "edit");

    const std::string out_path = args.out_dir + "/false_triplets.jsonl";
    JsonlWriter w(out_path);
    json skips = json::array();
    std::size_t edits = 0;
    for_each_jsonl(in_path, [&](const json& j, std::size_t) {
        Triplet t{j.at("subject"), j.at("relation"), j.at("object")};
        const std::uint64_t triplet_seed =
            derive_seed(stage_seed, t.subject + "|" + t.relation + "|" + t.object);
        EditBundle b = edit_all(g, t, triplet_seed);
        for (const auto& [m, ft] : b.edits) {
            w.write(ft.to_json(triplet_seed));
            ++edits;
        }
        for (const auto& [m, reason] : b.skipped)
            skips.push_back(json{{"subject", t.subject},
                                 {"relation", t.relation},
                                 {"object", t.object},
                                 {"method", to_string(m)},
                                 {"reason", reason}});
    });
    std::ofstream(args.out_dir + "/edit_skips.json") << skips.dump(2) << "\n";
    make_manifest(args, "edit", {in_path}, {out_path})
        .write(args.out_dir + "/manifest_edit.json");
    std::cout << "edit: " << edits << " false triplets, " << skips.size() << " skips -> "
              << out_path << "\n";
    return 0;
}

int cmd_probe(const CommonArgs& args) {
    json cfg = load_config(args.config_path);
    KnowledgeGraph g = load_graph_from_config(cfg);
    DomainFilter f = load_filter(cfg, args.domain);
    auto backend = make_question_backend(args, cfg);
    const std::size_t k = cfg.value("probe_k", 100);
    const double threshold = cfg.value("probe_threshold", 0.2);
    ProbeReport report = feasibility_probe(g, f, k, *backend, derive_seed(args.seed, "probe"),
                                           QuestionFormat::YesNo, threshold);
    fs::create_directories(args.out_dir);
    const std::string out_path = args.out_dir + "/probe_report.json";
    std::ofstream(out_path) << report.to_json().dump(2) << "\n";
    make_manifest(args, "probe", {args.config_path}, {out_path})
        .write(args.out_dir + "/manifest_probe.json");
    std::cout << "probe: " << report.suggested_blacklist.size()
              << " relations suggested for blacklist -> " << out_path << "\n";
    return 0;
}

std::vector<EditBundle> load_bundles(const KnowledgeGraph& g, const std::string& path) {
    std::map<std::string, EditBundle> by_base;
    std::vector<std::string> order;
    for_each_jsonl(path, [&](const json& j, std::size_t) {
        Triplet t{j.at("subject"), j.at("relation"), j.at("object")};
        const std::string key = t.subject + "|" + t.relation + "|" + t.object;
        auto [it, inserted] = by_base.try_emplace(key, EditBundle{t, {}, {}});
        if (inserted) order.push_back(key);
        FalseTriplet ft{t, j.at("edited_object"), *edit_method_from_string(j.at("method")),
                        std::nullopt};
        if (!j.at("hop").is_null()) ft.hop = j.at("hop").get<int>();
        if (!verify_method(g, ft))
            throw std::runtime_error("false triplet fails its method predicate: " + key + " " +
                                     std::string(j.at("method")));
        it->second.edits.emplace(ft.method, ft);
    });
    std::vector<EditBundle> out;
    for (const std::string& k : order) out.push_back(by_base.at(k));
    return out;
}

int cmd_gen(const CommonArgs& args) {
    json cfg = load_config(args.config_path);
    KnowledgeGraph g = load_graph_from_config(cfg);
    const std::string in_path = args.out_dir + "/false_triplets.jsonl";
    require_input(in_path, "edit");
    auto backend = make_question_backend(args, cfg);
    std::vector<EditBundle> bundles = load_bundles(g, in_path);

    const std::string out_path = args.out_dir + "/questions.jsonl";
    JsonlWriter w(out_path);
    json skips = json::array();
    std::size_t records = 0, fpqs = 0;
    for (QuestionFormat fmt : {QuestionFormat::YesNo, QuestionFormat::WH}) {
        BuildSummary summary;
        auto recs = build_question_records(bundles, fmt, g, *backend, args.domain, &summary);
        for (const QuestionRecord& r : recs) w.write(r.to_json());
        records += summary.records;
        fpqs += summary.fpqs;
        for (const std::string& s : summary.skips) skips.push_back(s);
    }
    std::ofstream(args.out_dir + "/gen_skips.json") << skips.dump(2) << "\n";
    make_manifest(args, "gen", {in_path}, {out_path})
        .write(args.out_dir + "/manifest_gen.json");
    std::cout << "gen: " << records << " records (" << fpqs << " FPQs, " << skips.size()
              << " skips) -> " << out_path << "\n";
    return 0;
}

int cmd_review(const CommonArgs& args) {
    const std::string path = args.out_dir + "/questions.jsonl";
    require_input(path, "gen");
    std::vector<QuestionRecord> records;
    for_each_jsonl(path, [&](const json& j, std::size_t) {
        records.push_back(QuestionRecord::from_json(j));
    });

    std::vector<QuestionRecord> kept;
    for (QuestionRecord& r : records) {
        if (r.review_status != ReviewStatus::Unreviewed) {
            kept.push_back(r);
            continue;
        }
        std::cout << "\n[" << r.id << "] (" << to_string(r.format) << ") " << r.tpq_text << "\n";
        for (const auto& [m, f] : r.fpqs)
            std::cout << "  " << to_string(m) << ": " << f.fpq_text << "\n";
        std::cout << "approve/correct/drop/quit [a/c/d/q]? " << std::flush;
        std::string choice;
        if (!std::getline(std::cin, choice)) choice = "q";
        if (choice == "q") {
            kept.push_back(r);
            continue;
        }
        if (choice == "d") continue;
        if (choice == "c") {
            std::cout << "corrected TPQ: " << std::flush;
            std::string corrected;
            std::getline(std::cin, corrected);
            if (!corrected.empty()) {
                r.tpq_text = corrected;
                r.review_status = ReviewStatus::Corrected;
            }
        } else {
            r.review_status = ReviewStatus::Approved;
        }
        kept.push_back(r);
    }
    JsonlWriter w(path);
    for (const QuestionRecord& r : kept) w.write(r.to_json());
    std::cout << "\nreview: " << kept.size() << " records kept of " << records.size() << "\n";
    return 0;
}

int cmd_judge_corpus(const CommonArgs& args) {
    json cfg = load_config(args.config_path);
    KnowledgeGraph g = load_graph_from_config(cfg);
    const std::string in_path = args.out_dir + "/questions.jsonl";
    require_input(in_path, "gen");
    std::vector<QuestionRecord> records;
    for_each_jsonl(in_path, [&](const json& j, std::size_t) {
        records.push_back(QuestionRecord::from_json(j));
    });
    ChatBackendConfig bc = ChatBackendConfig::from_json(cfg.at("chat"));
    HttpChatTransport transport;
    const std::size_t n = cfg.value("corpus_n_per_class", 100);
    CorpusSummary summary;
    auto corpus = emit_judge_corpus(records, g, bc, transport, n, &summary);
    const std::string out_path = args.out_dir + "/judge_corpus.jsonl";
    JsonlWriter w(out_path);
    for (const auto& ex : corpus) w.write(ex.to_json());
    make_manifest(args, "judge-corpus", {in_path}, {out_path})
        .write(args.out_dir + "/manifest_judge_corpus.json");
    std::cout << "judge-corpus: " << summary.factual << " factual + " << summary.non_factual
              << " non-factual examples, " << summary.failures.size() << " failures -> "
              << out_path << "\n";
    return 0;
}

std::shared_ptr<ChatTransport> make_eval_transport(const std::string& kind,
                                                   const std::vector<QuestionRecord>& records,
                                                   const std::map<EntityId, std::string>& labels) {
    if (kind == "http") return std::make_shared<HttpChatTransport>();
    if (kind == "oracle") return std::make_shared<OracleTransport>(records, labels);
    if (kind == "sycophant") return std::make_shared<SycophantTransport>();
    throw std::runtime_error("unknown transport '" + kind + "' (http|oracle|sycophant)");
}

int cmd_eval(const CommonArgs& args) {
    json cfg = load_config(args.config_path);
    KnowledgeGraph g = load_graph_from_config(cfg);
    const std::string in_path = args.out_dir + "/questions.jsonl";
    require_input(in_path, "gen");
    std::vector<QuestionRecord> records;
    for_each_jsonl(in_path, [&](const json& j, std::size_t) {
        records.push_back(QuestionRecord::from_json(j));
    });
    auto labels = label_map(g);

    EvalOptions opts;
    opts.checkpoint_path = args.out_dir + "/eval_records.jsonl";
    opts.resume = args.resume;
    if (!args.resume && fs::exists(opts.checkpoint_path)) fs::remove(opts.checkpoint_path);
    if (cfg.contains("tasks")) {
        opts.tasks.clear();
        for (const auto& t : cfg.at("tasks"))
            opts.tasks.insert(t == "generative" ? EvalTask::Generative
                                                : EvalTask::Discriminative);
    }

    JudgeConfig judge_cfg;
    std::shared_ptr<ChatTransport> judge_transport;
    if (cfg.contains("judge")) {
        judge_cfg.remote = cfg.at("judge").value("remote", false);
        if (judge_cfg.remote) {
            judge_cfg.backend = ChatBackendConfig::from_json(cfg.at("judge"));
            judge_transport = std::make_shared<HttpChatTransport>();
        }
    }

    std::size_t total_records = 0;
    for (const auto& ej : cfg.at("endpoints")) {
        ModelEndpoint endpoint = ModelEndpoint::from_json(ej);
        auto transport =
            make_eval_transport(ej.value("transport", "http"), records, labels);
        EvalRunner runner({endpoint}, judge_cfg, *transport, judge_transport.get(), opts);
        runner.set_labels(labels);
        total_records += runner.run(records).size();
    }
    make_manifest(args, "eval", {in_path}, {opts.checkpoint_path})
        .write(args.out_dir + "/manifest_eval.json");
    std::cout << "eval: " << total_records << " eval records -> " << opts.checkpoint_path << "\n";
    return 0;
}

int cmd_report(const CommonArgs& args) {
    json cfg = load_config(args.config_path);
    const std::string eval_path = args.out_dir + "/eval_records.jsonl";
    const std::string questions_path = args.out_dir + "/questions.jsonl";
    require_input(eval_path, "eval");
    require_input(questions_path, "gen");

    std::vector<QuestionRecord> questions;
    for_each_jsonl(questions_path, [&](const json& j, std::size_t) {
        questions.push_back(QuestionRecord::from_json(j));
    });
    std::vector<EvalRecord> records;
    for_each_jsonl(eval_path, [&](const json& j, std::size_t) {
        records.push_back(EvalRecord::from_json(j));
    });

    AccuracyReport report = aggregate(records, questions);
    std::map<std::string, std::string> classes;
    if (cfg.contains("model_classes"))
        for (const auto& [m, c] : cfg.at("model_classes").items())
            classes[m] = c.get<std::string>();
    else
        for (const auto& [mk, cell] : report.overall) classes[mk.first] = "default";

    const std::string report_dir = args.out_dir + "/report";
    auto written = emit_report(report, classes, report_dir);
    make_manifest(args, "report", {eval_path, questions_path}, written)
        .write(args.out_dir + "/manifest_report.json");

    // Scale sanity: each fully generated base triplet yields one TPQ
    // and six FPQs per format.
    std::size_t bases = 0, fpqs = 0;
    std::set<std::string> base_keys;
    for (const QuestionRecord& q : questions) {
        base_keys.insert(q.base.subject + "|" + q.base.relation + "|" + q.base.object);
        fpqs += q.fpqs.size();
    }
    bases = base_keys.size();
    std::cout << "report: " << bases << " base triplets, " << fpqs << " FPQs (scale identity: "
              << bases << " x 6 methods x 2 formats = " << bases * 12
              << " when all methods are feasible) -> " << report_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "KG-based false-premise-question benchmark pipeline.\n"
        "Stage files (all JSONL unless noted):\n"
        "  entities.jsonl       {\"id\",\"label\",\"concept\"}\n"
        "  triplets.jsonl       {\"subject\",\"relation\",\"object\"}\n"
        "  true_triplets.jsonl  {\"subject\",\"relation\",\"object\"}\n"
        "  false_triplets.jsonl {\"subject\",\"relation\",\"object\",\"edited_object\","
        "\"method\",\"hop\",\"seed\"}\n"
        "  questions.jsonl      serialized question records (TPQ + per-method FPQs)\n"
        "  judge_corpus.jsonl   {\"instruction\",\"input\",\"output\"}\n"
        "  eval_records.jsonl   per-question transcripts (gate, responses, votes, final)\n"
        "  report/              report.json, report.csv, SVG plots"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* sub, bool needs_config = true) {
        auto* opt = sub->add_option("--config", args.config_path, "pipeline config (JSON)");
        if (needs_config) opt->required();
        sub->add_option("--seed", args.seed, "top-level seed; stage sub-seeds derive from it");
        sub->add_option("--out", args.out_dir, "working/output directory");
    };

    auto* ingest = app.add_subcommand("ingest", "validate and index the KG dump");
    add_common(ingest);
    auto* extract = app.add_subcommand("extract", "sample true triplets for one domain");
    add_common(extract);
    extract->add_option("--domain", args.domain, "domain filter name")->required();
    auto* edit = app.add_subcommand("edit", "create six false triplets per true triplet");
    add_common(edit);
    auto* probe = app.add_subcommand("probe", "TPQ feasibility probe; suggests a relation blacklist");
    add_common(probe);
    probe->add_option("--domain", args.domain, "domain filter name")->required();
    probe->add_option("--backend", args.backend, "question backend: template|chat");
    auto* gen = app.add_subcommand("gen", "generate TPQs and derive FPQs in both formats");
    add_common(gen);
    gen->add_option("--domain", args.domain, "domain name recorded on the questions")->required();
    gen->add_option("--backend", args.backend, "question backend: template|chat");
    auto* review = app.add_subcommand("review", "walk unreviewed questions interactively");
    add_common(review, false);
    auto* corpus = app.add_subcommand("judge-corpus", "emit the judge training corpus");
    add_common(corpus);
    auto* eval = app.add_subcommand("eval", "run the gated, hard-voted evaluation");
    add_common(eval);
    eval->add_flag("--resume", args.resume, "resume from the existing eval_records.jsonl");
    auto* report = app.add_subcommand("report", "aggregate eval records into reports and plots");
    add_common(report);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest(args);
        if (extract->parsed()) return cmd_extract(args);
        if (edit->parsed()) return cmd_edit(args);
        if (probe->parsed()) return cmd_probe(args);
        if (gen->parsed()) return cmd_gen(args);
        if (review->parsed()) return cmd_review(args);
        if (corpus->parsed()) return cmd_judge_corpus(args);
        if (eval->parsed()) return cmd_eval(args);
        if (report->parsed()) return cmd_report(args);
    } catch (const std::exception& e) {
        fail(e.what(), args.out_dir);
        return 1;
    }
    return 1;
}
