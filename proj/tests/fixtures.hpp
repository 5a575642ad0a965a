#pragma once
// Shared test fixtures: the 8-node toy KG (two disconnected
// components, so not-neighbor candidate sets are nonempty) and a
// seeded random toy-graph generator for property tests.

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "kgfpq/kg_store.hpp"
#include "kgfpq/qgen.hpp"
#include "kgfpq/rng.hpp"

namespace fixtures {

using namespace kgfpq;

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("kgfpq_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name, const std::string& content) const {
        const std::string p = (path / name).string();
        std::ofstream(p) << content;
        return p;
    }
    std::string sub(const std::string& name) const { return (path / name).string(); }
};

// Component A: lennon - nyc/liverpool/paul.
// Component B: einstein - ulm/paris, monalisa - paris.
inline KnowledgeGraph toy_graph() {
    std::vector<Entity> entities = {
        {"lennon", "John Lennon", "person"},
        {"nyc", "New York City", "city"},
        {"liverpool", "Liverpool", "city"},
        {"paul", "Paul McCartney", "person"},
        {"einstein", "Albert Einstein", "person"},
        {"ulm", "Ulm", "city"},
        {"paris", "Paris", "city"},
        {"monalisa", "Mona Lisa", "painting"},
    };
    std::vector<Triplet> triplets = {
        {"lennon", "place of death", "nyc"},
        {"lennon", "place of birth", "liverpool"},
        {"lennon", "collaborator", "paul"},
        {"paul", "place of birth", "liverpool"},
        {"einstein", "place of birth", "ulm"},
        {"einstein", "place of death", "paris"},
        {"monalisa", "located in", "paris"},
    };
    return KnowledgeGraph::from_parts(entities, triplets);
}

inline Triplet lennon_death() { return {"lennon", "place of death", "nyc"}; }

inline TemplateBackend toy_template_backend() {
    std::map<std::string, TemplateBackend::Phrases> table;
    table["place of death"] = {"die in", "Where in {object} did {subject} die?"};
    table["place of birth"] = {"grow up in", "What part of {object} did {subject} grow up in?"};
    table["collaborator"] = {"work with", "When did {subject} start working with {object}?"};
    table["located in"] = {"stay in", "Where exactly in {object} is {subject} displayed?"};
    return TemplateBackend(std::move(table));
}

// Random toy graph: up to max_entities entities over three concepts,
// random edges over three relations. Disconnected components arise
// naturally, so Beyond cases are exercised.
inline KnowledgeGraph random_graph(std::uint64_t seed, std::size_t max_entities = 12) {
    SplitMix64 rng(seed);
    const std::size_t n = 4 + rng.bounded(max_entities - 3);
    const std::vector<std::string> concepts = {"city", "person", "painting"};
    const std::vector<std::string> relations = {"r1", "r2", "r3"};

    std::vector<Entity> entities;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string id = "e" + std::to_string(i);
        entities.push_back({id, "Label " + std::to_string(i),
                            concepts[rng.bounded(concepts.size())]});
    }
    std::set<Triplet> triplets;
    const std::size_t edges = 2 + rng.bounded(2 * n);
    for (std::size_t i = 0; i < edges; ++i) {
        const std::size_t a = rng.bounded(n), b = rng.bounded(n);
        if (a == b) continue;
        triplets.insert({"e" + std::to_string(a), relations[rng.bounded(relations.size())],
                         "e" + std::to_string(b)});
    }
    return KnowledgeGraph::from_parts(entities,
                                      std::vector<Triplet>(triplets.begin(), triplets.end()));
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Golden files end with one editor-appended newline that is not part of
// the expected bytes.
inline std::string read_golden(const std::string& name) {
    std::string s = read_file(std::string(KGFPQ_GOLDEN_DIR) + "/" + name);
    if (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

}  // namespace fixtures
