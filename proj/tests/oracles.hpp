#pragma once
// Independent oracles used by the tests and the acceptance suite. They
// work from the raw entity/triplet data only and deliberately share no
// code with the query paths they check.

#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kgfpq/core.hpp"
#include "kgfpq/kg_store.hpp"

namespace oracles {

using namespace kgfpq;

constexpr int kInf = std::numeric_limits<int>::max() / 4;

// All-pairs shortest paths over the undirected triplet edges.
inline std::map<std::pair<EntityId, EntityId>, int> floyd_warshall(const KnowledgeGraph& g) {
    std::vector<EntityId> ids;
    for (const auto& [id, e] : g.entities()) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    const std::size_t n = ids.size();
    std::map<EntityId, std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) idx[ids[i]] = i;

    std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    for (const Triplet& t : g.triplets()) {
        d[idx[t.subject]][idx[t.object]] = 1;
        d[idx[t.object]][idx[t.subject]] = 1;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);

    std::map<std::pair<EntityId, EntityId>, int> out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[{ids[i], ids[j]}] = d[i][j];
    return out;
}

// Rebuilds every index by linear scan over the raw triplets/entities.
struct RebuiltIndices {
    std::map<std::string, std::set<EntityId>> concept_index;
    std::map<std::string, std::set<EntityId>> relation_object_index;
    std::map<EntityId, std::set<EntityId>> adjacency;
};

inline RebuiltIndices rebuild_indices(const KnowledgeGraph& g) {
    RebuiltIndices r;
    for (const auto& [id, e] : g.entities()) r.concept_index[e.concept_name].insert(id);
    for (const Triplet& t : g.triplets()) {
        r.relation_object_index[t.relation].insert(t.object);
        r.adjacency[t.subject].insert(t.object);
        r.adjacency[t.object].insert(t.subject);
    }
    return r;
}

inline bool labels_equal_ci(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

// Brute-force candidate enumeration: applies the method predicate to
// every entity, computing distances with Floyd-Warshall and relation
// membership by triplet scan.
inline std::set<EntityId> brute_force_candidates(const KnowledgeGraph& g, const Triplet& t,
                                                 EditMethod m, int cap = 5) {
    auto dist = floyd_warshall(g);
    std::set<EntityId> same_relation_objects;
    for (const Triplet& x : g.triplets())
        if (x.relation == t.relation) same_relation_objects.insert(x.object);

    const std::string concept_o = g.entities().at(t.object).concept_name;
    const std::string label_o = g.entities().at(t.object).label;

    std::set<EntityId> out;
    for (const auto& [x, e] : g.entities()) {
        if (x == t.object || x == t.subject) continue;
        bool is_true = false;
        for (const Triplet& tt : g.triplets())
            if (tt.subject == t.subject && tt.relation == t.relation && tt.object == x)
                is_true = true;
        if (is_true) continue;
        if (labels_equal_ci(e.label, label_o)) continue;

        const int d = dist.at({t.subject, x});
        const bool neighbor = d >= 1 && d <= cap;
        const bool beyond = d > cap;  // includes unreachable (kInf)
        const bool same_concept = e.concept_name == concept_o;
        const bool same_relation = same_relation_objects.count(x) > 0;

        bool ok = false;
        switch (m) {
            case EditMethod::NSC: ok = neighbor && same_concept; break;
            case EditMethod::NDC: ok = neighbor && !same_concept; break;
            case EditMethod::NNSC: ok = beyond && same_concept; break;
            case EditMethod::NNDC: ok = beyond && !same_concept; break;
            case EditMethod::NNSR: ok = beyond && same_relation; break;
            case EditMethod::NNDR: ok = beyond && !same_relation; break;
        }
        if (ok) out.insert(x);
    }
    return out;
}

// Exhaustive bounded-distance buckets from Floyd-Warshall.
inline std::map<int, std::set<EntityId>> brute_force_neighbors(const KnowledgeGraph& g,
                                                               const EntityId& e, int cap) {
    auto dist = floyd_warshall(g);
    std::map<int, std::set<EntityId>> buckets;
    for (const auto& [x, ent] : g.entities()) {
        if (x == e) continue;
        const int d = dist.at({e, x});
        if (d >= 1 && d <= cap) buckets[d].insert(x);
    }
    return buckets;
}

}  // namespace oracles
