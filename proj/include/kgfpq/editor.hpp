#pragma once
// Object corruption: turns each true triplet into up to six false
// triplets, one per editing method. Methods combine a distance axis
// (the edited object within 5 undirected hops of the subject, or not)
// with an association axis (same/different concept as the original
// object, or same/different relation membership).
//
// Common exclusions for every method: the candidate is not the original
// object, not the subject, and <subject, relation, candidate> is not a
// true triplet — so the edited triplet is guaranteed false even for
// multi-valued relations. The candidate's label must also differ
// (case-insensitively) from the original object's label, so the later
// string substitution stays well defined.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kgfpq/core.hpp"
#include "kgfpq/kg_store.hpp"
#include "kgfpq/rng.hpp"

namespace kgfpq {

struct FalseTriplet {
    Triplet base;
    EntityId edited_object;
    EditMethod method;
    std::optional<int> hop;  // recorded for NSC/NDC only, in [1,5]

    json to_json(std::uint64_t seed) const {
        json j{{"subject", base.subject},
               {"relation", base.relation},
               {"object", base.object},
               {"edited_object", edited_object},
               {"method", to_string(method)},
               {"hop", hop ? json(*hop) : json(nullptr)},
               {"seed", seed}};
        return j;
    }
};

struct EditBundle {
    Triplet base;
    std::map<EditMethod, FalseTriplet> edits;
    std::map<EditMethod, std::string> skipped;  // method -> reason
};

struct EmptyCandidateSet : std::runtime_error {
    explicit EmptyCandidateSet(EditMethod m)
        : std::runtime_error(std::string("no valid edited objects for method ") + to_string(m)),
          method(m) {}
    EditMethod method;
};

namespace detail {

inline bool labels_equal_ci(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

}  // namespace detail

// True iff x is admissible as an edited object for (t, m). Evaluates
// the method predicate and common exclusions directly against the
// graph, with no reference to how candidates were enumerated.
inline bool edit_predicate(const KnowledgeGraph& g, const Triplet& t, EditMethod m,
                           const EntityId& x, int hop_cap = 5) {
    if (x == t.object || x == t.subject) return false;
    if (g.has_triplet(t.subject, t.relation, x)) return false;
    if (detail::labels_equal_ci(g.entity(x).label, g.entity(t.object).label)) return false;

    const HopDistance d = g.hop_distance(t.subject, x, hop_cap);
    const bool neighbor = !d.is_beyond() && d.value >= 1;
    const bool same_concept = g.concept_of(x) == g.concept_of(t.object);
    const bool same_relation = g.objects_of_relation(t.relation).count(x) > 0;

    switch (m) {
        case EditMethod::NSC: return neighbor && same_concept;
        case EditMethod::NDC: return neighbor && !same_concept;
        case EditMethod::NNSC: return d.is_beyond() && same_concept;
        case EditMethod::NNDC: return d.is_beyond() && !same_concept;
        case EditMethod::NNSR: return d.is_beyond() && same_relation;
        case EditMethod::NNDR: return d.is_beyond() && !same_relation;
    }
    return false;
}

// The maximal set of valid edited objects for method m. Neighbor
// methods enumerate the bounded BFS result; not-neighbor methods start
// from the relevant index (concept class or relation objects) or, for
// NNDC/NNDR, the whole entity table.
inline std::set<EntityId> candidates(const KnowledgeGraph& g, const Triplet& t, EditMethod m,
                                     int hop_cap = 5) {
    if (!g.triplets().count(t))
        throw std::runtime_error("triplet <" + t.subject + ", " + t.relation + ", " + t.object +
                                 "> is not in the graph");
    std::set<EntityId> out;
    auto consider = [&](const EntityId& x) {
        if (edit_predicate(g, t, m, x, hop_cap)) out.insert(x);
    };
    switch (m) {
        case EditMethod::NSC:
        case EditMethod::NDC:
            for (const auto& [d, bucket] : g.neighbors_within(t.subject, hop_cap))
                for (const EntityId& x : bucket) consider(x);
            break;
        case EditMethod::NNSC:
            for (const EntityId& x : g.entities_of_concept(g.concept_of(t.object))) consider(x);
            break;
        case EditMethod::NNSR:
            for (const EntityId& x : g.objects_of_relation(t.relation)) consider(x);
            break;
        case EditMethod::NNDC:
        case EditMethod::NNDR:
            for (const auto& [id, e] : g.entities()) consider(id);
            break;
    }
    return out;
}

// Uniformly samples one candidate with the seeded generator; records
// the hop distance for the neighbor methods.
inline FalseTriplet edit(const KnowledgeGraph& g, const Triplet& t, EditMethod m,
                         std::uint64_t seed, int hop_cap = 5) {
    std::set<EntityId> cands = candidates(g, t, m, hop_cap);
    if (cands.empty()) throw EmptyCandidateSet(m);
    std::vector<EntityId> ordered(cands.begin(), cands.end());
    SplitMix64 rng(seed);
    const EntityId& chosen = ordered[rng.bounded(ordered.size())];

    FalseTriplet ft{t, chosen, m, std::nullopt};
    if (m == EditMethod::NSC || m == EditMethod::NDC)
        ft.hop = g.hop_distance(t.subject, chosen, hop_cap).value;
    return ft;
}

// One attempt per method, with per-method derived sub-seeds. Infeasible
// methods land in `skipped` with the reason.
inline EditBundle edit_all(const KnowledgeGraph& g, const Triplet& t, std::uint64_t seed,
                           int hop_cap = 5) {
    EditBundle bundle{t, {}, {}};
    for (EditMethod m : kAllEditMethods) {
        const std::uint64_t sub = derive_seed(seed, to_string(m));
        try {
            bundle.edits.emplace(m, edit(g, t, m, sub, hop_cap));
        } catch (const EmptyCandidateSet& e) {
            bundle.skipped.emplace(m, e.what());
        }
    }
    return bundle;
}

// Independent re-check: re-evaluates the predicate and exclusions from
// scratch. Emitted edits must always pass.
inline bool verify_method(const KnowledgeGraph& g, const FalseTriplet& ft, int hop_cap = 5) {
    if (!g.entities().count(ft.edited_object)) return false;
    if (!edit_predicate(g, ft.base, ft.method, ft.edited_object, hop_cap)) return false;
    if (ft.method == EditMethod::NSC || ft.method == EditMethod::NDC) {
        if (!ft.hop) return false;
        const HopDistance d = g.hop_distance(ft.base.subject, ft.edited_object, hop_cap);
        if (d.is_beyond() || d.value != *ft.hop || *ft.hop < 1 || *ft.hop > hop_cap) return false;
    } else if (ft.hop) {
        return false;
    }
    return true;
}

}  // namespace kgfpq
