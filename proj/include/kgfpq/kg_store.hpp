#pragma once
// Immutable indexed triplet store. Loads the entities/triplets JSONL
// dump, builds concept and relation indices, and answers the bounded
// undirected-hop queries every editing method needs.
//
// Edges are undirected for neighborhood queries: "neighbor of" in the
// source data is direction-agnostic, and hop distances follow suit.

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "kgfpq/core.hpp"
#include "kgfpq/jsonl.hpp"
#include "kgfpq/rng.hpp"

namespace kgfpq {

struct DomainFilter {
    std::string name;
    std::set<std::string> allowed_concepts;
    std::set<std::string> allowed_relations;
    std::set<std::string> relation_blacklist;  // wins over allowed_relations

    static DomainFilter from_json(const json& j) {
        DomainFilter f;
        f.name = j.at("name").get<std::string>();
        for (const auto& c : j.at("allowed_concepts")) f.allowed_concepts.insert(c.get<std::string>());
        for (const auto& r : j.at("allowed_relations")) f.allowed_relations.insert(r.get<std::string>());
        if (j.contains("relation_blacklist"))
            for (const auto& r : j.at("relation_blacklist")) f.relation_blacklist.insert(r.get<std::string>());
        if (f.allowed_concepts.empty()) throw std::runtime_error("domain filter: allowed_concepts empty");
        if (f.allowed_relations.empty()) throw std::runtime_error("domain filter: allowed_relations empty");
        return f;
    }

    bool allows_relation(const std::string& r) const {
        return allowed_relations.count(r) && !relation_blacklist.count(r);
    }
};

struct LoadStats {
    std::size_t entities = 0;
    std::size_t triplets = 0;
    std::size_t duplicate_triplets_dropped = 0;
    std::size_t literal_objects_dropped = 0;
};

class KnowledgeGraph {
public:
    // All indices are pure caches over entities_ and triplets_;
    // rebuild_indices() regenerates them from scratch.
    static KnowledgeGraph from_parts(std::vector<Entity> entities, std::vector<Triplet> triplets) {
        KnowledgeGraph g;
        for (auto& e : entities) {
            if (e.id.empty()) throw std::runtime_error("entity with empty id");
            if (e.label.empty()) throw std::runtime_error("entity " + e.id + " has empty label");
            if (e.concept_name.empty())
                throw std::runtime_error("entity " + e.id +
                                         " has no concept; assign exactly one concept");
            if (!g.entities_.emplace(e.id, e).second)
                throw std::runtime_error("duplicate entity id " + e.id);
        }
        for (auto& t : triplets) {
            if (t.relation.empty()) throw std::runtime_error("triplet with empty relation");
            if (t.subject == t.object)
                throw std::runtime_error("self-loop triplet on " + t.subject);
            if (!g.entities_.count(t.subject))
                throw std::runtime_error("triplet references unknown entity " + t.subject);
            if (!g.entities_.count(t.object))
                throw std::runtime_error("triplet references unknown entity " + t.object);
            auto inserted = g.triplets_.insert(t);
            if (!inserted.second) ++g.stats_.duplicate_triplets_dropped;
        }
        g.stats_.entities = g.entities_.size();
        g.stats_.triplets = g.triplets_.size();
        g.rebuild_indices();
        return g;
    }

    const std::unordered_map<EntityId, Entity>& entities() const { return entities_; }
    const std::set<Triplet>& triplets() const { return triplets_; }
    const LoadStats& stats() const { return stats_; }

    const Entity& entity(const EntityId& id) const {
        auto it = entities_.find(id);
        if (it == entities_.end()) throw std::runtime_error("unknown entity id " + id);
        return it->second;
    }

    const std::string& concept_of(const EntityId& id) const { return entity(id).concept_name; }

    bool has_triplet(const EntityId& s, const std::string& r, const EntityId& o) const {
        return triplets_.count(Triplet{s, r, o}) > 0;
    }

    const std::set<EntityId>& entities_of_concept(const std::string& c) const {
        static const std::set<EntityId> empty;
        auto it = concept_index_.find(c);
        return it == concept_index_.end() ? empty : it->second;
    }

    // All entities appearing as the object of relation r; empty set for
    // an unknown relation.
    const std::set<EntityId>& objects_of_relation(const std::string& r) const {
        static const std::set<EntityId> empty;
        auto it = relation_object_index_.find(r);
        return it == relation_object_index_.end() ? empty : it->second;
    }

    const std::set<std::pair<EntityId, EntityId>>& pairs_of_relation(const std::string& r) const {
        static const std::set<std::pair<EntityId, EntityId>> empty;
        auto it = relation_subject_index_.find(r);
        return it == relation_subject_index_.end() ? empty : it->second;
    }

    const std::set<EntityId>& adjacent(const EntityId& e) const {
        static const std::set<EntityId> empty;
        auto it = adjacency_.find(e);
        return it == adjacency_.end() ? empty : it->second;
    }

    // Shortest undirected path length, capped. hop_distance(a, a) = 0.
    HopDistance hop_distance(const EntityId& a, const EntityId& b, int cap = 5) const {
        require_entity(a);
        require_entity(b);
        if (cap < 1) throw std::invalid_argument("cap must be >= 1");
        if (a == b) return HopDistance{0};
        std::unordered_map<EntityId, int> dist{{a, 0}};
        std::deque<EntityId> frontier{a};
        while (!frontier.empty()) {
            EntityId cur = frontier.front();
            frontier.pop_front();
            int d = dist[cur];
            if (d >= cap) continue;
            for (const EntityId& nxt : adjacent(cur)) {
                if (dist.count(nxt)) continue;
                if (nxt == b) return HopDistance{d + 1};
                dist[nxt] = d + 1;
                frontier.push_back(nxt);
            }
        }
        return HopDistance::beyond();
    }

    // Bounded BFS; bucket d holds exactly the entities at shortest
    // distance d from e. e itself is in no bucket.
    std::map<int, std::set<EntityId>> neighbors_within(const EntityId& e, int cap = 5) const {
        require_entity(e);
        if (cap < 1) throw std::invalid_argument("cap must be >= 1");
        std::map<int, std::set<EntityId>> buckets;
        std::unordered_map<EntityId, int> dist{{e, 0}};
        std::deque<EntityId> frontier{e};
        while (!frontier.empty()) {
            EntityId cur = frontier.front();
            frontier.pop_front();
            int d = dist[cur];
            if (d >= cap) continue;
            for (const EntityId& nxt : adjacent(cur)) {
                if (dist.count(nxt)) continue;
                dist[nxt] = d + 1;
                buckets[d + 1].insert(nxt);
                frontier.push_back(nxt);
            }
        }
        return buckets;
    }

    struct ExtractResult {
        std::vector<Triplet> triplets;
        bool pool_exhausted = false;  // fewer eligible than requested
        std::size_t pool_size = 0;
    };

    // Uniform sample without replacement from the filter-eligible pool.
    // Deterministic given seed: the pool is sorted, then seed-shuffled,
    // and the first n taken.
    ExtractResult extract_true_triplets(const DomainFilter& f, std::size_t n,
                                        std::uint64_t seed) const {
        if (n < 1) throw std::invalid_argument("n must be >= 1");
        std::vector<Triplet> pool;
        for (const Triplet& t : triplets_) {
            if (!f.allowed_concepts.count(concept_of(t.subject))) continue;
            if (!f.allows_relation(t.relation)) continue;
            pool.push_back(t);
        }
        if (pool.empty())
            throw std::runtime_error("no triplets match domain filter '" + f.name + "'");
        ExtractResult res;
        res.pool_size = pool.size();
        seeded_shuffle(pool, seed);
        if (pool.size() > n) pool.resize(n);
        else res.pool_exhausted = pool.size() < n;
        res.triplets = std::move(pool);
        return res;
    }

    void rebuild_indices() {
        adjacency_.clear();
        concept_index_.clear();
        relation_object_index_.clear();
        relation_subject_index_.clear();
        for (const auto& [id, e] : entities_) concept_index_[e.concept_name].insert(id);
        for (const Triplet& t : triplets_) {
            adjacency_[t.subject].insert(t.object);
            adjacency_[t.object].insert(t.subject);
            relation_object_index_[t.relation].insert(t.object);
            relation_subject_index_[t.relation].insert({t.subject, t.object});
        }
    }

private:
    void require_entity(const EntityId& id) const {
        if (!entities_.count(id)) throw std::runtime_error("unknown entity id " + id);
    }

    std::unordered_map<EntityId, Entity> entities_;
    std::set<Triplet> triplets_;
    std::unordered_map<EntityId, std::set<EntityId>> adjacency_;
    std::map<std::string, std::set<EntityId>> concept_index_;
    std::map<std::string, std::set<EntityId>> relation_object_index_;
    std::map<std::string, std::set<std::pair<EntityId, EntityId>>> relation_subject_index_;
    LoadStats stats_;
};

// Loads entities.jsonl ({"id","label","concept"}) and triplets.jsonl
// ({"subject","relation","object"}). Triplets whose object is not an
// entity in the table are literal-valued and dropped: editing needs
// entity objects with concepts. Unknown subjects are still errors.
inline KnowledgeGraph load_graph(const std::string& entities_path,
                                 const std::string& triplets_path,
                                 LoadStats* stats_out = nullptr) {
    std::vector<Entity> entities;
    std::unordered_set<std::string> seen_ids;
    for_each_jsonl(entities_path, [&](const json& j, std::size_t lineno) {
        Entity e{j.at("id").get<std::string>(), j.at("label").get<std::string>(),
                 j.at("concept").get<std::string>()};
        if (e.id.empty()) throw JsonlError(entities_path, lineno, "empty entity id");
        if (e.concept_name.empty())
            throw JsonlError(entities_path, lineno,
                             "entity " + e.id + " has no concept; assign exactly one concept");
        if (!seen_ids.insert(e.id).second)
            throw JsonlError(entities_path, lineno,
                             "entity " + e.id + " defined more than once; entities carry exactly "
                             "one concept, merge or rename the duplicates");
        entities.push_back(std::move(e));
    });

    // Numeric and date-like object values are literals, not entity
    // references; they carry no concept and cannot be edited.
    auto looks_like_literal = [](const json& v) {
        if (!v.is_string()) return true;
        const std::string s = v.get<std::string>();
        if (s.empty()) return false;
        if (!std::isdigit(static_cast<unsigned char>(s[0])) && s[0] != '+' && s[0] != '-')
            return false;
        return s.find_first_not_of("0123456789+-./: ", 1) == std::string::npos;
    };

    std::size_t literals_dropped = 0;
    std::vector<Triplet> triplets;
    for_each_jsonl(triplets_path, [&](const json& j, std::size_t lineno) {
        const json& obj_val = j.at("object");
        if (!seen_ids.count(obj_val.is_string() ? obj_val.get<std::string>() : std::string()) &&
            looks_like_literal(obj_val)) {
            ++literals_dropped;
            return;
        }
        Triplet t{j.at("subject").get<std::string>(), j.at("relation").get<std::string>(),
                  obj_val.get<std::string>()};
        if (!seen_ids.count(t.subject))
            throw JsonlError(triplets_path, lineno, "unknown subject entity " + t.subject);
        if (!seen_ids.count(t.object))
            throw JsonlError(triplets_path, lineno, "unknown object entity " + t.object);
        if (t.subject == t.object)
            throw JsonlError(triplets_path, lineno, "self-loop triplet on " + t.subject);
        triplets.push_back(std::move(t));
    });

    KnowledgeGraph g = KnowledgeGraph::from_parts(std::move(entities), std::move(triplets));
    LoadStats stats = g.stats();
    stats.literal_objects_dropped = literals_dropped;
    if (stats_out) *stats_out = stats;
    return g;
}

}  // namespace kgfpq
