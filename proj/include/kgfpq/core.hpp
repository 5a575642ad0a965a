#pragma once
// Core domain types shared across the pipeline: entities, triplets,
// editing methods, question formats.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace kgfpq {

using EntityId = std::string;

struct Entity {
    EntityId id;
    std::string label;
    std::string concept_name;  // exactly one concept per entity
};

struct Triplet {
    EntityId subject;
    std::string relation;
    EntityId object;

    friend bool operator==(const Triplet&, const Triplet&) = default;
    friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

// The six object-corruption methods, spanning the distance axis
// (neighbor / not-neighbor) and the association axes (same/different
// concept, same/different relation).
enum class EditMethod { NSC, NDC, NNSC, NNDC, NNSR, NNDR };

inline constexpr EditMethod kAllEditMethods[] = {
    EditMethod::NSC,  EditMethod::NDC,  EditMethod::NNSC,
    EditMethod::NNDC, EditMethod::NNSR, EditMethod::NNDR,
};

inline const char* to_string(EditMethod m) {
    switch (m) {
        case EditMethod::NSC: return "NSC";
        case EditMethod::NDC: return "NDC";
        case EditMethod::NNSC: return "NNSC";
        case EditMethod::NNDC: return "NNDC";
        case EditMethod::NNSR: return "NNSR";
        case EditMethod::NNDR: return "NNDR";
    }
    throw std::logic_error("bad EditMethod");
}

inline std::optional<EditMethod> edit_method_from_string(const std::string& s) {
    for (EditMethod m : kAllEditMethods)
        if (s == to_string(m)) return m;
    return std::nullopt;
}

enum class QuestionFormat { YesNo, WH };

inline const char* to_string(QuestionFormat f) {
    return f == QuestionFormat::YesNo ? "yesno" : "wh";
}

inline std::optional<QuestionFormat> question_format_from_string(const std::string& s) {
    if (s == "yesno") return QuestionFormat::YesNo;
    if (s == "wh") return QuestionFormat::WH;
    return std::nullopt;
}

// Shortest-path result bounded by a hop cap. Beyond means no path of
// length <= cap exists.
struct HopDistance {
    static constexpr int kBeyond = -1;
    int value = kBeyond;

    static HopDistance beyond() { return {kBeyond}; }
    bool is_beyond() const { return value == kBeyond; }
    friend bool operator==(const HopDistance&, const HopDistance&) = default;
};

// FNV-1a, used for config hashing and seed derivation.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace kgfpq
