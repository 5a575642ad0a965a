#pragma once
// Run manifests: every pipeline stage writes one next to its outputs so
// any file is traceable to the stage, inputs, seed, and config that
// produced it.

#include <chrono>
#include <fstream>
#include <string>
#include <vector>

#include "kgfpq/core.hpp"
#include "kgfpq/jsonl.hpp"

namespace kgfpq {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
    std::string stage;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;
    std::string config_hash;  // FNV-1a of the config file bytes
    std::string timestamp;

    static std::string hash_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) return "";
        std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(fnv1a(bytes)));
        return buf;
    }

    void stamp_now() {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        timestamp = buf;
    }

    void write(const std::string& path) const {
        json j{{"stage", stage},       {"inputs", inputs},
               {"outputs", outputs},   {"seed", seed},
               {"config_hash", config_hash}, {"timestamp", timestamp},
               {"tool_version", kToolVersion}};
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << j.dump(2) << "\n";
    }
};

}  // namespace kgfpq
