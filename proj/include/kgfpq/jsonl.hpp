#pragma once
// JSONL helpers: line-by-line parsing with line numbers in errors,
// deterministic writing.

#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace kgfpq {

using json = nlohmann::json;

struct JsonlError : std::runtime_error {
    JsonlError(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
          line_number(line) {}
    std::size_t line_number;
};

// Calls fn(object, line_number) for every non-empty line. Malformed
// lines raise JsonlError with the offending line number.
inline void for_each_jsonl(const std::string& path,
                           const std::function<void(const json&, std::size_t)>& fn) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw JsonlError(path, lineno, e.what());
        }
        if (!obj.is_object()) throw JsonlError(path, lineno, "expected a JSON object");
        try {
            fn(obj, lineno);
        } catch (const JsonlError&) {
            throw;
        } catch (const std::exception& e) {
            throw JsonlError(path, lineno, e.what());
        }
    }
}

inline std::vector<json> read_jsonl(const std::string& path) {
    std::vector<json> out;
    for_each_jsonl(path, [&](const json& obj, std::size_t) { out.push_back(obj); });
    return out;
}

class JsonlWriter {
public:
    explicit JsonlWriter(const std::string& path, bool append = false)
        : out_(path, append ? std::ios::app : std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot write " + path);
    }

    void write(const json& obj) {
        out_ << obj.dump() << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
};

inline void write_jsonl(const std::string& path, const std::vector<json>& rows) {
    JsonlWriter w(path);
    for (const auto& r : rows) w.write(r);
}

}  // namespace kgfpq
