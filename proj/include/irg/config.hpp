#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "irg/experiments.hpp"
#include "irg/weights.hpp"

namespace irg {

// Malformed or invalid configuration; line is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, int line) : std::runtime_error(format(msg, line)), line_(line) {}
    int line() const { return line_; }

private:
    static std::string format(const std::string& msg, int line) {
        return line > 0 ? "line " + std::to_string(line) + ": " + msg : msg;
    }
    int line_;
};

std::string read_text_file(const std::string& path);

// Parses the JSON experiment configuration.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// SHA-256 of the canonical (sorted-key, compact) JSON form.
std::string config_hash(const std::string& text);

// JSON round trip of a weight law.
std::string weight_spec_json(const WeightSpec& spec);
WeightSpec parse_weight_spec(const std::string& json_text);

struct RunManifest {
    std::string command;
    std::string config_path;
    std::string config_hash;
    Seed seed;
    std::string tool_version;
    std::string timestamp;
    unsigned workers = 1;
    std::vector<std::string> outputs;

    std::string to_json() const;
};

inline constexpr const char* tool_version = "0.1.0";

}  // namespace irg
