#include "irg/config.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"
#include <openssl/evp.h>

namespace irg {

using json = nlohmann::json;

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of "key" in the text, 0 if absent.
int line_of_key(const std::string& text, const std::string& key) {
    const auto pos = text.find('"' + key + '"');
    return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what(), line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0));
    }
}

double number(const json& j, const std::string& key) {
    if (!j.contains(key)) throw std::invalid_argument("missing field '" + key + "'");
    if (!j.at(key).is_number()) throw std::invalid_argument("field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

std::vector<double> numbers(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_array()) throw std::invalid_argument("field '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& x : j.at(key)) {
        if (!x.is_number()) throw std::invalid_argument("field '" + key + "' must contain numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

WeightSpec spec_from(const json& j) {
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
        throw std::invalid_argument("weight law needs a string 'family'");
    const std::string f = j.at("family").get<std::string>();
    if (f == "constant") return WeightSpec::constant(number(j, "value"));
    if (f == "erdos_renyi") return WeightSpec::constant(number(j, "lambda"));
    if (f == "finite_discrete") return WeightSpec::finite_discrete(numbers(j, "values"), numbers(j, "probs"));
    if (f == "gamma") return WeightSpec::gamma(number(j, "shape"), number(j, "scale"));
    if (f == "exponential") return WeightSpec::exponential(number(j, "rate"));
    throw std::invalid_argument("unknown weight family '" + f + "'");
}

json spec_to(const WeightSpec& s) {
    switch (s.family()) {
        case WeightSpec::Family::constant: return {{"family", "constant"}, {"value", s.values().front()}};
        case WeightSpec::Family::finite_discrete:
            return {{"family", "finite_discrete"}, {"values", s.values()}, {"probs", s.probs()}};
        case WeightSpec::Family::gamma: return {{"family", "gamma"}, {"shape", s.shape()}, {"scale", s.scale()}};
    }
    return {};
}

MarkLaws marks_from(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("marks must be an object");
    MarkLaws m;
    for (const auto& [k, v] : j.items()) {
        if (k != "edge" && k != "vertex") throw std::invalid_argument("unknown marks field '" + k + "'");
        if (v.is_null()) continue;
        (k == "edge" ? m.edge : m.vertex) = spec_from(v);
    }
    return m;
}

template <class T>
std::vector<T> grid(const json& j, const std::string& key) {
    std::vector<T> out;
    auto one = [&](const json& x) {
        if (!x.is_number_integer() || x.get<long long>() < 0)
            throw std::invalid_argument("field '" + key + "' must hold nonnegative integers");
        out.push_back(static_cast<T>(x.get<long long>()));
    };
    if (j.is_array()) {
        for (const auto& x : j) one(x);
    } else {
        one(j);
    }
    return out;
}

std::size_t count(const json& j, const std::string& key) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw std::invalid_argument("field '" + key + "' must be a nonnegative integer");
    return static_cast<std::size_t>(j.get<long long>());
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'", 0);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ExperimentConfig parse_config(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object()) throw ConfigError("config must be a JSON object", 1);
    ExperimentConfig cfg;
    std::string current;
    try {
        for (const auto& [key, v] : j.items()) {
            current = key;
            if (key == "weights") cfg.weights = spec_from(v);
            else if (key == "marks") cfg.marks = marks_from(v);
            else if (key == "limit_marks") cfg.limit_marks = marks_from(v);
            else if (key == "n") cfg.n_grid = grid<std::size_t>(v, key);
            else if (key == "ell") cfg.ell_grid = grid<int>(v, key);
            else if (key == "k_n") {
                if (v.is_string() && v.get<std::string>() == "cube-root") cfg.k_n.reset();
                else if (v.is_number()) cfg.k_n = v.get<double>();
                else throw std::invalid_argument("k_n must be a number or \"cube-root\"");
            } else if (key == "replicas") cfg.replicas = count(v, key);
            else if (key == "roots") cfg.roots = count(v, key);
            else if (key == "application") {
                if (!v.is_string()) throw std::invalid_argument("application must be a string");
                cfg.application = parse_application(v.get<std::string>());
            } else if (key == "seed") {
                if (!v.is_string()) throw std::invalid_argument("seed must be a hex string");
                cfg.seed = Seed::parse(v.get<std::string>());
            } else if (key == "C") cfg.C = v.get<double>();
            else if (key == "C0") cfg.C0 = v.get<double>();
            else if (key == "pop_size") cfg.pop_size = count(v, key);
            else if (key == "iterations") cfg.iterations = static_cast<int>(count(v, key));
            else if (key == "comment") continue;
            else throw std::invalid_argument("unknown field '" + key + "'");
        }
        current.clear();
        cfg.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what(), current.empty() ? 0 : line_of_key(text, current));
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string config_hash(const std::string& text) {
    const std::string canon = parse_json(text).dump();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(canon.data(), canon.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("config_hash: digest failed");
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

std::string weight_spec_json(const WeightSpec& spec) { return spec_to(spec).dump(); }

WeightSpec parse_weight_spec(const std::string& json_text) {
    try {
        return spec_from(parse_json(json_text));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what(), 0);
    }
}

std::string RunManifest::to_json() const {
    json j;
    j["command"] = command;
    j["config_path"] = config_path;
    j["config_hash"] = config_hash;
    j["seed"] = seed.hex();
    j["tool_version"] = tool_version;
    j["timestamp"] = timestamp;
    j["workers"] = workers;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

}  // namespace irg
