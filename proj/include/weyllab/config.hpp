#pragma once

// Experiment configuration.  One flat key tree, loadable from two text
// formats: JSON (*.json) and a dotted-key line format (anything else),
// where each line reads `path.to.key = value` with values in JSON
// syntax (bare words fall back to strings).  Unknown keys are rejected
// with their full path; constraint violations name the violated rule.
// CLI overrides reuse the same dotted-key grammar.

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "weyllab/mollifier.hpp"
#include "weyllab/potential.hpp"
#include "weyllab/quadrature.hpp"

namespace weyllab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LambdaGrid {
    double min = 3.0;
    double max = 3.0;
    int count = 1;
    std::string spacing = "linear";
};

struct OutputSpec {
    std::string format = "csv";
    std::string path;  // empty: stdout only
};

struct ExperimentConfig {
    int dimension = 2;
    double eta = 0.5;
    double epsilon = -1.0;  // negative: default rule min(eta, 1-eta)/20
    double gamma = 1.0;
    BumpVariant bump_variant = BumpVariant::rho;
    double support_radius = 1.0;
    double truncation = 6.0;
    LambdaGrid lambda_grid;
    QuadratureSpec quadrature;
    std::vector<std::vector<double>> x_points;  // empty: the origin
    std::string cache_dir = ".weyllab-cache";
    OutputSpec output;
    std::vector<long long> seeds;

    double epsilon_value() const {
        return epsilon < 0.0 ? std::min(eta, 1.0 - eta) / 20.0 : epsilon;
    }

    std::vector<std::vector<double>> points() const {
        if (!x_points.empty()) return x_points;
        return {std::vector<double>(static_cast<std::size_t>(dimension), 0.0)};
    }

    std::vector<double> lambda_points() const {
        std::vector<double> out;
        if (lambda_grid.count == 1) return {lambda_grid.min};
        for (int i = 0; i < lambda_grid.count; ++i) {
            const double s = static_cast<double>(i) / (lambda_grid.count - 1);
            out.push_back(lambda_grid.spacing == "log"
                              ? lambda_grid.min *
                                    std::pow(lambda_grid.max / lambda_grid.min, s)
                              : lambda_grid.min +
                                    s * (lambda_grid.max - lambda_grid.min));
        }
        return out;
    }

    RadialSingularPotential potential() const {
        return RadialSingularPotential(dimension, eta, gamma, bump_variant,
                                       support_radius);
    }

    // gamma = 0 means the free operator; the potential class itself
    // refuses a zero coupling, so that case maps to the empty table.
    FourierTable fourier_table() const {
        if (gamma == 0.0) return FourierTable::constant(dimension, 0.0);
        return FourierTable(potential(), quadrature);
    }

    MollifierSpec mollifier_at(double lambda) const {
        return MollifierSpec(lambda, eta, epsilon);
    }
};

namespace detail {

[[noreturn]] inline void config_rule(const std::string& rule) {
    throw ConfigError("config constraint violated: " + rule);
}

inline void require_rule(bool ok, const std::string& rule) {
    if (!ok) config_rule(rule);
}

// Every key the tree may contain, as dotted paths; leaves only.
inline const std::vector<std::string>& config_schema() {
    static const std::vector<std::string> keys = {
        "dimension",          "eta",
        "epsilon",            "gamma",
        "bump.variant",       "bump.support_radius",
        "truncation",         "lambda_grid.min",
        "lambda_grid.max",    "lambda_grid.count",
        "lambda_grid.spacing", "quadrature.radial_nodes",
        "quadrature.grading_power", "quadrature.tolerance",
        "x_points",           "cache_dir",
        "output.format",      "output.path",
        "seeds"};
    return keys;
}

inline void reject_unknown_keys(const nlohmann::json& node,
                                const std::string& prefix) {
    if (!node.is_object()) return;
    for (const auto& [key, value] : node.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        bool known = false, interior = false;
        for (const auto& s : config_schema()) {
            if (s == path) known = true;
            if (s.rfind(path + ".", 0) == 0) interior = true;
        }
        if (interior) {
            reject_unknown_keys(value, path);
        } else if (!known) {
            throw ConfigError("unknown config key: " + path);
        }
    }
}

template <typename T>
T fetch(const nlohmann::json& node, const std::string& path, T fallback) {
    const nlohmann::json* cur = &node;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string part = path.substr(start, dot - start);
        if (!cur->is_object() || !cur->contains(part)) return fallback;
        cur = &(*cur)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    try {
        return cur->get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config key " + path + ": " + e.what());
    }
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& root) {
    if (!root.is_object()) throw ConfigError("config root must be an object");
    detail::reject_unknown_keys(root, "");

    ExperimentConfig c;
    c.dimension = detail::fetch<int>(root, "dimension", c.dimension);
    c.eta = detail::fetch<double>(root, "eta", c.eta);
    c.epsilon = detail::fetch<double>(root, "epsilon", c.epsilon);
    c.gamma = detail::fetch<double>(root, "gamma", c.gamma);
    const std::string variant =
        detail::fetch<std::string>(root, "bump.variant", "rho");
    c.support_radius =
        detail::fetch<double>(root, "bump.support_radius", c.support_radius);
    c.truncation = detail::fetch<double>(root, "truncation", c.truncation);
    c.lambda_grid.min = detail::fetch<double>(root, "lambda_grid.min", c.lambda_grid.min);
    c.lambda_grid.max = detail::fetch<double>(root, "lambda_grid.max", c.lambda_grid.max);
    c.lambda_grid.count = detail::fetch<int>(root, "lambda_grid.count", c.lambda_grid.count);
    c.lambda_grid.spacing =
        detail::fetch<std::string>(root, "lambda_grid.spacing", c.lambda_grid.spacing);
    c.quadrature.nodes =
        detail::fetch<int>(root, "quadrature.radial_nodes", c.quadrature.nodes);
    c.quadrature.grading_floor = detail::fetch<double>(
        root, "quadrature.grading_power", c.quadrature.grading_floor);
    c.quadrature.rel_tolerance = detail::fetch<double>(
        root, "quadrature.tolerance", c.quadrature.rel_tolerance);
    c.x_points = detail::fetch<std::vector<std::vector<double>>>(
        root, "x_points", c.x_points);
    c.cache_dir = detail::fetch<std::string>(root, "cache_dir", c.cache_dir);
    c.output.format = detail::fetch<std::string>(root, "output.format", c.output.format);
    c.output.path = detail::fetch<std::string>(root, "output.path", c.output.path);
    c.seeds = detail::fetch<std::vector<long long>>(root, "seeds", c.seeds);

    // Named rules first, then the module constructors re-check their own.
    detail::require_rule(c.dimension >= 2 && c.dimension <= 5,
                         "dimension in [2,5]");
    detail::require_rule(c.eta > 0.0 && c.eta < 1.0, "eta in (0,1)");
    if (c.epsilon >= 0.0)
        detail::require_rule(
            c.epsilon > 0.0 && c.epsilon < std::min(c.eta, 1.0 - c.eta) / 10.0,
            "epsilon in (0, min(eta,1-eta)/10)");
    detail::require_rule(std::isfinite(c.gamma), "gamma finite");
    if (variant == "rho") {
        c.bump_variant = BumpVariant::rho;
    } else if (variant == "chi") {
        c.bump_variant = BumpVariant::chi;
    } else {
        detail::config_rule("bump.variant in {rho, chi}");
    }
    detail::require_rule(c.support_radius > 0.0 && c.support_radius < M_PI,
                         "bump.support_radius in (0, pi)");
    detail::require_rule(c.truncation > 0.0, "truncation > 0");
    detail::require_rule(c.lambda_grid.min > 0.0, "lambda_grid.min > 0");
    detail::require_rule(c.lambda_grid.max >= c.lambda_grid.min,
                         "lambda_grid.max >= lambda_grid.min");
    detail::require_rule(c.lambda_grid.count >= 1, "lambda_grid.count >= 1");
    detail::require_rule(
        c.lambda_grid.spacing == "linear" || c.lambda_grid.spacing == "log",
        "lambda_grid.spacing in {linear, log}");
    detail::require_rule(c.truncation >= 2.0 * c.lambda_grid.max,
                         "truncation >= 2 * lambda_grid.max");
    c.quadrature.validate();
    for (const auto& x : c.x_points)
        detail::require_rule(static_cast<int>(x.size()) == c.dimension,
                             "x_points entries must have length dimension");
    detail::require_rule(c.output.format == "csv" || c.output.format == "json",
                         "output.format in {csv, json}");
    if (c.gamma != 0.0) c.potential();  // surfaces potential-module constraints
    return c;
}

// Dotted-key line format: `a.b.c = value`, '#' comments, blank lines
// skipped.  Values parse as JSON; bare words become strings.
inline nlohmann::json parse_flat_config(const std::string& text,
                                        const std::string& source) {
    nlohmann::json root = nlohmann::json::object();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto notspace = [](unsigned char ch) { return !std::isspace(ch); };
        std::string trimmed = line;
        trimmed.erase(trimmed.begin(),
                      std::find_if(trimmed.begin(), trimmed.end(), notspace));
        trimmed.erase(std::find_if(trimmed.rbegin(), trimmed.rend(), notspace).base(),
                      trimmed.end());
        if (trimmed.empty()) continue;
        const std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(lineno) +
                              ": expected `key = value`");
        std::string key = trimmed.substr(0, eq);
        std::string value = trimmed.substr(eq + 1);
        key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
        value.erase(value.begin(),
                    std::find_if(value.begin(), value.end(), notspace));
        if (key.empty())
            throw ConfigError(source + ":" + std::to_string(lineno) +
                              ": empty key");

        nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
        if (parsed.is_discarded()) parsed = value;  // bare word

        nlohmann::json* cur = &root;
        std::size_t start = 0;
        while (true) {
            const std::size_t dot = key.find('.', start);
            const std::string part = key.substr(start, dot - start);
            if (dot == std::string::npos) {
                (*cur)[part] = std::move(parsed);
                break;
            }
            cur = &(*cur)[part];
            if (!cur->is_object() && !cur->is_null())
                throw ConfigError(source + ":" + std::to_string(lineno) +
                                  ": key " + key + " conflicts with a scalar");
            start = dot + 1;
        }
    }
    return root;
}

// CLI override `path.to.key=value`, same value grammar as the flat format.
inline void apply_override(nlohmann::json& root, const std::string& setting) {
    const std::size_t eq = setting.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key=value: " + setting);
    const std::string key = setting.substr(0, eq);
    nlohmann::json parsed = nlohmann::json::parse(setting.substr(eq + 1), nullptr, false);
    if (parsed.is_discarded()) parsed = setting.substr(eq + 1);

    nlohmann::json* cur = &root;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = key.find('.', start);
        const std::string part = key.substr(start, dot - start);
        if (part.empty()) throw ConfigError("override has an empty key segment: " + setting);
        if (dot == std::string::npos) {
            (*cur)[part] = std::move(parsed);
            return;
        }
        cur = &(*cur)[part];
        start = dot + 1;
    }
}

inline nlohmann::json load_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const bool is_json = path.size() >= 5 && path.rfind(".json") == path.size() - 5;
    if (!is_json) return parse_flat_config(buf.str(), path);
    try {
        return nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        // nlohmann reports "at line L, column C" inside what().
        throw ConfigError(path + ": " + e.what());
    }
}

inline ExperimentConfig load_config(const std::string& path) {
    return config_from_json(load_config_json(path));
}

}  // namespace weyllab
