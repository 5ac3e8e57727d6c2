#pragma once

// Scenario parameters and the flat `key = value` config format.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "metrics.hpp"
#include "routing.hpp"

namespace dtnspace {

enum class ConfigErrorKind { malformed_line, unknown_key, out_of_range, missing_value };

inline std::string_view config_error_name(ConfigErrorKind k) {
    switch (k) {
        case ConfigErrorKind::malformed_line: return "malformed line";
        case ConfigErrorKind::unknown_key: return "unknown key";
        case ConfigErrorKind::out_of_range: return "out of range";
        case ConfigErrorKind::missing_value: return "missing value";
    }
    return "?";
}

class ConfigError : public std::runtime_error {
public:
    ConfigError(ConfigErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(config_error_name(kind)) + ": " + what), kind_(kind) {}

    ConfigErrorKind kind() const { return kind_; }

private:
    ConfigErrorKind kind_;
};

struct ScenarioConfig {
    std::uint32_t n_nodes = 50;
    std::uint32_t n_locations = 25;
    double duration = 4000.0;       // s
    double traffic_horizon = 500.0;  // s
    double packet_interval = 30.0;   // s
    double t_min = 5.0;              // s
    double t_max = 15.0;             // s
    double delta = kDefaultMatchingDelta;
    double time_step = 0.01;  // s

    std::optional<double> d;
    std::optional<Policy> policy;
    std::optional<MetricId> metric;
    std::optional<std::uint32_t> knowledge;
    TruncationScope truncation = TruncationScope::destination;

    std::uint64_t seed = 1;
    std::uint32_t runs = 5;

    /// Knowledge level in effect: full patterns unless a level is set.
    std::uint32_t knowledge_level() const { return knowledge.value_or(n_locations); }

    MetricKind metric_kind() const {
        const MetricId id = metric.value_or(MetricId::euclidean);
        return id == MetricId::matching ? MetricKind::matching(delta) : MetricKind{id, 0.0};
    }
};

namespace detail {

[[noreturn]] inline void range_error(const std::string& what) {
    throw ConfigError(ConfigErrorKind::out_of_range, what);
}

inline bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace detail

/// Parameter checks that hold for any use of the config.
inline void validate(const ScenarioConfig& c) {
    using detail::positive_finite;
    using detail::range_error;
    if (c.n_nodes < 2) range_error("n_nodes must be at least 2");
    if (c.n_locations < 1) range_error("n_locations must be at least 1");
    if (!positive_finite(c.time_step)) range_error("time_step must be positive");
    if (!positive_finite(c.duration)) range_error("duration must be positive");
    if (!positive_finite(c.traffic_horizon)) range_error("traffic_horizon must be positive");
    if (c.traffic_horizon > c.duration) range_error("traffic_horizon exceeds duration");
    if (!positive_finite(c.packet_interval)) range_error("packet_interval must be positive");
    if (!positive_finite(c.t_min)) range_error("t_min must be positive");
    if (!positive_finite(c.t_max)) range_error("t_max must be positive");
    if (c.t_min > c.t_max) range_error("t_min exceeds t_max");
    if (!(std::isfinite(c.delta) && c.delta >= 0.0)) range_error("delta must be finite and >= 0");
    if (c.d && !(std::isfinite(*c.d) && *c.d >= 1.0)) range_error("d must be >= 1");
    if (c.knowledge && (*c.knowledge < 1 || *c.knowledge > c.n_locations))
        range_error("knowledge must be in [1, n_locations]");
    if (c.runs < 1) range_error("runs must be at least 1");
}

/// validate() plus the fields a single simulation needs.
inline void validate_for_run(const ScenarioConfig& c) {
    validate(c);
    if (!c.d) throw ConfigError(ConfigErrorKind::missing_value, "d is required");
    if (!c.policy) throw ConfigError(ConfigErrorKind::missing_value, "policy is required");
    if (*c.policy == Policy::pattern) {
        if (!c.metric) throw ConfigError(ConfigErrorKind::missing_value, "pattern policy requires metric");
        if (!c.knowledge) throw ConfigError(ConfigErrorKind::missing_value, "pattern policy requires knowledge");
    }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec == std::errc::result_out_of_range)
        throw ConfigError(ConfigErrorKind::out_of_range, std::string(key) + " = " + std::string(text));
    if (ec != std::errc() || ptr != end)
        throw ConfigError(ConfigErrorKind::malformed_line,
                          "bad value for " + std::string(key) + ": '" + std::string(text) + "'");
    return value;
}

}  // namespace detail

/// Applies one `key = value` setting.
inline void set_config_value(ScenarioConfig& c, std::string_view key, std::string_view value) {
    using detail::parse_number;
    if (value.empty())
        throw ConfigError(ConfigErrorKind::malformed_line, "empty value for " + std::string(key));
    if (key == "n_nodes") c.n_nodes = parse_number<std::uint32_t>(key, value);
    else if (key == "n_locations") c.n_locations = parse_number<std::uint32_t>(key, value);
    else if (key == "duration") c.duration = parse_number<double>(key, value);
    else if (key == "traffic_horizon") c.traffic_horizon = parse_number<double>(key, value);
    else if (key == "packet_interval") c.packet_interval = parse_number<double>(key, value);
    else if (key == "t_min") c.t_min = parse_number<double>(key, value);
    else if (key == "t_max") c.t_max = parse_number<double>(key, value);
    else if (key == "delta") c.delta = parse_number<double>(key, value);
    else if (key == "time_step") c.time_step = parse_number<double>(key, value);
    else if (key == "d") c.d = parse_number<double>(key, value);
    else if (key == "knowledge") c.knowledge = parse_number<std::uint32_t>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "runs") c.runs = parse_number<std::uint32_t>(key, value);
    else if (key == "policy") {
        c.policy = parse_policy(value);
        if (!c.policy) throw ConfigError(ConfigErrorKind::out_of_range, "unknown policy '" + std::string(value) + "'");
    } else if (key == "metric") {
        c.metric = parse_metric(value);
        if (!c.metric) throw ConfigError(ConfigErrorKind::out_of_range, "unknown metric '" + std::string(value) + "'");
    } else if (key == "truncation") {
        const auto scope = parse_truncation(value);
        if (!scope) throw ConfigError(ConfigErrorKind::out_of_range, "unknown truncation '" + std::string(value) + "'");
        c.truncation = *scope;
    } else {
        throw ConfigError(ConfigErrorKind::unknown_key, std::string(key));
    }
}

/// Parses config text; absent keys keep their defaults. Lines may carry a
/// trailing `# comment`. The result is range-checked with validate().
inline ScenarioConfig parse_config(std::string_view text, ScenarioConfig base = {}) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(ConfigErrorKind::malformed_line,
                              "line " + std::to_string(line_no) + ": expected key = value");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(ConfigErrorKind::malformed_line, "line " + std::to_string(line_no) + ": empty key");
        set_config_value(base, key, value);
    }
    validate(base);
    return base;
}

}  // namespace dtnspace
