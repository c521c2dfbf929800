#pragma once

// Run configuration in a flat `key = value` text format.
//
//   # comment
//   lambda0 = 9
//   lambda_factors = 1.2, 1.5, 0.6, 0.75
//   demand_1 = 0.035, 0.03
//
// Keys are listed in kConfigKeys. Arrays are comma lists, booleans are
// true/false (or 1/0). Unspecified keys keep the reference defaults.

#include "slicesim/baselines.hpp"
#include "slicesim/sim_engine.hpp"
#include "slicesim/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace slicesim {

/// Bad configuration input. `field()` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct RunConfig {
    WorkloadFactors workload;
    std::vector<double> capacity{2.0, 2.0};
    std::vector<double> weights{1.0, 1.0, 1.0};
    double epsilon = 0.10;
    double varphi = 1.0;
    double penalty_ratio = 1.5;
    std::string policy = "psaccf";
    Slot horizon = 1000;
    std::uint64_t seed = 1;
    Slot steady_start = 501;
    bool timing = false;
    std::string out = "results";

    [[nodiscard]] std::size_t num_classes() const noexcept { return workload.num_classes(); }
    [[nodiscard]] std::size_t num_resources() const noexcept { return capacity.size(); }

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline constexpr std::string_view kConfigKeys[] = {
    "classes",         "resources",       "capacity",      "lambda0",  "lambda_factors", "lifetime0",
    "lifetime_factors", "holdtime0",      "holdtime_factors", "price0", "beta0",         "penalty_ratio",
    "elastic",         "weights",         "epsilon",       "varphi",   "policy",         "horizon",
    "seed",            "steady_start",    "timing",        "out",      "demand_<k>"};

// ---------------------------------------------------------------------------
// Number formatting shared with the CSV writers
// ---------------------------------------------------------------------------

/// Shortest text that parses back to exactly `v`.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string join(const std::vector<double>& values, std::string_view sep = ",") {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += sep;
        out += format_double(values[i]);
    }
    return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& field, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty())
        throw ConfigError(field, "expected a number, got '" + std::string(text) + "'");
    return v;
}

template <typename Int>
Int parse_integer(const std::string& field, std::string_view text) {
    text = trim(text);
    Int v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty())
        throw ConfigError(field, "expected an integer, got '" + std::string(text) + "'");
    return v;
}

inline bool parse_bool(const std::string& field, std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(field, "expected true/false, got '" + std::string(text) + "'");
}

inline std::vector<std::string_view> split(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        parts.push_back(trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return parts;
}

inline std::vector<double> parse_list(const std::string& field, std::string_view text) {
    std::vector<double> out;
    for (auto part : split(text)) out.push_back(parse_double(field, part));
    return out;
}

inline void require_length(const std::string& field, std::size_t got, std::size_t expected, const char* what) {
    if (got != expected)
        throw ConfigError(field, "has " + std::to_string(got) + " entries, expected " + what + "=" +
                                     std::to_string(expected));
}

}  // namespace detail

/// Range and shape checks; errors name the offending key.
inline void validate(const RunConfig& c) {
    using detail::require_length;
    const std::size_t K = c.num_classes();
    const std::size_t N = c.num_resources();
    if (K == 0) throw ConfigError("classes", "must be >= 1");
    if (N == 0) throw ConfigError("resources", "must be >= 1");
    const auto& w = c.workload;
    require_length("lambda_factors", w.arrival_factors.size(), K, "K");
    require_length("lifetime_factors", w.lifetime_factors.size(), K, "K");
    require_length("holdtime_factors", w.holdtime_factors.size(), K, "K");
    require_length("elastic", w.elastic.size(), K, "K");
    require_length("weights", c.weights.size(), K - 1, "K-1");
    for (double v : c.capacity)
        if (!(v > 0.0)) throw ConfigError("capacity", "entries must be > 0");
    for (std::size_t k = 0; k < K; ++k) {
        const std::string field = "demand_" + std::to_string(k + 1);
        require_length(field, w.demands[k].size(), N, "N");
        for (double v : w.demands[k])
            if (!(v >= 0.0)) throw ConfigError(field, "entries must be >= 0");
        if (!w.demands[k].any_positive()) throw ConfigError(field, "needs a positive entry");
        if (!(w.arrival_factors[k] >= 0.0)) throw ConfigError("lambda_factors", "entries must be >= 0");
        if (!(w.lifetime_factors[k] * w.base_lifetime >= 1.0))
            throw ConfigError("lifetime_factors", "mean lifetime of class " + std::to_string(k + 1) + " is below 1 slot");
        if (!(w.holdtime_factors[k] * w.base_holdtime >= 1.0))
            throw ConfigError("holdtime_factors", "mean hold time of class " + std::to_string(k + 1) + " is below 1 slot");
    }
    if (!(w.base_arrival_rate >= 0.0)) throw ConfigError("lambda0", "must be >= 0");
    if (!(w.base_price >= 0.0)) throw ConfigError("price0", "must be >= 0");
    if (!(w.base_balk >= 0.0 && w.base_balk <= 1.0)) throw ConfigError("beta0", "must be in [0,1]");
    for (double v : c.weights)
        if (!(v > 0.0)) throw ConfigError("weights", "entries must be > 0");
    if (!(c.epsilon > 0.0)) throw ConfigError("epsilon", "must be > 0");
    if (!(c.varphi >= 0.0 && c.varphi <= 1.0)) throw ConfigError("varphi", "must be in [0,1]");
    if (!(c.penalty_ratio >= 0.0)) throw ConfigError("penalty_ratio", "must be >= 0");
    if (!is_policy_name(c.policy)) throw ConfigError("policy", "unknown policy '" + c.policy + "'");
    if (c.horizon < 0) throw ConfigError("horizon", "must be >= 0");
    if (c.steady_start < 1) throw ConfigError("steady_start", "must be >= 1");
}

/// Parses config text on top of the defaults. Lists sized for K classes must
/// be supplied whenever `classes` differs from the default 4.
inline RunConfig parse_config_text(std::string_view text) {
    using namespace detail;
    std::map<std::string, std::string, std::less<>> entries;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
        if (entries.count(key)) throw ConfigError(key, "given more than once");
        entries.emplace(std::move(key), std::string(trim(line.substr(eq + 1))));
    }

    RunConfig c;
    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        std::string v = std::move(it->second);
        entries.erase(it);
        return v;
    };

    const std::size_t K = [&] {
        auto v = take("classes");
        return v ? parse_integer<std::size_t>("classes", *v) : c.num_classes();
    }();
    if (K == 0) throw ConfigError("classes", "must be >= 1");
    std::optional<std::size_t> N_override;
    if (auto v = take("resources")) N_override = parse_integer<std::size_t>("resources", *v);

    if (auto v = take("capacity")) c.capacity = parse_list("capacity", *v);
    const std::size_t N = N_override.value_or(c.capacity.size());
    detail::require_length("capacity", c.capacity.size(), N, "N");

    auto& w = c.workload;
    if (auto v = take("lambda0")) w.base_arrival_rate = parse_double("lambda0", *v);
    if (auto v = take("lambda_factors")) w.arrival_factors = parse_list("lambda_factors", *v);
    if (auto v = take("lifetime0")) w.base_lifetime = parse_double("lifetime0", *v);
    if (auto v = take("lifetime_factors")) w.lifetime_factors = parse_list("lifetime_factors", *v);
    if (auto v = take("holdtime0")) w.base_holdtime = parse_double("holdtime0", *v);
    if (auto v = take("holdtime_factors")) w.holdtime_factors = parse_list("holdtime_factors", *v);
    if (auto v = take("price0")) w.base_price = parse_double("price0", *v);
    if (auto v = take("beta0")) w.base_balk = parse_double("beta0", *v);
    if (auto v = take("elastic")) {
        w.elastic.clear();
        for (auto part : split(*v)) w.elastic.push_back(parse_bool("elastic", part));
    }

    std::vector<ResourceVector> demands(K);
    for (std::size_t k = 0; k < K; ++k) {
        const std::string key = "demand_" + std::to_string(k + 1);
        if (auto v = take(key)) {
            demands[k] = ResourceVector(parse_list(key, *v));
        } else if (k < w.demands.size()) {
            demands[k] = w.demands[k];
        } else {
            throw ConfigError(key, "missing (required when classes > " + std::to_string(w.demands.size()) + ")");
        }
    }
    w.demands = std::move(demands);

    if (auto v = take("weights")) {
        c.weights = parse_list("weights", *v);
    } else if (K != RunConfig{}.num_classes()) {
        c.weights.assign(K - 1, 1.0);
    }
    if (auto v = take("epsilon")) c.epsilon = parse_double("epsilon", *v);
    if (auto v = take("varphi")) c.varphi = parse_double("varphi", *v);
    if (auto v = take("penalty_ratio")) c.penalty_ratio = parse_double("penalty_ratio", *v);
    if (auto v = take("policy")) c.policy = *v;
    if (auto v = take("horizon")) c.horizon = parse_integer<Slot>("horizon", *v);
    if (auto v = take("seed")) c.seed = parse_integer<std::uint64_t>("seed", *v);
    if (auto v = take("steady_start")) c.steady_start = parse_integer<Slot>("steady_start", *v);
    if (auto v = take("timing")) c.timing = parse_bool("timing", *v);
    if (auto v = take("out")) c.out = *v;

    if (!entries.empty()) throw ConfigError(entries.begin()->first, "unknown field");
    validate(c);
    return c;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Fully resolved config text; parse_config_text(to_config_text(c)) == c.
inline std::string to_config_text(const RunConfig& c) {
    const auto& w = c.workload;
    std::ostringstream os;
    os << "classes = " << c.num_classes() << '\n';
    os << "resources = " << c.num_resources() << '\n';
    os << "capacity = " << join(c.capacity) << '\n';
    os << "lambda0 = " << format_double(w.base_arrival_rate) << '\n';
    os << "lambda_factors = " << join(w.arrival_factors) << '\n';
    os << "lifetime0 = " << format_double(w.base_lifetime) << '\n';
    os << "lifetime_factors = " << join(w.lifetime_factors) << '\n';
    os << "holdtime0 = " << format_double(w.base_holdtime) << '\n';
    os << "holdtime_factors = " << join(w.holdtime_factors) << '\n';
    os << "price0 = " << format_double(w.base_price) << '\n';
    os << "beta0 = " << format_double(w.base_balk) << '\n';
    os << "penalty_ratio = " << format_double(c.penalty_ratio) << '\n';
    os << "elastic = ";
    for (std::size_t k = 0; k < w.elastic.size(); ++k) os << (k ? "," : "") << (w.elastic[k] ? "true" : "false");
    os << '\n';
    for (std::size_t k = 0; k < w.demands.size(); ++k) {
        os << "demand_" << k + 1 << " = " << join(std::vector<double>(w.demands[k].begin(), w.demands[k].end()))
           << '\n';
    }
    os << "weights = " << join(c.weights) << '\n';
    os << "epsilon = " << format_double(c.epsilon) << '\n';
    os << "varphi = " << format_double(c.varphi) << '\n';
    os << "policy = " << c.policy << '\n';
    os << "horizon = " << c.horizon << '\n';
    os << "seed = " << c.seed << '\n';
    os << "steady_start = " << c.steady_start << '\n';
    os << "timing = " << (c.timing ? "true" : "false") << '\n';
    os << "out = " << c.out << '\n';
    return os.str();
}

inline SimulationConfig to_simulation_config(const RunConfig& c) {
    validate(c);
    SimulationConfig s;
    s.workload = make_workload(c.workload, c.seed);
    s.fairness = FairnessConfig{c.weights, c.epsilon, c.varphi};
    s.capacity = ResourceVector(c.capacity);
    s.policy = c.policy;
    s.horizon = c.horizon;
    s.penalty_ratio = c.penalty_ratio;
    s.record_timing = c.timing;
    return s;
}

}  // namespace slicesim
