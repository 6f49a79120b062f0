#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "switchbound/bound.hpp"
#include "switchbound/certificate.hpp"
#include "switchbound/symbolic.hpp"

namespace switchbound {

struct WorkflowParams {
    double epsilon2 = 0.015;
    std::size_t grid_cap = kDefaultGridCap;
    /// RK4 step; 0 selects tau / 1000.
    double dt = 0.0;
    std::uint64_t seed = 1;
    std::size_t trials = 100;
    std::size_t horizon = 100;
    /// Grid points per axis for certificate checks and nu estimation.
    std::size_t check_grid = 41;

    bool operator==(const WorkflowParams&) const = default;
};

/// Period-start state feedback on the delay-free system: `below` when x[axis] < level, else `above`.
struct ThresholdPolicy {
    std::size_t axis = 0;
    double level = 0.0;
    Mode below = 0;
    Mode above = 0;

    [[nodiscard]] Mode operator()(const Vec& x) const {
        return x[static_cast<Eigen::Index>(axis)] < level ? below : above;
    }
    bool operator==(const ThresholdPolicy&) const = default;
};

struct SystemConfig {
    std::string name;
    SwitchedSystem system;
    double tau = 0.0;
    double delta0 = 0.0;
    Box safe;
    LyapunovCertificate certificate;
    WorkflowParams workflow;
    std::optional<ThresholdPolicy> controller;

    [[nodiscard]] double step() const { return workflow.dt > 0 ? workflow.dt : tau / 1000.0; }
    /// Pinned nu from the certificate; throws ValidationError when absent.
    [[nodiscard]] double pinned_nu() const;
};

/// Throws ParseError on malformed JSON and ValidationError naming the offending
/// field (as a JSON pointer) otherwise. `base` resolves "certificate_file".
[[nodiscard]] SystemConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
[[nodiscard]] SystemConfig parse_config(const std::string& text, const std::filesystem::path& base = {});
[[nodiscard]] SystemConfig load_config(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json config_to_json(const SystemConfig& config);
void save_config(const std::filesystem::path& path, const SystemConfig& config);

[[nodiscard]] nlohmann::json certificate_to_json(const LyapunovCertificate& cert, const SwitchedSystem& sys);
[[nodiscard]] LyapunovCertificate certificate_from_json(const nlohmann::json& j, const SwitchedSystem& sys);

[[nodiscard]] nlohmann::json classk_to_json(const ClassK& f);
[[nodiscard]] ClassK classk_from_json(const nlohmann::json& j);

/// Delay bound of a configuration using its pinned nu.
[[nodiscard]] BoundResult config_bound(const SystemConfig& config,
                                       std::size_t per_switch_len = kDefaultPerSwitchLength);

/// JSON form of a bound: {"dwell_time_ok", "epsilon", "params", "per_switch"}.
[[nodiscard]] nlohmann::json bound_to_json(const BoundResult& b);

}  // namespace switchbound
