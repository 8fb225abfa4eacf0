#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shotnoise/kernels.hpp"
#include "shotnoise/sde.hpp"
#include "shotnoise/series.hpp"

namespace shotnoise::config {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parsed run configuration. Strict: unknown keys anywhere are errors, the
// schema_version key is mandatory, and every seed comes from the file (or the
// --seed override) -- never from the clock.
class RunConfig {
public:
    static RunConfig from_file(const std::string& path);
    static RunConfig from_json_text(const std::string& text);

    std::uint64_t seed() const { return seed_; }
    void override_seed(std::uint64_t s) { seed_ = s; }
    int threads() const { return threads_; }
    void override_threads(int t) { threads_ = t; }
    double rate() const { return rate_; }

    bool has_kernel() const { return doc_.contains("kernel"); }
    kernels::Kernel kernel() const;
    stochastic::JumpLaw sigma() const;
    series::Truncation truncation() const;

    // Per-command sections; each call validates the section's keys.
    const nlohmann::json& section(const std::string& name) const;
    bool has_section(const std::string& name) const { return doc_.contains(name); }

    const nlohmann::json& raw() const { return doc_; }

private:
    nlohmann::json doc_;
    std::uint64_t seed_ = 0;
    int threads_ = 1;
    double rate_ = 1.0;
};

// Builders shared by the CLI and tests. `extra_scale` multiplies the profile
// amplitude; the converge harness uses it to realize in-registry sequences.
kernels::TimeFunction build_time_function(const nlohmann::json& spec,
                                          double extra_scale = 1.0);
kernels::Kernel build_kernel(const nlohmann::json& spec, double extra_scale = 1.0);
stochastic::JumpLaw build_sigma(const nlohmann::json& spec);
sde::DriftSpec build_drift(const nlohmann::json& spec, double slope_scale = 1.0);

// "lo:hi:count" -> evenly spaced inclusive grid.
std::vector<double> parse_grid(const std::string& spec);

// Helpers with config-flavored errors.
double require_number(const nlohmann::json& j, const std::string& key);
std::int64_t require_integer(const nlohmann::json& j, const std::string& key);
std::string require_string(const nlohmann::json& j, const std::string& key);
void require_keys_subset(const nlohmann::json& obj,
                         const std::vector<std::string>& allowed,
                         const std::string& where);

} // namespace shotnoise::config
