#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "shotnoise/errors.hpp"
#include "shotnoise/kernels.hpp"

namespace shotnoise::series {

using shotnoise::RefusedError;

struct Truncation {
    std::optional<double> t_max;  // resolved automatically when absent
    double epsilon = 1e-6;        // admissible integral tail beyond t_max
};

enum class CenteringMode {
    none,
    // Adds the mean of the dropped small-term tail back to every draw. An
    // approximation for kernels outside L1; the residual second moment is
    // reported in the validation. Off by default.
    tail_compensated,
};

struct SeriesConfig {
    kernels::Kernel kernel;
    stochastic::JumpLaw sigma;
    double rate = 1.0;
    Truncation truncation;
    CenteringMode centering = CenteringMode::none;
};

// Existence checks and truncation resolution, done once per configuration.
// Refuses (throws RefusedError) when the existence integral diverges.
struct ValidatedSeries {
    SeriesConfig cfg;
    double t_max = 0.0;
    double tail_error = 0.0;      // integral tail beyond t_max
    double compensation = 0.0;    // added per draw in tail_compensated mode
    kernels::ConditionReport existence;
};

ValidatedSeries validate(const SeriesConfig& cfg,
                         const kernels::IntegrationOptions& opts = {});

// One draw of the horizon-truncated series sum over arrivals in (0, t_max].
double sample_full(const ValidatedSeries& v, stochastic::RngStream& stream);

struct TruncatedDraw {
    double value = 0.0; // exactly 0.0 for an empty sum
    int count = 0;
};

// One draw of the series truncated at time t, plus the arrival count.
TruncatedDraw sample_truncated(const kernels::Kernel& f, double t,
                               const stochastic::JumpLaw& sigma, double rate,
                               stochastic::RngStream& stream);

// First p terms conditioned on the (p+1)-th arrival happening at t_next:
// the p arrival times are uniform order statistics on [0, t_next].
double sample_conditional_first_p(const SeriesConfig& cfg, int p, double t_next,
                                  stochastic::RngStream& stream);

// Batch kernels. Replicate i draws from stream (seed, i), so results are
// identical for any thread count; reference:: holds the serial twins used by
// the determinism tests and the benchmark.
std::vector<double> sample_full_batch(const ValidatedSeries& v, std::size_t n,
                                      std::uint64_t seed, int threads);
std::vector<TruncatedDraw> sample_truncated_batch(const kernels::Kernel& f, double t,
                                                  const stochastic::JumpLaw& sigma,
                                                  double rate, std::size_t n,
                                                  std::uint64_t seed, int threads);
std::vector<double> sample_conditional_batch(const SeriesConfig& cfg, int p,
                                             double t_next, std::size_t n,
                                             std::uint64_t seed, int threads);

namespace reference {
std::vector<double> sample_full_batch(const ValidatedSeries& v, std::size_t n,
                                      std::uint64_t seed);
std::vector<TruncatedDraw> sample_truncated_batch(const kernels::Kernel& f, double t,
                                                  const stochastic::JumpLaw& sigma,
                                                  double rate, std::size_t n,
                                                  std::uint64_t seed);
} // namespace reference

// CSV writers: header row, '.' decimal, LF endings.
void write_values_csv(std::ostream& out, const std::vector<double>& values);
void write_truncated_csv(std::ostream& out, const std::vector<TruncatedDraw>& draws);
void write_conditional_csv(std::ostream& out, const std::vector<double>& values,
                           double t_next);

} // namespace shotnoise::series
