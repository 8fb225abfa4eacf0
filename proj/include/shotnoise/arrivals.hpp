#pragma once

#include <vector>

#include "shotnoise/rng.hpp"

namespace shotnoise::stochastic {

// Homogeneous arrival process. `rate` is always an intensity: expected
// arrivals per unit time, inter-arrival times exponential with mean 1/rate.
struct ArrivalProcess {
    double rate = 1.0;
};

// Cumulative sums of exponential inter-arrivals, truncated at the horizon.
// Strictly increasing; may be empty.
std::vector<double> sample_arrivals(const ArrivalProcess& proc, double horizon,
                                    RngStream& stream);

// Joint draw of i uniform order statistics on [0, t], sorted ascending.
// Direct construction (sort i uniforms), not rejection from the arrival
// process; the rejection route lives in tests as the independent oracle.
std::vector<double> sample_conditional_order_stats(int i, double t,
                                                   RngStream& stream);

} // namespace shotnoise::stochastic
