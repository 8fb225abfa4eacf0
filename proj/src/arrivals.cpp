#include "shotnoise/arrivals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shotnoise::stochastic {

std::vector<double> sample_arrivals(const ArrivalProcess& proc, double horizon,
                                    RngStream& stream) {
    if (!(proc.rate > 0.0) || !std::isfinite(proc.rate))
        throw std::invalid_argument("arrival process: rate must be positive and finite");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("arrival process: horizon must be positive and finite");
    std::vector<double> times;
    double t = stream.exponential(proc.rate);
    while (t <= horizon) {
        times.push_back(t);
        t += stream.exponential(proc.rate);
    }
    return times;
}

std::vector<double> sample_conditional_order_stats(int i, double t,
                                                   RngStream& stream) {
    if (i < 1) throw std::invalid_argument("order statistics: need i >= 1");
    if (!(t > 0.0)) throw std::invalid_argument("order statistics: need t > 0");
    std::vector<double> u(static_cast<std::size_t>(i));
    for (auto& v : u) v = t * stream.u01();
    std::sort(u.begin(), u.end());
    return u;
}

} // namespace shotnoise::stochastic
