#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace shotnoise::kernels {

namespace detail {
class TimeFunctionImpl;
}

// Closed registry of time profiles g(t) on [0, inf). A closed set of families
// keeps derivative and tail metadata trustworthy; arbitrary user expressions
// are out of scope.
class TimeFunction {
public:
    double eval(double t) const;

    bool has_derivative() const;
    // a.e. derivative; undefined exactly at breakpoints.
    double derivative(double t) const;

    // Integral tails over [T, inf); nullopt when infinite/unknown.
    std::optional<double> abs_tail(double T) const;  // int |g|
    std::optional<double> sq_tail(double T) const;   // int g^2

    // Kinks and jump locations.
    std::vector<double> breakpoints() const;

    // For families with |g| strictly decreasing: the t where |g(t)| = level,
    // if the level is crossed.
    std::optional<double> abs_level_crossing(double level) const;

    const std::string& id() const;

    static TimeFunction exponential(double scale, double beta); // scale*e^{-beta t}
    static TimeFunction power(double scale, double beta);       // scale*(1+t)^{-beta}
    static TimeFunction affine(double c0, double c1);
    static TimeFunction quadratic(double c0, double c1, double c2);
    static TimeFunction indicator(double scale, double t0);     // scale*1_{[0,t0]}
    // values[i] on [edges[i-1], edges[i]) with edges[-1] = 0; zero beyond.
    static TimeFunction piecewise_constant(std::vector<double> edges,
                                           std::vector<double> values);
    static TimeFunction zero() { return affine(0.0, 0.0); }

private:
    explicit TimeFunction(std::shared_ptr<const detail::TimeFunctionImpl> impl);
    std::shared_ptr<const detail::TimeFunctionImpl> impl_;
};

} // namespace shotnoise::kernels
