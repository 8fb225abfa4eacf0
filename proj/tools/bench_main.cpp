// Micro-benchmark: serial reference loops vs the OpenMP batch kernels, with a
// bit-identity check on every pair. Run as: shotnoise_bench [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "shotnoise/laws.hpp"
#include "shotnoise/regularity.hpp"
#include "shotnoise/sde.hpp"
#include "shotnoise/series.hpp"
#include "shotnoise/spectral.hpp"

using namespace shotnoise;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0).count();
}

void report(const std::string& name, std::size_t n, double serial_ms,
            double parallel_ms, bool identical) {
    std::printf("%-28s n=%-9zu serial %8.1f ms   parallel %8.1f ms   x%.2f   %s\n",
                name.c_str(), n, serial_ms, parallel_ms,
                parallel_ms > 0.0 ? serial_ms / parallel_ms : 0.0,
                identical ? "bit-identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : 4;
    const std::uint64_t seed = 0xB16B00B5ull;
    std::printf("batch kernels, %d threads vs serial reference\n\n", threads);

    const auto kernel = kernels::Kernel::product_exp(1.0);
    const auto sigma = stochastic::JumpLaw::exponential(1.0);

    {
        const std::size_t n = 400000;
        auto t0 = std::chrono::steady_clock::now();
        const auto a = series::reference::sample_truncated_batch(kernel, 1.0, sigma, 1.0, n, seed);
        const double ts = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        const auto b = series::sample_truncated_batch(kernel, 1.0, sigma, 1.0, n, seed, threads);
        const double tp = ms_since(t0);
        bool same = true;
        for (std::size_t i = 0; i < n; ++i)
            same &= a[i].value == b[i].value && a[i].count == b[i].count;
        report("series truncated draws", n, ts, tp, same);
    }
    {
        const auto validated = series::validate(
            series::SeriesConfig{kernel, sigma, 1.0, {{}, 1e-6}, series::CenteringMode::none});
        const std::size_t n = 200000;
        auto t0 = std::chrono::steady_clock::now();
        const auto a = series::reference::sample_full_batch(validated, n, seed);
        const double ts = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        const auto b = series::sample_full_batch(validated, n, seed, threads);
        const double tp = ms_since(t0);
        report("series full draws", n, ts, tp, a == b);
    }
    {
        const auto drift = sde::DriftSpec::affine(0.0, -1.0);
        const sde::SdeOptions opts;
        const std::size_t n = 30000;
        auto t0 = std::chrono::steady_clock::now();
        const auto a = sde::reference::terminal_batch(drift, 1.0, 1.0, sigma, 1.0, opts, n, seed);
        const double ts = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        const auto b = sde::terminal_batch(drift, 1.0, 1.0, sigma, 1.0, opts, n, seed, threads);
        const double tp = ms_since(t0);
        report("sde terminal values", n, ts, tp, a == b);
    }
    {
        const auto draws = series::sample_truncated_batch(kernel, 1.0, sigma, 1.0,
                                                          100000, seed, threads);
        std::vector<double> values(draws.size());
        for (std::size_t i = 0; i < draws.size(); ++i) values[i] = draws[i].value;
        const auto grid = spectral::linspace(-40.0, 40.0, 161);
        auto t0 = std::chrono::steady_clock::now();
        const auto a = spectral::empirical_charfn(values, grid, 1);
        const double ts = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        const auto b = spectral::empirical_charfn(values, grid, threads);
        const double tp = ms_since(t0);
        report("empirical charfn", values.size(), ts, tp, a.phi == b.phi);
    }
    {
        const auto kw = kernels::Kernel::time_window(kernel, 1.0);
        const auto cf = spectral::charfn(kw, sigma, 1.0, spectral::linspace(0.0, 200.0, 20001), {});
        const auto x = spectral::linspace(0.05, 10.0, 1001);
        spectral::InvertOptions o1;
        o1.atom_mass = std::exp(-1.0);
        o1.threads = 1;
        auto t0 = std::chrono::steady_clock::now();
        const auto a = spectral::invert_density(cf, x, o1);
        const double ts = ms_since(t0);
        o1.threads = threads;
        t0 = std::chrono::steady_clock::now();
        const auto b = spectral::invert_density(cf, x, o1);
        const double tp = ms_since(t0);
        report("density inversion", x.size(), ts, tp, a.density == b.density);
    }
    return 0;
}
