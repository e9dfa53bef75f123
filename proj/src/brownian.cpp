#include "stefanlab/brownian.hpp"

#include <cmath>
#include <random>
#include <string>

namespace stefanlab {

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 over master + golden-ratio stride per index
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

BrownianDriver sample_paths(std::uint64_t seed, int n_modes, double horizon, double dt_fine) {
    if (n_modes < 1) throw ConfigError("sample_paths: need at least one mode");
    if (!(horizon > 0.0) || !(dt_fine > 0.0))
        throw ConfigError("sample_paths: horizon and dt_fine must be positive");
    const double ratio = horizon / dt_fine;
    const int n = static_cast<int>(std::llround(ratio));
    if (n < 1 || std::abs(ratio - n) > 1e-9 * n)
        throw ConfigError("sample_paths: dt_fine must divide the horizon");

    BrownianDriver d;
    d.seed = seed;
    d.n_modes = n_modes;
    d.horizon = horizon;
    d.dt_fine = dt_fine;
    d.n_fine = n;
    d.path.resize(n_modes, n + 1);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(dt_fine));
    for (int k = 0; k < n_modes; ++k) {
        d.path(k, 0) = 0.0;
        for (int j = 1; j <= n; ++j) d.path(k, j) = d.path(k, j - 1) + gauss(rng);
    }
    return d;
}

int WZInterpolant::interval_of(double t) const {
    int i = static_cast<int>(std::floor(t / delta));
    if (i < 0) i = 0;
    if (i >= m) i = m - 1; // t = T belongs to the last interval
    return i;
}

double WZInterpolant::value(int k, double t) const {
    if (t >= horizon) return node_values(k, m);
    const int i = interval_of(t);
    return node_values(k, i) + (t - i * delta) * slopes(k, i);
}

WZInterpolant interpolate(const BrownianDriver& driver, int m) {
    if (m < 1) throw ConfigError("interpolate: m must be positive");
    if (driver.n_fine % m != 0)
        throw ConfigError("interpolate: m = " + std::to_string(m) +
                          " does not divide the fine grid (" + std::to_string(driver.n_fine) +
                          " intervals)");
    const int stride = driver.n_fine / m;
    WZInterpolant w;
    w.m = m;
    w.horizon = driver.horizon;
    w.delta = driver.horizon / m;
    w.node_values.resize(driver.n_modes, m + 1);
    w.slopes.resize(driver.n_modes, m);
    for (int k = 0; k < driver.n_modes; ++k) {
        for (int i = 0; i <= m; ++i) w.node_values(k, i) = driver.value(k, i * stride);
        for (int i = 0; i < m; ++i)
            w.slopes(k, i) = (w.node_values(k, i + 1) - w.node_values(k, i)) / w.delta;
    }
    return w;
}

} // namespace stefanlab
