#include "histopush/histogram.hpp"

#include <cmath>
#include <string>

#include "histopush/errors.hpp"
#include "histopush/rng.hpp"

namespace histopush {

namespace {

long double sum_ld(const std::vector<double>& v) {
    long double s = 0.0L;
    for (double x : v) s += x;
    return s;
}

// Shared validation: strict positivity, then rescale to make the sum hit
// `target` exactly (within float round-off). Rejects sums further than
// 1e-6 (relative) from the target.
void validate_and_normalize(std::vector<double>& w, double target, const char* what) {
    for (double x : w) {
        if (!(x > 0.0)) {
            throw NonPositiveWeight(std::string(what) + ": weights must be strictly positive");
        }
    }
    const long double s = sum_ld(w);
    const long double err = std::fabs(static_cast<double>(s - target));
    if (err > 1e-6 * target) {
        throw BadNormalization(std::string(what) + ": weights sum to " +
                               std::to_string(static_cast<double>(s)) + ", expected " +
                               std::to_string(target));
    }
    const double scale = static_cast<double>(target / s);
    if (scale != 1.0) {
        for (double& x : w) x *= scale;
    }
}

}  // namespace

Histogram1D make_histogram1d(int n, std::vector<double> weights) {
    if (n < 1) throw ShapeMismatch("histogram1d: n must be >= 1");
    if (weights.size() != static_cast<std::size_t>(n)) {
        throw ShapeMismatch("histogram1d: expected " + std::to_string(n) + " weights, got " +
                            std::to_string(weights.size()));
    }
    validate_and_normalize(weights, static_cast<double>(n), "histogram1d");
    return Histogram1D{n, std::move(weights)};
}

Histogram2D make_histogram2d(int n, std::vector<double> weights) {
    if (n < 1) throw ShapeMismatch("histogram2d: n must be >= 1");
    if (weights.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
        throw ShapeMismatch("histogram2d: expected " + std::to_string(n) + "x" +
                            std::to_string(n) + " weights, got " + std::to_string(weights.size()));
    }
    validate_and_normalize(weights, static_cast<double>(n) * n, "histogram2d");
    return Histogram2D{n, std::move(weights)};
}

Histogram2D make_histogram2d_rows(int n, const std::vector<std::vector<double>>& rows) {
    if (rows.size() != static_cast<std::size_t>(n)) {
        throw ShapeMismatch("histogram2d: expected " + std::to_string(n) + " rows");
    }
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(n) * n);
    for (const auto& r : rows) {
        if (r.size() != static_cast<std::size_t>(n)) {
            throw ShapeMismatch("histogram2d: ragged row");
        }
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return make_histogram2d(n, std::move(flat));
}

Histogram1D marginal_first(const Histogram2D& h) {
    std::vector<double> w(static_cast<std::size_t>(h.n));
    for (int k = 0; k < h.n; ++k) {
        long double row = 0.0L;
        for (int j = 0; j < h.n; ++j) row += h.at(k, j);
        w[static_cast<std::size_t>(k)] = static_cast<double>(row / h.n);
    }
    return make_histogram1d(h.n, std::move(w));
}

Histogram1D conditional_second(const Histogram2D& h, int i) {
    if (i < 0 || i >= h.n) {
        throw IndexOutOfRange("conditional_second: tile index " + std::to_string(i) +
                              " outside [0," + std::to_string(h.n - 1) + "]");
    }
    long double row = 0.0L;
    for (int j = 0; j < h.n; ++j) row += h.at(i, j);
    std::vector<double> w(static_cast<std::size_t>(h.n));
    for (int k = 0; k < h.n; ++k) {
        w[static_cast<std::size_t>(k)] = static_cast<double>(h.n * h.at(i, k) / row);
    }
    return make_histogram1d(h.n, std::move(w));
}

std::vector<std::array<double, 2>> sample(const Histogram2D& h, int count, std::uint64_t seed) {
    // Cumulative tile masses, forced to end exactly at 1.
    const std::size_t tiles = static_cast<std::size_t>(h.n) * h.n;
    std::vector<double> cum(tiles);
    long double acc = 0.0L;
    const long double total = static_cast<long double>(h.n) * h.n;
    for (std::size_t k = 0; k < tiles; ++k) {
        acc += h.weights[k];
        cum[k] = static_cast<double>(acc / total);
    }
    cum.back() = 1.0;

    Rng rng(seed);
    std::vector<std::array<double, 2>> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int s = 0; s < count; ++s) {
        const double u = rng.next_double();
        std::size_t lo = 0, hi = tiles - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cum[mid] > u) hi = mid; else lo = mid + 1;
        }
        const int k1 = static_cast<int>(lo) / h.n;
        const int k2 = static_cast<int>(lo) % h.n;
        const double x = (k1 + rng.next_double()) / h.n;
        const double y = (k2 + rng.next_double()) / h.n;
        out.push_back({x, y});
    }
    return out;
}

Histogram2D random_histogram(int n, std::uint64_t seed, double spread) {
    if (n < 1) throw ShapeMismatch("random_histogram: n must be >= 1");
    if (spread < 0.0) throw DomainError("random_histogram: spread must be >= 0");
    const std::size_t tiles = static_cast<std::size_t>(n) * n;
    std::vector<double> w(tiles, 1.0);
    if (spread > 0.0) {
        Rng rng(seed);
        for (auto& x : w) x = std::exp(spread * rng.next_normal());
    }
    const long double s = sum_ld(w);
    const double scale = static_cast<double>(static_cast<long double>(n) * n / s);
    for (auto& x : w) x *= scale;
    return make_histogram2d(n, std::move(w));
}

Histogram2D coarsen(const Histogram2D& h, int divisor) {
    if (divisor < 1 || h.n % divisor != 0) {
        throw DomainError("coarsen: divisor must divide n");
    }
    const int m = h.n / divisor;
    std::vector<double> w(static_cast<std::size_t>(m) * m, 0.0);
    for (int k1 = 0; k1 < h.n; ++k1) {
        for (int k2 = 0; k2 < h.n; ++k2) {
            w[static_cast<std::size_t>(k1 / divisor) * m + k2 / divisor] += h.at(k1, k2);
        }
    }
    const double inv = 1.0 / (static_cast<double>(divisor) * divisor);
    for (auto& x : w) x *= inv;
    return make_histogram2d(m, std::move(w));
}

}  // namespace histopush
