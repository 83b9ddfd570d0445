#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace histopush {

// Piecewise-constant density on [0,1]: weights[k] is the density value on
// [k/n,(k+1)/n]. Weights are strictly positive and sum to n, so the density
// integrates to 1. Construct through make_histogram1d.
struct Histogram1D {
    int n = 0;
    std::vector<double> weights;

    double tile_mass(int k) const { return weights[static_cast<std::size_t>(k)] / n; }
};

// Piecewise-constant density on [0,1]^2, constant on each of the n^2 axis
// aligned square tiles. weights is row-major n x n: entry (k1,k2) is the
// density on [k1/n,(k1+1)/n] x [k2/n,(k2+1)/n]. Entries are strictly
// positive and sum to n^2.
struct Histogram2D {
    int n = 0;
    std::vector<double> weights;  // row-major n*n

    double at(int k1, int k2) const {
        return weights[static_cast<std::size_t>(k1) * n + static_cast<std::size_t>(k2)];
    }
    double tile_mass(int k1, int k2) const { return at(k1, k2) / (static_cast<double>(n) * n); }
};

// Validates and normalizes. Sums within 1e-6 of the target are rescaled to
// hit it exactly; anything further off is rejected (BadNormalization).
// Tolerances are relative to the target sum. Throws NonPositiveWeight and
// ShapeMismatch as appropriate.
Histogram1D make_histogram1d(int n, std::vector<double> weights);
Histogram2D make_histogram2d(int n, std::vector<double> weights);
Histogram2D make_histogram2d_rows(int n, const std::vector<std::vector<double>>& rows);

// Marginal along the first coordinate: weights[k] = (1/n) sum_j w[k][j].
Histogram1D marginal_first(const Histogram2D& h);

// Distribution of the second coordinate conditioned on the first lying in
// tile i: weights[k] = n*w[i][k] / sum_j w[i][j].
Histogram1D conditional_second(const Histogram2D& h, int i);

// count i.i.d. draws: tile by cumulative mass, then uniform inside it.
// Pure in (seed, count).
std::vector<std::array<double, 2>> sample(const Histogram2D& h, int count, std::uint64_t seed);

// Random test histogram: weights exp(spread*z) with z standard normal,
// normalized to sum n^2. spread = 0 gives the uniform histogram.
Histogram2D random_histogram(int n, std::uint64_t seed, double spread);

// Re-tile to a coarser grid; divisor must divide n. Coarse weights are the
// averages of the covered fine weights, so masses are preserved.
Histogram2D coarsen(const Histogram2D& h, int divisor);

}  // namespace histopush
