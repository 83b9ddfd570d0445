#pragma once

#include <vector>

namespace histopush {

// Dimension constant d/(d-1) * (2 Gamma((d+1)/2) Gamma(3/2) / (pi^(d/2) sqrt(d)))^(1/(d-1)),
// evaluated with the exact half-integer Gamma recursion. C(2) = 1/sqrt(2).
double c_constant(int d);

// Piece-count cap (e(N/L+1))^L for a net of size N and depth L. Overflows
// to +inf for deep nets; use log_zeta_cap for comparisons there.
double zeta_cap(long long n_size, long long l_depth);
double log_zeta_cap(long long n_size, long long l_depth);

// Minimum size a depth-L net needs to approximate n-tiled targets on
// [0,1]^d to accuracy epsilon: max{L, L[(1/e)(C(d)/(n eps))^((d-1)/L) - 1]}.
// Returned as a real; consumers ceil it.
double lower_bound_size(int n, double epsilon, int l_depth, int d);

// Distance floor C(d) zeta^(-1/(d-1)) / n for any measure supported on
// zeta lines against an n-tiled histogram.
double w_floor(int n, double zeta, int d);

struct BoundsReport {
    int n = 0;
    double epsilon = 0.0;
    int l_depth = 0;
    int d = 0;
    long long upper_size = 0;   // deep-builder accounting at this (n, epsilon)
    long long upper_depth = 0;
    double lower_size = 0.0;
    double zeta_cap_value = 0.0;
    double log_zeta_cap_value = 0.0;
    double w_floor_value = 0.0;  // at zeta = cap
    double c_d = 0.0;
};

// Evaluates every bound at one parameter point; upper_size/depth use the
// deep builder's predicted accounting with its default width.
BoundsReport make_bounds_report(int n, double epsilon, int l_depth, int d);

struct RegimeRow {
    int n = 0;
    double epsilon = 0.0;
    long long deep_size = 0;
    long long deep_depth = 0;
    long long base_size = 0;
    long long base_depth = 0;
    double lb_at_deep_depth = 0.0;
    double lb_at_base_depth = 0.0;
    double guarantee = 0.0;
};

// One row per (n, epsilon) case: both builders' predicted accounting, the
// size lower bound evaluated at each builder's depth and achieved
// accuracy, and the certified accuracy itself.
std::vector<RegimeRow> regime_table(const std::vector<std::pair<int, double>>& cases);

}  // namespace histopush
