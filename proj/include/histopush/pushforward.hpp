#pragma once

#include <optional>
#include <string>

#include "histopush/histogram.hpp"
#include "histopush/relunet.hpp"

namespace histopush {

struct BuildReport {
    int n = 0;
    double epsilon = 0.0;
    int s = 0;
    long long size = 0;
    long long depth = 0;
    int width = 0;          // spline width W (deep variant; 0 for baseline)
    double guarantee = 0.0;  // certified accuracy 2*sqrt(2)/(n*2^s)
    std::string variant;     // "deep" or "baseline"
};

struct BuildResult {
    ReluNet net;
    BuildReport report;
};

// Sawtooth depth making the certified accuracy meet epsilon:
// max{1, ceil(log2(2*sqrt(2)/(n*epsilon)))}.
int choose_s(int n, double epsilon);

double guarantee_value(int n, int s);

// Spline width used by the deep builder: max{8, ceil(sqrt(n))}.
int default_width(int n);

// Generator with scalar input and two outputs:
//   phi(x) = (phi_marg(x), sum_i phi_i(g_s(n*phi_marg(x) - i)))
// with every 1-D transform realized by a width-W deep spline, branch i
// assembled by composition and the branches combined by the running-sum
// chain; the first coordinate is attached in parallel.
BuildResult build_phi(const Histogram2D& p, double epsilon, std::optional<int> width = std::nullopt);

// Same function realized the wide way: depth-2 splines, the marginal
// computed once and fanned out, branches side by side, one final affine
// layer doing the sum. Size Theta(n^2) + s*Theta(n), depth s + 4.
BuildResult build_phi_baseline(const Histogram2D& p, double epsilon);

// Size/depth the builders will produce, from the combinator arithmetic
// alone. The (n, epsilon, width) form assumes fully generic weights
// (every spline keeps n-1 breakpoints); the histogram overloads use the
// actual simplified breakpoint counts.
SizeDepth predicted_accounting(int n, double epsilon, int width);
SizeDepth predicted_accounting(const Histogram2D& p, double epsilon, std::optional<int> width = std::nullopt);
SizeDepth predicted_accounting_baseline(const Histogram2D& p, double epsilon);
SizeDepth predicted_accounting_baseline(int n, double epsilon);

}  // namespace histopush
