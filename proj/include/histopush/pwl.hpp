#pragma once

#include <vector>

#include "histopush/histogram.hpp"

namespace histopush {

// Continuous piecewise-affine function on [0,1], stored as knot positions
// and the value at each knot (affine in between). Storing values rather
// than slopes makes continuity structural. knots[0] == 0, knots.back() == 1,
// strictly increasing; knots closer than 1e-12 are rejected.
struct PiecewiseAffine {
    std::vector<double> knots;
    std::vector<double> values;

    // Interior breakpoints as stored (possibly including collinear ones).
    int breakpoints() const { return static_cast<int>(knots.size()) - 2; }
};

PiecewiseAffine make_pwl(std::vector<double> knots, std::vector<double> values);

PiecewiseAffine identity_pwl();

double eval_pwl(const PiecewiseAffine& f, double x);

// Slope of segment i (between knots i and i+1).
double pwl_slope(const PiecewiseAffine& f, int segment);

// Drops interior knots whose slope change is below tol. The breakpoint
// count of the result is the m that feeds the spline size formulas.
PiecewiseAffine simplify(const PiecewiseAffine& f, double tol = 1e-12);

// Quantile function F_P^{-1} of a 1-D histogram: knots at the cumulative
// masses {0, F(1/n), ..., 1}, values {0, 1/n, ..., 1}. Strictly increasing
// because all weights are positive.
PiecewiseAffine inverse_cdf(const Histogram1D& p);

// Exact integral of |f-g| over [0,1] by merged-knot segmentation with
// sign-change splitting.
double l1_distance(const PiecewiseAffine& f, const PiecewiseAffine& g);

// Wasserstein distance between two 1-D histograms via the quantile
// coupling: the L1 distance of the inverse CDFs.
double wasserstein1d(const Histogram1D& p, const Histogram1D& q);

}  // namespace histopush
