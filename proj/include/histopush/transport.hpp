#pragma once

#include <array>
#include <string>
#include <vector>

#include "histopush/histogram.hpp"
#include "histopush/pieces.hpp"
#include "histopush/relunet.hpp"

namespace histopush {

// Finitely supported measure on the plane; masses sum to 1.
struct DiscreteMeasure {
    std::vector<std::array<double, 2>> points;
    std::vector<double> masses;

    int size() const { return static_cast<int>(points.size()); }
};

DiscreteMeasure make_discrete_measure(std::vector<std::array<double, 2>> points,
                                      std::vector<double> masses);

struct PlanEntry {
    int i;
    int j;
    double mass;
};

// Sparse coupling between two discrete measures with its transport cost
// under the Euclidean ground metric.
struct TransportPlan {
    std::vector<PlanEntry> entries;
    double cost = 0.0;
};

// (n*r)^2 atoms at the cell centers of the r-refined tile grid, each
// carrying its cell's mass. Moving mass to centers perturbs the distance
// to any other measure by at most the mean cell-center distance
// 0.3826/(n*r) (and certainly by at most the half diagonal sqrt(2)/(2nr)).
DiscreteMeasure discretize_histogram(const Histogram2D& p, int r);

// m atoms phi((j-1/2)/m) of mass 1/m each, j = 1..m.
DiscreteMeasure discretize_pushforward(const ReluNet& net, int m);

// Exact optimal transport on supports of at most 5000 atoms each, by a
// transportation network simplex. Optimality is certified against the dual
// potentials (reduced costs >= -1e-7, complementary slackness) and the
// plan marginals against the inputs (1e-7).
TransportPlan exact_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Entropic-regularized transport cost <pi, C> after log-domain Sinkhorn
// iterations. Reports the worst marginal violation of the returned plan;
// throws NotConverged if it exceeds 1e-5 after max_iter iterations.
double sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double reg, int max_iter,
                double* violation_out = nullptr);

// Certified bracket [lower, upper] around the exact discrete OT cost from
// a rounded-feasible Sinkhorn plan (upper) and c-transformed dual
// potentials (lower), tightening reg until the gap target is met.
struct OtBracket {
    double lower = 0.0;
    double upper = 0.0;
};
OtBracket sinkhorn_certified(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             double gap_target);

struct WEstimate {
    double estimate = 0.0;
    double slack = 0.0;
    int r = 0;
    int m = 0;
    std::string method;  // "exact" or "sinkhorn"

    double lower() const { return estimate - slack; }
    double upper() const { return estimate + slack; }
};

// Bracketed Wasserstein estimate between a histogram and a pushforward:
// exact (or certified-sinkhorn, beyond the exact cap) OT between the two
// discretizations, with the discretization error added to the slack. The
// true distance lies within [estimate - slack, estimate + slack]. The
// curve term integrates arclength deviations exactly from the piece
// decomposition (recomputed when not supplied).
WEstimate estimate_w(const Histogram2D& p, const ReluNet& net, int r, int m,
                     const PieceDecomposition* pieces = nullptr, double gap_target = 1e-3);

// Mean distance to the center of a unit square; the per-cell coupling
// constant behind the histogram discretization slack.
double mean_cell_center_distance();

// Curve-quadrature slack: sum over atom windows of the exact integral of
// the arclength distance to the window-center atom.
double curve_quadrature_slack(const PieceDecomposition& pieces, int m);

}  // namespace histopush
