#include "histopush/transport.hpp"

#include <algorithm>
#include <cmath>

#include "histopush/errors.hpp"

namespace histopush {

double mean_cell_center_distance() {
    return (std::sqrt(2.0) + std::log(1.0 + std::sqrt(2.0))) / 6.0;
}

DiscreteMeasure discretize_histogram(const Histogram2D& p, int r) {
    if (r < 1) throw DomainError("discretize_histogram: r must be >= 1");
    const long long side = static_cast<long long>(p.n) * r;
    if (side * side > 4000000) throw TooLarge("discretize_histogram: too many atoms");
    DiscreteMeasure out;
    out.points.reserve(static_cast<std::size_t>(side * side));
    out.masses.reserve(static_cast<std::size_t>(side * side));
    const double cell = 1.0 / static_cast<double>(side);
    const double tile_area = 1.0 / (static_cast<double>(p.n) * p.n);
    for (long long i = 0; i < side; ++i) {
        const int k1 = static_cast<int>(i / r);
        for (long long j = 0; j < side; ++j) {
            const int k2 = static_cast<int>(j / r);
            out.points.push_back({(i + 0.5) * cell, (j + 0.5) * cell});
            out.masses.push_back(p.at(k1, k2) * tile_area / (static_cast<double>(r) * r));
        }
    }
    return out;
}

DiscreteMeasure discretize_pushforward(const ReluNet& net, int m) {
    if (m < 1) throw DomainError("discretize_pushforward: m must be >= 1");
    if (net.in_dim() != 1 || net.out_dim() != 2) {
        throw DimensionMismatch("discretize_pushforward: net must map R -> R^2");
    }
    DiscreteMeasure out;
    out.points.reserve(static_cast<std::size_t>(m));
    out.masses.assign(static_cast<std::size_t>(m), 1.0 / m);
    for (int j = 1; j <= m; ++j) {
        const auto y = eval_net(net, (j - 0.5) / m);
        out.points.push_back({y[0], y[1]});
    }
    return out;
}

namespace {

// Cumulative arclength of the image curve as a piecewise-affine function
// of the input, with its exact running integral for window averages.
struct ArcProfile {
    std::vector<double> x;      // piece boundaries, x.front()=a, x.back()=b
    std::vector<double> arc;    // cumulative arclength at each boundary
    std::vector<double> iarc;   // integral of the arclength function

    double arc_at(double u) const {
        const auto it = std::upper_bound(x.begin(), x.end(), u);
        std::size_t s = static_cast<std::size_t>(it - x.begin());
        if (s == 0) s = 1;
        if (s == x.size()) s = x.size() - 1;
        const double t = u - x[s - 1];
        const double slope = (arc[s] - arc[s - 1]) / (x[s] - x[s - 1]);
        return arc[s - 1] + slope * t;
    }

    double iarc_at(double u) const {
        const auto it = std::upper_bound(x.begin(), x.end(), u);
        std::size_t s = static_cast<std::size_t>(it - x.begin());
        if (s == 0) s = 1;
        if (s == x.size()) s = x.size() - 1;
        const double t = u - x[s - 1];
        const double slope = (arc[s] - arc[s - 1]) / (x[s] - x[s - 1]);
        return iarc[s - 1] + arc[s - 1] * t + 0.5 * slope * t * t;
    }
};

ArcProfile arc_profile(const PieceDecomposition& d) {
    if (d.out_dim() != 2) throw DimensionMismatch("arc profile: two outputs required");
    ArcProfile prof;
    prof.x.push_back(d.a);
    prof.arc.push_back(0.0);
    prof.iarc.push_back(0.0);
    for (int p = 0; p < d.piece_count(); ++p) {
        const double l = d.piece_left(p), r = d.piece_right(p);
        const double s = std::hypot(d.coeffs[0][static_cast<std::size_t>(p)].first,
                                    d.coeffs[1][static_cast<std::size_t>(p)].first);
        const double a0 = prof.arc.back();
        prof.x.push_back(r);
        prof.arc.push_back(a0 + s * (r - l));
        prof.iarc.push_back(prof.iarc.back() + a0 * (r - l) + 0.5 * s * (r - l) * (r - l));
    }
    return prof;
}

}  // namespace

double curve_quadrature_slack(const PieceDecomposition& pieces, int m) {
    // Each window of mass 1/m moves to the image of its center; the move
    // is at most the arclength between the point and the center, and the
    // integral of that over the window has closed form in the cumulative
    // arclength A:  int |A(u) - A(c)| du  with A monotone.
    const ArcProfile prof = arc_profile(pieces);
    double total = 0.0;
    for (int j = 1; j <= m; ++j) {
        const double l = (j - 1.0) / m;
        const double r = static_cast<double>(j) / m;
        const double c = (j - 0.5) / m;
        const double ac = prof.arc_at(c);
        const double left = ac * (c - l) - (prof.iarc_at(c) - prof.iarc_at(l));
        const double right = (prof.iarc_at(r) - prof.iarc_at(c)) - ac * (r - c);
        total += left + right;
    }
    return total;
}

WEstimate estimate_w(const Histogram2D& p, const ReluNet& net, int r, int m,
                     const PieceDecomposition* pieces, double gap_target) {
    PieceDecomposition local;
    if (!pieces) {
        local = extract_pieces(net, 0.0, 1.0);
        pieces = &local;
    }
    const DiscreteMeasure mu = discretize_histogram(p, r);
    const DiscreteMeasure nu = discretize_pushforward(net, m);

    WEstimate est;
    est.r = r;
    est.m = m;
    est.slack = mean_cell_center_distance() / (static_cast<double>(p.n) * r) +
                curve_quadrature_slack(*pieces, m);
    if (mu.size() <= 5000 && nu.size() <= 5000) {
        est.estimate = exact_ot(mu, nu).cost;
        est.method = "exact";
    } else {
        const OtBracket bracket = sinkhorn_certified(mu, nu, gap_target);
        est.estimate = 0.5 * (bracket.lower + bracket.upper);
        est.slack += 0.5 * (bracket.upper - bracket.lower);
        est.method = "sinkhorn";
    }
    return est;
}

}  // namespace histopush
