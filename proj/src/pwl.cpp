#include "histopush/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "histopush/errors.hpp"

namespace histopush {

PiecewiseAffine make_pwl(std::vector<double> knots, std::vector<double> values) {
    if (knots.size() != values.size() || knots.size() < 2) {
        throw ShapeMismatch("pwl: knots/values must have equal length >= 2");
    }
    if (knots.front() != 0.0 || knots.back() != 1.0) {
        throw DomainError("pwl: knots must start at 0 and end at 1");
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (knots[i] - knots[i - 1] < 1e-12) {
            throw DomainError("pwl: degenerate or non-increasing knots at index " +
                              std::to_string(i));
        }
    }
    return PiecewiseAffine{std::move(knots), std::move(values)};
}

PiecewiseAffine identity_pwl() { return PiecewiseAffine{{0.0, 1.0}, {0.0, 1.0}}; }

double eval_pwl(const PiecewiseAffine& f, double x) {
    if (x < 0.0 || x > 1.0) {
        throw DomainError("eval_pwl: x outside [0,1]");
    }
    // Segment whose left knot is the last knot <= x; the stored value wins
    // at knots, so evaluation there is exact.
    const auto it = std::upper_bound(f.knots.begin(), f.knots.end(), x);
    std::size_t i = static_cast<std::size_t>(it - f.knots.begin());
    if (i == 0) i = 1;
    if (i == f.knots.size()) i = f.knots.size() - 1;
    const std::size_t l = i - 1;
    if (x == f.knots[l]) return f.values[l];
    const double t = (x - f.knots[l]) / (f.knots[i] - f.knots[l]);
    return f.values[l] + t * (f.values[i] - f.values[l]);
}

double pwl_slope(const PiecewiseAffine& f, int segment) {
    const std::size_t s = static_cast<std::size_t>(segment);
    return (f.values[s + 1] - f.values[s]) / (f.knots[s + 1] - f.knots[s]);
}

PiecewiseAffine simplify(const PiecewiseAffine& f, double tol) {
    std::vector<double> k{f.knots.front()};
    std::vector<double> v{f.values.front()};
    const std::size_t last = f.knots.size() - 1;
    for (std::size_t i = 1; i < last; ++i) {
        const double sl = (f.values[i] - v.back()) / (f.knots[i] - k.back());
        const double sr = (f.values[i + 1] - f.values[i]) / (f.knots[i + 1] - f.knots[i]);
        if (std::fabs(sr - sl) >= tol) {
            k.push_back(f.knots[i]);
            v.push_back(f.values[i]);
        }
    }
    k.push_back(f.knots[last]);
    v.push_back(f.values[last]);
    return PiecewiseAffine{std::move(k), std::move(v)};
}

PiecewiseAffine inverse_cdf(const Histogram1D& p) {
    std::vector<double> knots(static_cast<std::size_t>(p.n) + 1);
    std::vector<double> values(static_cast<std::size_t>(p.n) + 1);
    long double acc = 0.0L;
    knots[0] = 0.0;
    values[0] = 0.0;
    for (int k = 0; k < p.n; ++k) {
        acc += p.weights[static_cast<std::size_t>(k)];
        knots[static_cast<std::size_t>(k) + 1] = static_cast<double>(acc / p.n);
        values[static_cast<std::size_t>(k) + 1] = static_cast<double>(k + 1) / p.n;
    }
    knots.back() = 1.0;
    values.back() = 1.0;
    return make_pwl(std::move(knots), std::move(values));
}

double l1_distance(const PiecewiseAffine& f, const PiecewiseAffine& g) {
    std::vector<double> grid;
    grid.reserve(f.knots.size() + g.knots.size());
    std::merge(f.knots.begin(), f.knots.end(), g.knots.begin(), g.knots.end(),
               std::back_inserter(grid));
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    long double total = 0.0L;
    double xa = grid[0];
    double ha = eval_pwl(f, xa) - eval_pwl(g, xa);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double xb = grid[i];
        const double hb = eval_pwl(f, xb) - eval_pwl(g, xb);
        const double w = xb - xa;
        if (ha == 0.0 && hb == 0.0) {
            // nothing
        } else if (ha * hb >= 0.0) {
            total += std::fabs(ha + hb) / 2.0 * w;
        } else {
            // h is affine on the segment and changes sign once.
            const double root = xa + w * ha / (ha - hb);
            total += std::fabs(ha) * (root - xa) / 2.0;
            total += std::fabs(hb) * (xb - root) / 2.0;
        }
        xa = xb;
        ha = hb;
    }
    return static_cast<double>(total);
}

double wasserstein1d(const Histogram1D& p, const Histogram1D& q) {
    return l1_distance(inverse_cdf(p), inverse_cdf(q));
}

}  // namespace histopush
