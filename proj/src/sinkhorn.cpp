#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <vector>

#include "histopush/errors.hpp"
#include "histopush/transport.hpp"

namespace histopush {

namespace {

// exp with ~1e-7 relative error: split off the power of two, degree-6
// Taylor on the remainder. Only iteration quality depends on it; every
// reported bound is recomputed with certified arithmetic afterwards.
inline double fast_exp(double x) {
    if (x < -700.0) return 0.0;
    if (x > 700.0) return std::numeric_limits<double>::infinity();
    const double y = x * 1.4426950408889634;
    const double n = std::floor(y + 0.5);
    const double r = (y - n) * 0.6931471805599453;
    const double p =
        1.0 +
        r * (1.0 +
             r * (0.5 + r * (1.0 / 6.0 +
                             r * (1.0 / 24.0 + r * (1.0 / 120.0 + r * (1.0 / 720.0))))));
    std::uint64_t bits = static_cast<std::uint64_t>(static_cast<std::int64_t>(n) + 1023) << 52;
    double scale;
    std::memcpy(&scale, &bits, sizeof scale);
    return p * scale;
}

struct DenseCost {
    int nr = 0, nc = 0;
    std::vector<float> c;  // row-major

    void fill(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
        nr = mu.size();
        nc = nu.size();
        c.resize(static_cast<std::size_t>(nr) * nc);
        for (int i = 0; i < nr; ++i) {
            const double xi = mu.points[static_cast<std::size_t>(i)][0];
            const double yi = mu.points[static_cast<std::size_t>(i)][1];
            float* row = &c[static_cast<std::size_t>(i) * nc];
            for (int j = 0; j < nc; ++j) {
                row[j] = static_cast<float>(
                    std::hypot(xi - nu.points[static_cast<std::size_t>(j)][0],
                               yi - nu.points[static_cast<std::size_t>(j)][1]));
            }
        }
    }

    double mean() const {
        long double s = 0.0L;
        for (float v : c) s += v;
        return static_cast<double>(s / (static_cast<long double>(nr) * nc));
    }
};

// Log-domain alternating scaling. All row sweeps work on the exponent
// scale (potential/reg), so the hot loops are one multiply-add plus one
// exponential per matrix entry.
struct LogSinkhorn {
    const DenseCost& cost;
    const std::vector<double>& mu;
    const std::vector<double>& nu;
    std::vector<double> f, g, logmu, lognu, scratch_a, scratch_b;

    LogSinkhorn(const DenseCost& c, const std::vector<double>& a, const std::vector<double>& b)
        : cost(c), mu(a), nu(b),
          f(static_cast<std::size_t>(c.nr), 0.0), g(static_cast<std::size_t>(c.nc), 0.0),
          logmu(static_cast<std::size_t>(c.nr)), lognu(static_cast<std::size_t>(c.nc)),
          scratch_a(static_cast<std::size_t>(c.nc)), scratch_b(static_cast<std::size_t>(c.nc)) {
        for (int i = 0; i < c.nr; ++i) logmu[static_cast<std::size_t>(i)] = std::log(a[static_cast<std::size_t>(i)]);
        for (int j = 0; j < c.nc; ++j) lognu[static_cast<std::size_t>(j)] = std::log(b[static_cast<std::size_t>(j)]);
    }

    void iterate(double reg) {
        const double invreg = 1.0 / reg;
        std::vector<double>& psi = scratch_a;  // g/reg
        for (int j = 0; j < cost.nc; ++j) psi[static_cast<std::size_t>(j)] = g[static_cast<std::size_t>(j)] * invreg;
        for (int i = 0; i < cost.nr; ++i) {
            const float* row = &cost.c[static_cast<std::size_t>(i) * cost.nc];
            double mx = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < cost.nc; ++j) {
                const double a = psi[static_cast<std::size_t>(j)] - row[j] * invreg;
                if (a > mx) mx = a;
            }
            double s = 0.0;
            for (int j = 0; j < cost.nc; ++j) {
                s += fast_exp(psi[static_cast<std::size_t>(j)] - row[j] * invreg - mx);
            }
            f[static_cast<std::size_t>(i)] = reg * (logmu[static_cast<std::size_t>(i)] - mx - std::log(s));
        }
        std::vector<double>& mxc = scratch_a;
        std::vector<double>& sc = scratch_b;
        std::fill(mxc.begin(), mxc.end(), -std::numeric_limits<double>::infinity());
        std::fill(sc.begin(), sc.end(), 0.0);
        for (int i = 0; i < cost.nr; ++i) {
            const float* row = &cost.c[static_cast<std::size_t>(i) * cost.nc];
            const double phi = f[static_cast<std::size_t>(i)] * invreg;
            for (int j = 0; j < cost.nc; ++j) {
                const double a = phi - row[j] * invreg;
                if (a > mxc[static_cast<std::size_t>(j)]) mxc[static_cast<std::size_t>(j)] = a;
            }
        }
        for (int i = 0; i < cost.nr; ++i) {
            const float* row = &cost.c[static_cast<std::size_t>(i) * cost.nc];
            const double phi = f[static_cast<std::size_t>(i)] * invreg;
            for (int j = 0; j < cost.nc; ++j) {
                sc[static_cast<std::size_t>(j)] += fast_exp(phi - row[j] * invreg - mxc[static_cast<std::size_t>(j)]);
            }
        }
        for (int j = 0; j < cost.nc; ++j) {
            g[static_cast<std::size_t>(j)] = reg * (lognu[static_cast<std::size_t>(j)] -
                                                    mxc[static_cast<std::size_t>(j)] -
                                                    std::log(sc[static_cast<std::size_t>(j)]));
        }
    }

    // L1 violation of the row marginals of the implied plan.
    double row_violation(double reg) const {
        const double invreg = 1.0 / reg;
        double viol = 0.0;
        for (int i = 0; i < cost.nr; ++i) {
            const float* row = &cost.c[static_cast<std::size_t>(i) * cost.nc];
            const double phi = f[static_cast<std::size_t>(i)] * invreg;
            double s = 0.0;
            for (int j = 0; j < cost.nc; ++j) {
                s += fast_exp(phi + g[static_cast<std::size_t>(j)] * invreg - row[j] * invreg);
            }
            viol += std::fabs(s - mu[static_cast<std::size_t>(i)]);
        }
        return viol;
    }

    // Valid lower bound on the exact OT cost: c-transform the potentials
    // into a feasible unregularized dual pair. No exponentials involved.
    double dual_lower() const {
        std::vector<double> gt(static_cast<std::size_t>(cost.nc),
                               std::numeric_limits<double>::infinity());
        for (int i = 0; i < cost.nr; ++i) {
            const float* row = &cost.c[static_cast<std::size_t>(i) * cost.nc];
            const double fi = f[static_cast<std::size_t>(i)];
            for (int j = 0; j < cost.nc; ++j) {
                const double v = static_cast<double>(row[j]) - fi;
                if (v < gt[static_cast<std::size_t>(j)]) gt[static_cast<std::size_t>(j)] = v;
            }
        }
        long double lb = 0.0L;
        for (int i = 0; i < cost.nr; ++i) {
            const float* row = &cost.c[static_cast<std::size_t>(i) * cost.nc];
            double ft = std::numeric_limits<double>::infinity();
            for (int j = 0; j < cost.nc; ++j) {
                const double v = static_cast<double>(row[j]) - gt[static_cast<std::size_t>(j)];
                if (v < ft) ft = v;
            }
            lb += static_cast<long double>(ft) * mu[static_cast<std::size_t>(i)];
        }
        for (int j = 0; j < cost.nc; ++j) {
            lb += static_cast<long double>(gt[static_cast<std::size_t>(j)]) * nu[static_cast<std::size_t>(j)];
        }
        return static_cast<double>(lb);
    }

    // Valid upper bound: round the implied plan to exact feasibility
    // (row scaling, capped column scaling, rank-one residual fill).
    double primal_upper(double reg) const {
        const int nr = cost.nr, nc = cost.nc;
        const double invreg = 1.0 / reg;
        std::vector<double> rowscale(static_cast<std::size_t>(nr), 0.0);
        for (int i = 0; i < nr; ++i) {
            const float* row = &cost.c[static_cast<std::size_t>(i) * nc];
            const double phi = f[static_cast<std::size_t>(i)] * invreg;
            double s = 0.0;
            for (int j = 0; j < nc; ++j) {
                s += fast_exp(phi + g[static_cast<std::size_t>(j)] * invreg - row[j] * invreg);
            }
            rowscale[static_cast<std::size_t>(i)] = s > 0.0 ? mu[static_cast<std::size_t>(i)] / s : 0.0;
        }
        std::vector<double> colsum(static_cast<std::size_t>(nc), 0.0);
        for (int i = 0; i < nr; ++i) {
            const float* row = &cost.c[static_cast<std::size_t>(i) * nc];
            const double phi = f[static_cast<std::size_t>(i)] * invreg;
            const double rs = rowscale[static_cast<std::size_t>(i)];
            for (int j = 0; j < nc; ++j) {
                colsum[static_cast<std::size_t>(j)] +=
                    rs * fast_exp(phi + g[static_cast<std::size_t>(j)] * invreg - row[j] * invreg);
            }
        }
        std::vector<double> colscale(static_cast<std::size_t>(nc));
        for (int j = 0; j < nc; ++j) {
            colscale[static_cast<std::size_t>(j)] =
                colsum[static_cast<std::size_t>(j)] > nu[static_cast<std::size_t>(j)]
                    ? nu[static_cast<std::size_t>(j)] / colsum[static_cast<std::size_t>(j)]
                    : 1.0;
        }
        long double base_cost = 0.0L;
        std::vector<double> rowleft = mu;
        std::vector<double> colleft = nu;
        for (int i = 0; i < nr; ++i) {
            const float* row = &cost.c[static_cast<std::size_t>(i) * nc];
            const double phi = f[static_cast<std::size_t>(i)] * invreg;
            const double rs = rowscale[static_cast<std::size_t>(i)];
            for (int j = 0; j < nc; ++j) {
                const double p = rs * colscale[static_cast<std::size_t>(j)] *
                                 fast_exp(phi + g[static_cast<std::size_t>(j)] * invreg - row[j] * invreg);
                base_cost += static_cast<long double>(p) * row[j];
                rowleft[static_cast<std::size_t>(i)] -= p;
                colleft[static_cast<std::size_t>(j)] -= p;
            }
        }
        long double delta = 0.0L;
        for (auto& v : rowleft) {
            if (v < 0.0) v = 0.0;
            delta += v;
        }
        for (auto& v : colleft) {
            if (v < 0.0) v = 0.0;
        }
        if (delta > 0.0L) {
            for (int i = 0; i < nr; ++i) {
                const double ri = rowleft[static_cast<std::size_t>(i)];
                if (ri == 0.0) continue;
                const float* row = &cost.c[static_cast<std::size_t>(i) * nc];
                long double inner = 0.0L;
                for (int j = 0; j < nc; ++j) {
                    inner += static_cast<long double>(colleft[static_cast<std::size_t>(j)]) * row[j];
                }
                base_cost += static_cast<long double>(ri) * inner / delta;
            }
        }
        return static_cast<double>(base_cost);
    }
};

}  // namespace

double sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double reg, int max_iter,
                double* violation_out) {
    if (reg <= 0.0) throw DomainError("sinkhorn: reg must be positive");
    if (max_iter < 1) throw DomainError("sinkhorn: max_iter must be positive");
    DenseCost cost;
    cost.fill(mu, nu);
    LogSinkhorn state(cost, mu.masses, nu.masses);
    // Warm the potentials in from a coarse regularization; iterations count
    // against the caller's budget.
    int used = 0;
    for (double warm = 0.25 * cost.mean(); warm > 2.0 * reg && used + 8 < max_iter; warm *= 0.25) {
        for (int it = 0; it < 40 && used < max_iter - 8; ++it, ++used) state.iterate(warm);
    }
    for (; used < max_iter; ++used) {
        state.iterate(reg);
        if (used % 10 == 9 && state.row_violation(reg) <= 1e-7) break;
    }
    const double viol = state.row_violation(reg);
    if (violation_out) *violation_out = viol;
    if (viol > 1e-5) {
        throw NotConverged("sinkhorn: marginal violation " + std::to_string(viol) + " after " +
                           std::to_string(max_iter) + " iterations");
    }
    long double c = 0.0L;
    const double invreg = 1.0 / reg;
    for (int i = 0; i < cost.nr; ++i) {
        const float* row = &cost.c[static_cast<std::size_t>(i) * cost.nc];
        const double phi = state.f[static_cast<std::size_t>(i)] * invreg;
        for (int j = 0; j < cost.nc; ++j) {
            c += static_cast<long double>(
                     fast_exp(phi + state.g[static_cast<std::size_t>(j)] * invreg - row[j] * invreg)) *
                 row[j];
        }
    }
    return static_cast<double>(c);
}

OtBracket sinkhorn_certified(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             double gap_target) {
    DenseCost cost;
    cost.fill(mu, nu);
    LogSinkhorn state(cost, mu.masses, nu.masses);
    OtBracket best{0.0, std::numeric_limits<double>::infinity()};
    // The rounding step absorbs marginal violation at roughly diameter
    // cost, so iterate each stage only until the violation is a small
    // share of the gap budget, then certify.
    const double viol_target = std::max(1e-10, 0.02 * gap_target);
    double reg = 0.05 * cost.mean();
    for (int stage = 0; stage < 20 && reg > 1e-10; ++stage, reg *= 0.3) {
        for (int it = 0; it < 600; ++it) {
            state.iterate(reg);
            if (it % 8 == 7 && state.row_violation(reg) <= viol_target) break;
        }
        best.lower = std::max(best.lower, state.dual_lower());
        best.upper = std::min(best.upper, state.primal_upper(reg));
        if (best.upper - best.lower <= gap_target) break;
    }
    return best;
}

}  // namespace histopush
