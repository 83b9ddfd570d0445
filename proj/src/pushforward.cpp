#include "histopush/pushforward.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "histopush/errors.hpp"
#include "histopush/pwl.hpp"

namespace histopush {

int choose_s(int n, double epsilon) {
    if (n < 1 || epsilon <= 0.0) throw DomainError("choose_s: need n >= 1 and epsilon > 0");
    const double ratio = 2.0 * std::sqrt(2.0) / (n * epsilon);
    int s = std::max(1, static_cast<int>(std::ceil(std::log2(ratio))));
    while (guarantee_value(n, s) > epsilon) ++s;  // float-edge guard
    return s;
}

double guarantee_value(int n, int s) { return 2.0 * std::sqrt(2.0) / (n * std::exp2(s)); }

int default_width(int n) {
    int w = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    while (static_cast<long long>(w - 1) * (w - 1) >= n) --w;
    while (static_cast<long long>(w) * w < n) ++w;
    return std::max(8, w);
}

namespace {

BuildReport report_for(const Histogram2D& p, double epsilon, int s, int width,
                       const ReluNet& net, const char* variant) {
    BuildReport rep;
    rep.n = p.n;
    rep.epsilon = epsilon;
    rep.s = s;
    rep.size = net_size(net);
    rep.depth = net_depth(net);
    rep.width = width;
    rep.guarantee = guarantee_value(p.n, s);
    rep.variant = variant;
    if (rep.guarantee > epsilon) throw InternalError("build: guarantee exceeds epsilon");
    return rep;
}

PiecewiseAffine conditional_quantile(const Histogram2D& p, int i) {
    PiecewiseAffine f = inverse_cdf(conditional_second(p, i));
    if (f.values.front() != 0.0) {
        throw InternalError("build: conditional quantile does not start at 0");
    }
    return f;
}

}  // namespace

BuildResult build_phi(const Histogram2D& p, double epsilon, std::optional<int> width) {
    const int n = p.n;
    const int s = choose_s(n, epsilon);
    const int w = width.value_or(default_width(n));
    if (w < 8) throw WidthTooSmall("build_phi: W must be >= 8");

    const ReluNet marg = spline_deep(inverse_cdf(marginal_first(p)), w);
    const ReluNet saw = sawtooth(s);

    std::vector<ReluNet> branches;
    branches.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const ReluNet cond = spline_deep(conditional_quantile(p, i), w);
        const ReluNet inner = compose(saw, marg, static_cast<double>(n), static_cast<double>(-i));
        branches.push_back(compose(cond, inner, 1.0, 0.0));
    }
    const ReluNet sum = add(branches, std::vector<double>(static_cast<std::size_t>(n), 1.0));
    ReluNet net = parallel(marg, sum);

    BuildResult out{std::move(net), {}};
    out.report = report_for(p, epsilon, s, w, out.net, "deep");
    return out;
}

BuildResult build_phi_baseline(const Histogram2D& p, double epsilon) {
    const int n = p.n;
    const int s = choose_s(n, epsilon);
    const PiecewiseAffine marg = simplify(inverse_cdf(marginal_first(p)));
    std::vector<PiecewiseAffine> cond;
    cond.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cond.push_back(simplify(conditional_quantile(p, i)));

    ReluNet net;
    const int m0 = marg.breakpoints();

    // Marginal spline hidden units.
    {
        Matrix mat = Matrix::zeros(m0 + 1, 1);
        std::vector<double> bias(static_cast<std::size_t>(m0) + 1, 0.0);
        for (int j = 0; j <= m0; ++j) {
            mat.mut(j, 0) = 1.0;
            if (j > 0) bias[static_cast<std::size_t>(j)] = -marg.knots[static_cast<std::size_t>(j)];
        }
        net.layers.push_back({std::move(mat), std::move(bias)});
    }
    // The marginal value u, shared by every branch and by the output.
    {
        Matrix mat = Matrix::zeros(1, m0 + 1);
        mat.mut(0, 0) = pwl_slope(marg, 0);
        for (int j = 1; j <= m0; ++j) mat.mut(0, j) = pwl_slope(marg, j) - pwl_slope(marg, j - 1);
        net.layers.push_back({std::move(mat), {marg.values.front()}});
    }
    // Sawtooth stages: per branch the triangular-map triple on n*u - i,
    // then on the previous stage's triple, with u carried alongside.
    const double toff[3] = {0.0, -0.5, -1.0};
    {
        Matrix mat = Matrix::zeros(3 * n + 1, 1);
        std::vector<double> bias(static_cast<std::size_t>(3 * n) + 1, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int t = 0; t < 3; ++t) {
                mat.mut(3 * i + t, 0) = static_cast<double>(n);
                bias[static_cast<std::size_t>(3 * i + t)] = -static_cast<double>(i) + toff[t];
            }
        }
        mat.mut(3 * n, 0) = 1.0;
        net.layers.push_back({std::move(mat), std::move(bias)});
    }
    const double tri[3] = {2.0, -4.0, 2.0};
    for (int stage = 1; stage < s; ++stage) {
        std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(3 * n) + 1);
        std::vector<double> bias(static_cast<std::size_t>(3 * n) + 1, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int t = 0; t < 3; ++t) {
                auto& row = rows[static_cast<std::size_t>(3 * i + t)];
                for (int k = 0; k < 3; ++k) row.push_back({3 * i + k, tri[k]});
                bias[static_cast<std::size_t>(3 * i + t)] = toff[t];
            }
        }
        rows[static_cast<std::size_t>(3 * n)].push_back({3 * n, 1.0});
        net.layers.push_back({Matrix::sparse_from_triplets(3 * n + 1, 3 * n + 1, std::move(rows)),
                              std::move(bias)});
    }
    // Conditional spline hidden units on each branch value.
    std::vector<int> unit_base(static_cast<std::size_t>(n));
    int total_units = 0;
    for (int i = 0; i < n; ++i) {
        unit_base[static_cast<std::size_t>(i)] = total_units;
        total_units += cond[static_cast<std::size_t>(i)].breakpoints() + 1;
    }
    {
        std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(total_units) + 1);
        std::vector<double> bias(static_cast<std::size_t>(total_units) + 1, 0.0);
        for (int i = 0; i < n; ++i) {
            const auto& f = cond[static_cast<std::size_t>(i)];
            for (int j = 0; j <= f.breakpoints(); ++j) {
                auto& row = rows[static_cast<std::size_t>(unit_base[static_cast<std::size_t>(i)] + j)];
                for (int k = 0; k < 3; ++k) row.push_back({3 * i + k, tri[k]});
                if (j > 0) bias[static_cast<std::size_t>(unit_base[static_cast<std::size_t>(i)] + j)] =
                    -f.knots[static_cast<std::size_t>(j)];
            }
        }
        rows[static_cast<std::size_t>(total_units)].push_back({3 * n, 1.0});
        net.layers.push_back({Matrix::sparse_from_triplets(total_units + 1, 3 * n + 1, std::move(rows)),
                              std::move(bias)});
    }
    // Output: the carried u and the branch sum. Conditional quantiles
    // vanish at 0, so inactive branches contribute nothing to the sum.
    {
        std::vector<std::vector<std::pair<int, double>>> rows(2);
        rows[0].push_back({total_units, 1.0});
        for (int i = 0; i < n; ++i) {
            const auto& f = cond[static_cast<std::size_t>(i)];
            const int base = unit_base[static_cast<std::size_t>(i)];
            rows[1].push_back({base, pwl_slope(f, 0)});
            for (int j = 1; j <= f.breakpoints(); ++j) {
                rows[1].push_back({base + j, pwl_slope(f, j) - pwl_slope(f, j - 1)});
            }
        }
        net.layers.push_back({Matrix::sparse_from_triplets(2, total_units + 1, std::move(rows)),
                              {0.0, 0.0}});
    }

    BuildResult out{std::move(net), {}};
    out.report = report_for(p, epsilon, s, 0, out.net, "baseline");
    return out;
}

namespace {

SizeDepth predicted_deep(long long m_marg, const std::vector<long long>& m_cond, int n, int s, int w) {
    const SizeDepth marg = spline_deep_arith(m_marg, w);
    const SizeDepth saw = sawtooth_arith(s);
    std::vector<SizeDepth> branches;
    branches.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const SizeDepth inner = compose_arith(saw, marg);
        branches.push_back(compose_arith(spline_deep_arith(m_cond[static_cast<std::size_t>(i)], w), inner));
    }
    return parallel_arith(marg, add_arith(branches));
}

SizeDepth predicted_base(long long m_marg, const std::vector<long long>& m_cond, int n, int s) {
    long long units = 0;
    for (long long m : m_cond) units += m + 1;
    return {(m_marg + 1) + 1 + static_cast<long long>(s) * (3LL * n + 1) + (units + 1) + 2,
            static_cast<long long>(s) + 4};
}

}  // namespace

SizeDepth predicted_accounting(int n, double epsilon, int width) {
    return predicted_deep(n - 1, std::vector<long long>(static_cast<std::size_t>(n), n - 1), n,
                          choose_s(n, epsilon), width);
}

SizeDepth predicted_accounting(const Histogram2D& p, double epsilon, std::optional<int> width) {
    const int w = width.value_or(default_width(p.n));
    std::vector<long long> mc(static_cast<std::size_t>(p.n));
    for (int i = 0; i < p.n; ++i) {
        mc[static_cast<std::size_t>(i)] = simplify(inverse_cdf(conditional_second(p, i))).breakpoints();
    }
    return predicted_deep(simplify(inverse_cdf(marginal_first(p))).breakpoints(), mc, p.n,
                          choose_s(p.n, epsilon), w);
}

SizeDepth predicted_accounting_baseline(const Histogram2D& p, double epsilon) {
    std::vector<long long> mc(static_cast<std::size_t>(p.n));
    for (int i = 0; i < p.n; ++i) {
        mc[static_cast<std::size_t>(i)] = simplify(inverse_cdf(conditional_second(p, i))).breakpoints();
    }
    return predicted_base(simplify(inverse_cdf(marginal_first(p))).breakpoints(), mc, p.n,
                          choose_s(p.n, epsilon));
}

SizeDepth predicted_accounting_baseline(int n, double epsilon) {
    return predicted_base(n - 1, std::vector<long long>(static_cast<std::size_t>(n), n - 1), n,
                          choose_s(n, epsilon));
}

}  // namespace histopush
