#include "histopush/bounds.hpp"

#include <cmath>
#include <limits>

#include "histopush/errors.hpp"
#include "histopush/pushforward.hpp"

namespace histopush {

namespace {

// Gamma(k/2) for integer k >= 1 by the recursion Gamma(z+1) = z Gamma(z)
// from Gamma(1/2) = sqrt(pi) and Gamma(1) = 1.
double gamma_half(int twice) {
    if (twice < 1) throw DomainError("gamma_half: argument must be positive");
    double value = twice % 2 == 1 ? std::sqrt(4.0 * std::atan(1.0)) : 1.0;
    for (int k = twice % 2 == 1 ? 1 : 2; k < twice; k += 2) {
        value *= 0.5 * k;
    }
    return value;
}

}  // namespace

double c_constant(int d) {
    if (d < 2) throw DomainError("c_constant: d must be >= 2");
    const double pi = 4.0 * std::atan(1.0);
    const double num = 2.0 * gamma_half(d + 1) * gamma_half(3);
    const double den = std::pow(pi, d / 2.0) * std::sqrt(static_cast<double>(d));
    return d / (d - 1.0) * std::pow(num / den, 1.0 / (d - 1.0));
}

double zeta_cap(long long n_size, long long l_depth) {
    if (l_depth < 1 || n_size < l_depth) throw DomainError("zeta_cap: need N >= L >= 1");
    const double e = std::exp(1.0);
    const double base = e * (static_cast<double>(n_size) / l_depth + 1.0);
    return std::pow(base, static_cast<double>(l_depth));
}

double log_zeta_cap(long long n_size, long long l_depth) {
    if (l_depth < 1 || n_size < l_depth) throw DomainError("log_zeta_cap: need N >= L >= 1");
    return l_depth * (1.0 + std::log(static_cast<double>(n_size) / l_depth + 1.0));
}

double lower_bound_size(int n, double epsilon, int l_depth, int d) {
    if (n < 1 || epsilon <= 0.0 || l_depth < 1) throw DomainError("lower_bound_size: bad parameters");
    const double ratio = c_constant(d) / (n * epsilon);
    const double grown = l_depth * (std::pow(ratio, (d - 1.0) / l_depth) / std::exp(1.0) - 1.0);
    return std::max(static_cast<double>(l_depth), grown);
}

double w_floor(int n, double zeta, int d) {
    if (n < 1 || zeta < 1.0) throw DomainError("w_floor: bad parameters");
    return c_constant(d) * std::pow(zeta, -1.0 / (d - 1.0)) / n;
}

BoundsReport make_bounds_report(int n, double epsilon, int l_depth, int d) {
    BoundsReport rep;
    rep.n = n;
    rep.epsilon = epsilon;
    rep.l_depth = l_depth;
    rep.d = d;
    rep.c_d = c_constant(d);
    const SizeDepth upper = predicted_accounting(n, epsilon, default_width(n));
    rep.upper_size = upper.size;
    rep.upper_depth = upper.depth;
    rep.lower_size = lower_bound_size(n, epsilon, l_depth, d);
    rep.zeta_cap_value = zeta_cap(upper.size, upper.depth);
    rep.log_zeta_cap_value = log_zeta_cap(upper.size, upper.depth);
    const double zeta = std::isfinite(rep.zeta_cap_value)
                            ? rep.zeta_cap_value
                            : std::numeric_limits<double>::max();
    rep.w_floor_value = w_floor(n, zeta, d);
    return rep;
}

std::vector<RegimeRow> regime_table(const std::vector<std::pair<int, double>>& cases) {
    std::vector<RegimeRow> rows;
    rows.reserve(cases.size());
    for (const auto& [n, eps] : cases) {
        RegimeRow row;
        row.n = n;
        row.epsilon = eps;
        const SizeDepth deep = predicted_accounting(n, eps, default_width(n));
        const SizeDepth base = predicted_accounting_baseline(n, eps);
        row.deep_size = deep.size;
        row.deep_depth = deep.depth;
        row.base_size = base.size;
        row.base_depth = base.depth;
        const double g = guarantee_value(n, choose_s(n, eps));
        row.guarantee = g;
        row.lb_at_deep_depth = lower_bound_size(n, g, static_cast<int>(deep.depth), 2);
        row.lb_at_base_depth = lower_bound_size(n, g, static_cast<int>(base.depth), 2);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace histopush
