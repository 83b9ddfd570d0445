#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "histopush/bounds.hpp"
#include "histopush/errors.hpp"
#include "histopush/pieces.hpp"
#include "histopush/pushforward.hpp"
#include "histopush/pwl.hpp"
#include "histopush/rng.hpp"
#include "histopush/transport.hpp"

using namespace histopush;

namespace {

double ks_against_uniform(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        d = std::max(d, std::fabs((i + 1) / n - xs[i]));
        d = std::max(d, std::fabs(i / n - xs[i]));
    }
    return d;
}

}  // namespace

TEST_CASE("choose_s evaluates the stated rule") {
    CHECK(choose_s(4, 1.0) == 1);
    CHECK(choose_s(2, 0.1) == 4);
    for (int n : {1, 2, 8, 32}) {
        for (double eps : {0.5, 0.1, 0.013, 0.0007}) {
            const int s = choose_s(n, eps);
            CHECK(guarantee_value(n, s) <= eps);
            if (s > 1) CHECK(guarantee_value(n, s - 1) > eps);
        }
    }
    CHECK_THROWS_AS(choose_s(2, 0.0), DomainError);
}

TEST_CASE("default_width is the square-root rule floored at 8") {
    CHECK(default_width(4) == 8);
    CHECK(default_width(64) == 8);
    CHECK(default_width(65) == 9);
    CHECK(default_width(256) == 16);
    CHECK(default_width(1024) == 32);
}

TEST_CASE("build_phi on the uniform target pushes uniform to uniform") {
    const auto p = make_histogram2d(1, {1.0});
    const auto built = build_phi(p, 0.5);
    CHECK(built.report.guarantee <= 0.5);
    CHECK(built.report.size == net_size(built.net));
    CHECK(built.report.depth == net_depth(built.net));

    Rng rng(123);
    std::vector<double> xs, ys;
    for (int i = 0; i < 100000; ++i) {
        const auto y = eval_net(built.net, rng.next_double());
        xs.push_back(y[0]);
        ys.push_back(y[1]);
    }
    const double gate = 1.63 / std::sqrt(100000.0);
    CHECK(ks_against_uniform(xs) < gate);
    CHECK(ks_against_uniform(ys) < gate);
}

TEST_CASE("first output coordinate realizes the marginal quantile") {
    const auto p = make_histogram2d(2, {2.0, 1.0, 0.5, 0.5});
    const auto built = build_phi(p, 0.1);
    const auto q = inverse_cdf(marginal_first(p));
    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        CHECK(std::fabs(eval_net(built.net, x)[0] - eval_pwl(q, x)) <= 1e-9);
    }
}

TEST_CASE("off-tile branches contribute exactly zero") {
    const auto p = random_histogram(4, 3, 0.6);
    const int s = choose_s(4, 0.2);
    const int w = default_width(4);
    const auto marg = spline_deep(inverse_cdf(marginal_first(p)), w);
    const auto saw = sawtooth(s);
    const auto q = inverse_cdf(marginal_first(p));

    for (int i = 0; i < 4; ++i) {
        const auto cond = spline_deep(inverse_cdf(conditional_second(p, i)), w);
        const auto branch = compose(cond, compose(saw, marg, 4.0, -static_cast<double>(i)), 1.0, 0.0);
        for (double x : {0.05, 0.3, 0.55, 0.8, 0.99}) {
            const double u = eval_pwl(q, x);
            const int tile = std::min(3, static_cast<int>(u * 4.0));
            const double interior = std::min(u * 4.0 - tile, tile + 1.0 - u * 4.0);
            if (tile != i && interior > 1e-6) {
                CHECK(eval_net_scalar(branch, x) == 0.0);
            }
        }
    }
}

TEST_CASE("deep and baseline builders realize the same function") {
    const auto p = make_histogram2d(2, {2.0, 1.0, 0.5, 0.5});
    const auto deep = build_phi(p, 0.1);
    const auto base = build_phi_baseline(p, 0.1);
    CHECK(deep.report.variant == "deep");
    CHECK(base.report.variant == "baseline");
    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        const auto a = eval_net(deep.net, x);
        const auto b = eval_net(base.net, x);
        CHECK(std::fabs(a[0] - b[0]) <= 1e-8);
        CHECK(std::fabs(a[1] - b[1]) <= 1e-8);
    }

    const auto pr = random_histogram(5, 17, 0.8);
    const auto deepr = build_phi(pr, 0.07);
    const auto baser = build_phi_baseline(pr, 0.07);
    for (int i = 0; i <= 800; ++i) {
        const double x = i / 800.0;
        const auto a = eval_net(deepr.net, x);
        const auto b = eval_net(baser.net, x);
        CHECK(std::fabs(a[0] - b[0]) <= 1e-8);
        CHECK(std::fabs(a[1] - b[1]) <= 1e-8);
    }
}

TEST_CASE("predicted accounting matches the built nets exactly") {
    Rng rng(8);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 2 + static_cast<int>(rng.next_below(10));
        const double eps = 0.02 + 0.3 * rng.next_double();
        const auto p = random_histogram(n, 1000 + rep, 0.7);

        const auto deep = build_phi(p, eps);
        const auto dpred = predicted_accounting(p, eps);
        CHECK(deep.report.size == dpred.size);
        CHECK(deep.report.depth == dpred.depth);
        // Random weights keep every breakpoint, so the generic count agrees.
        const auto gpred = predicted_accounting(n, eps, default_width(n));
        CHECK(deep.report.size == gpred.size);
        CHECK(deep.report.depth == gpred.depth);

        const auto base = build_phi_baseline(p, eps);
        const auto bpred = predicted_accounting_baseline(p, eps);
        CHECK(base.report.size == bpred.size);
        CHECK(base.report.depth == bpred.depth);
    }

    // Uniform weights collapse the splines to their affine skeleton.
    const auto u = random_histogram(6, 1, 0.0);
    const auto upred = predicted_accounting(u, 0.2);
    const auto ubuilt = build_phi(u, 0.2);
    CHECK(ubuilt.report.size == upred.size);
    CHECK(upred.size < predicted_accounting(6, 0.2, default_width(6)).size);
}

TEST_CASE("builder reports satisfy the size lower bound at achieved accuracy") {
    for (int n : {2, 4, 8}) {
        const auto p = random_histogram(n, 77 + n, 0.5);
        for (double eps : {0.2, 0.05}) {
            for (const auto& built : {build_phi(p, eps), build_phi_baseline(p, eps)}) {
                const double lb = lower_bound_size(n, built.report.guarantee,
                                                   static_cast<int>(built.report.depth), 2);
                CHECK(static_cast<double>(built.report.size) >= std::ceil(lb));
                CHECK(built.report.guarantee <= eps);
            }
        }
    }
}

TEST_CASE("built generators meet their distance guarantee") {
    const auto p = make_histogram2d(2, {2.0, 1.0, 0.5, 0.5});
    const auto built = build_phi(p, 0.1);
    CHECK(built.report.s == 4);
    const auto est = estimate_w(p, built.net, 8, 2000);
    CHECK(est.method == "exact");
    // estimate - slack must sit below the certified accuracy.
    CHECK(est.lower() <= built.report.guarantee);
}
