#include "acceptance.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "../test_util.hpp"
#include "histopush/bounds.hpp"
#include "histopush/errors.hpp"
#include "histopush/io.hpp"
#include "histopush/pieces.hpp"
#include "histopush/pushforward.hpp"
#include "histopush/pwl.hpp"
#include "histopush/relunet.hpp"
#include "histopush/transport.hpp"

namespace histopush::acceptance {

namespace {

using testutil::random_pwl;
using testutil::sawtooth_formula;

struct Check {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        ok = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
    void expect(bool cond, const std::string& why) {
        if (!cond) fail(why);
    }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// ---- shared stashes consumed by criteria 7 and 8 ---------------------------

struct NetAudit {
    std::string label;
    int n = 0;
    long long size = 0;
    long long depth = 0;
    double pieces = 0.0;  // measured (or structurally computed) count
    double zlines = 0.0;  // collinear-merged image segments
    double upper = 0.0;   // estimate + slack from the distance bracket
};

struct BuildAudit {
    std::string label;
    int n = 0;
    double guarantee = 0.0;
    long long size = 0;
    long long depth = 0;
};

struct Stash {
    std::vector<NetAudit> nets;
    std::vector<BuildAudit> builds;
};

void audit_build(Stash& stash, const std::string& label, const BuildReport& rep) {
    stash.builds.push_back({label, rep.n, rep.guarantee, rep.size, rep.depth});
}

// ---- structural piece decomposition of the generator -----------------------
//
// Within one slab of the marginal quantile the first coordinate is a single
// affine piece and the sawtooth argument is the normalized slab position, so
// the second coordinate sweeps the conditional quantile once per tooth. That
// yields the exact decomposition tile by tile without touching the net; it
// is cross-checked against direct extraction at small n.
PieceDecomposition symbolic_phi_pieces(const Histogram2D& p, int s) {
    const PiecewiseAffine marg = inverse_cdf(marginal_first(p));
    const int teeth = 1 << s;

    std::vector<double> xs{0.0};
    std::vector<double> first{0.0};
    std::vector<double> second{0.0};

    for (int i = 0; i < p.n; ++i) {
        const double a = marg.knots[static_cast<std::size_t>(i)];
        const double b = marg.knots[static_cast<std::size_t>(i) + 1];
        const PiecewiseAffine cond = inverse_cdf(conditional_second(p, i));
        const std::size_t nk = cond.knots.size();
        for (int tooth = 0; tooth < teeth; ++tooth) {
            const bool up = tooth % 2 == 0;
            for (std::size_t step = 1; step < nk; ++step) {
                const double q = up ? cond.knots[step] : 1.0 - cond.knots[nk - 1 - step];
                const double v = (tooth + q) / teeth;
                xs.push_back(a + (b - a) * v);
                first.push_back((i + v) / p.n);
                second.push_back(up ? cond.values[step] : cond.values[nk - 1 - step]);
            }
        }
    }

    // Assemble with the extractor's merge policy.
    PieceDecomposition dec;
    dec.a = 0.0;
    dec.b = 1.0;
    dec.coeffs.assign(2, {});
    const double merge_tol = 1e-10;
    std::size_t prev = 0;
    double last_s1 = 0.0, last_s2 = 0.0;
    bool have_piece = false;
    for (std::size_t k = 1; k < xs.size(); ++k) {
        const double dx = xs[k] - xs[prev];
        if (dx < merge_tol && k + 1 < xs.size()) continue;
        const double s1 = (first[k] - first[prev]) / dx;
        const double s2 = (second[k] - second[prev]) / dx;
        const double c1 = first[prev] - s1 * xs[prev];
        const double c2 = second[prev] - s2 * xs[prev];
        const bool fuse = have_piece && std::fabs(s1 - last_s1) < merge_tol &&
                          std::fabs(s2 - last_s2) < merge_tol;
        if (!have_piece) {
            dec.coeffs[0].emplace_back(s1, c1);
            dec.coeffs[1].emplace_back(s2, c2);
            have_piece = true;
        } else if (!fuse) {
            dec.breakpoints.push_back(xs[prev]);
            dec.coeffs[0].emplace_back(s1, c1);
            dec.coeffs[1].emplace_back(s2, c2);
        }
        last_s1 = s1;
        last_s2 = s2;
        prev = k;
    }
    return dec;
}

// ---- small numeric helpers --------------------------------------------------

struct Fit {
    double slope = 0.0;
    double r2 = 0.0;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    Fit fit;
    fit.slope = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double pred = my + fit.slope * (x[i] - mx);
        ss_res += (y[i] - pred) * (y[i] - pred);
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

struct RandomFn {
    PiecewiseAffine pwl;
    ReluNet net;
};

RandomFn random_fn(Rng& rng, bool allow_pad = true) {
    RandomFn out;
    const int m = static_cast<int>(rng.next_below(9));
    out.pwl = random_pwl(m, rng);
    switch (rng.next_below(3)) {
        case 0: out.net = spline_shallow(out.pwl); break;
        case 1: out.net = spline_deep(out.pwl, 8); break;
        default: out.net = spline_deep(out.pwl, 10); break;
    }
    if (allow_pad && rng.next_below(2) == 0) {
        out.net = pass(out.net, net_depth(out.net) + static_cast<int>(rng.next_below(3)));
    }
    return out;
}

// ---- criteria ----------------------------------------------------------------

Check criterion1_combinators() {
    Check c;
    Rng rng(101);
    double worst = 0.0;
    const int cases = 200;
    const int pts = 1000;

    for (int rep = 0; rep < cases && c.ok; ++rep) {
        // Pass
        {
            const RandomFn f = random_fn(rng);
            const int lt = net_depth(f.net) + static_cast<int>(rng.next_below(5));
            const ReluNet padded = pass(f.net, lt);
            c.expect(net_size(padded) == net_size(f.net) + (lt - net_depth(f.net)),
                     "pass size formula");
            c.expect(net_depth(padded) == lt, "pass depth formula");
            for (int k = 0; k < pts; ++k) {
                const double x = (k + 0.5) / pts;
                worst = std::max(worst, std::fabs(eval_net_scalar(padded, x) - eval_pwl(f.pwl, x)));
            }
        }
        // Parallel
        {
            const RandomFn f = random_fn(rng), g = random_fn(rng);
            const ReluNet h = parallel(f.net, g.net);
            const int n1 = net_size(f.net), n2 = net_size(g.net);
            const int l1 = net_depth(f.net), l2 = net_depth(g.net);
            c.expect(net_size(h) == n1 + n2 + std::abs(l1 - l2), "parallel size formula");
            c.expect(net_depth(h) == std::max(l1, l2), "parallel depth formula");
            for (int k = 0; k < pts; ++k) {
                const double x = (k + 0.5) / pts;
                const auto y = eval_net(h, x);
                worst = std::max(worst, std::fabs(y[0] - eval_pwl(f.pwl, x)));
                worst = std::max(worst, std::fabs(y[1] - eval_pwl(g.pwl, x)));
            }
        }
        // Compose
        {
            const RandomFn f = random_fn(rng), g = random_fn(rng);
            const double pp = 0.1 + 0.9 * rng.next_double();
            const double qq = (1.0 - pp) * rng.next_double();
            const ReluNet h = compose(f.net, g.net, pp, qq);
            c.expect(net_size(h) == net_size(f.net) + net_size(g.net) - 1, "compose size formula");
            c.expect(net_depth(h) == net_depth(f.net) + net_depth(g.net) - 1,
                     "compose depth formula");
            for (int k = 0; k < pts; ++k) {
                const double x = (k + 0.5) / pts;
                const double want = eval_pwl(f.pwl, pp * eval_pwl(g.pwl, x) + qq);
                worst = std::max(worst, std::fabs(eval_net_scalar(h, x) - want));
            }
        }
        // Add
        {
            const int l = 2 + static_cast<int>(rng.next_below(3));
            std::vector<RandomFn> fns;
            std::vector<ReluNet> nets;
            long long size_formula = 1, depth_formula = 1;
            for (int i = 0; i < l; ++i) {
                fns.push_back(random_fn(rng));
                nets.push_back(fns.back().net);
                size_formula += net_size(nets.back()) + 2LL * net_depth(nets.back()) - 3;
                depth_formula += net_depth(nets.back()) - 1;
            }
            const ReluNet h = add(nets);
            c.expect(net_size(h) == size_formula, "add size formula");
            c.expect(net_depth(h) == depth_formula, "add depth formula");
            for (int k = 0; k < pts; ++k) {
                const double x = (k + 0.5) / pts;
                double want = 0.0;
                for (const auto& fn : fns) want += eval_pwl(fn.pwl, x);
                worst = std::max(worst, std::fabs(eval_net_scalar(h, x) - want));
            }
        }
    }
    c.expect(worst <= 1e-9, "functional agreement " + fmt(worst) + " > 1e-9");
    c.note("200 cases per lemma, max functional err " + fmt(worst));
    return c;
}

Check criterion2_sawtooth() {
    Check c;
    double worst = 0.0;
    for (int s = 1; s <= 10; ++s) {
        const ReluNet net = sawtooth(s);
        c.expect(net_size(net) == 3 * s + 1, "size 3s+1 at s=" + std::to_string(s));
        c.expect(net_depth(net) == s + 1, "depth s+1 at s=" + std::to_string(s));
        for (int k = 0; k <= 10000; ++k) {
            const double x = k / 10000.0;
            worst = std::max(worst, std::fabs(eval_net_scalar(net, x) - sawtooth_formula(s, x)));
        }
        for (double x :
             {-10.0, -5.0, -2.0, -1.0, -0.5, -1e-6, -0.0, 1.0 + 1e-6, 1.5, 2.0, 10.0, 100.0}) {
            if (eval_net_scalar(net, x) != 0.0) {
                c.fail("nonzero outside [0,1] at s=" + std::to_string(s) + ", x=" + fmt(x));
            }
        }
    }
    c.expect(worst <= 1e-9, "grid error " + fmt(worst) + " > 1e-9");
    c.note("s=1..10, max grid err " + fmt(worst));
    return c;
}

Check criterion3_spline() {
    Check c;
    Rng rng(301);
    double worst = 0.0;
    for (int w : {8, 10, 16}) {
        const long long mw = static_cast<long long>(w - 2) * ((w - 2) / 6);
        for (int m = 0; m <= 200; m += 7) {
            const PiecewiseAffine f = random_pwl(m, rng);
            const ReluNet net = spline_deep(f, w);
            const long long want_l = m == 0 ? 2 : 2 * ((m + mw - 1) / mw) + 1;
            c.expect(net_depth(net) == want_l,
                     "depth at m=" + std::to_string(m) + " W=" + std::to_string(w));
            c.expect(net_size(net) == w * (want_l - 1) + 1,
                     "size at m=" + std::to_string(m) + " W=" + std::to_string(w));
            for (int k = 0; k <= 10000; ++k) {
                const double x = k / 10000.0;
                worst = std::max(worst, std::fabs(eval_net_scalar(net, x) - eval_pwl(f, x)));
            }
            for (std::size_t j = 1; j + 1 < f.knots.size(); ++j) {
                for (double x : {f.knots[j] - 1e-7, f.knots[j], f.knots[j] + 1e-7}) {
                    worst = std::max(worst, std::fabs(eval_net_scalar(net, x) - eval_pwl(f, x)));
                }
            }
            if (!c.ok) break;
        }
    }
    c.expect(worst <= 1e-8, "function error " + fmt(worst) + " > 1e-8");
    c.note("m in 0..200 step 7, W in {8,10,16}, max err " + fmt(worst));
    return c;
}

Check criterion4_guarantee(Stash& stash) {
    Check c;
    const int ns[3] = {2, 4, 8};
    const int ss[3] = {1, 2, 3};
    const double mean_cell = mean_cell_center_distance();
    int exact_cases = 0, sinkhorn_cases = 0;
    double worst_rel_slack = 0.0;

    for (int rep = 0; rep < 20 && c.ok; ++rep) {
        const int n = ns[(rep % 9) / 3];
        const int s = ss[rep % 3];
        const double g = guarantee_value(n, s);
        const double budget = 0.2 * g;
        const Histogram2D p = random_histogram(n, 1000 + static_cast<std::uint64_t>(rep), 0.5);
        const BuildResult built = build_phi(p, g * (1.0 + 1e-9));
        if (built.report.s != s) {
            c.fail("builder chose s=" + std::to_string(built.report.s) + " not " +
                   std::to_string(s));
            break;
        }
        audit_build(stash, "c4#" + std::to_string(rep), built.report);

        const PieceDecomposition pieces = extract_pieces(built.net, 0.0, 1.0);
        const double larc = curve_length(pieces);

        // Cheapest exact configuration fitting the slack budget under the
        // 5000-atom cap; certified sinkhorn bracket when none exists.
        int best_r = -1, best_m = -1;
        double best_work = 1e300;
        for (int r = 1; static_cast<long long>(n) * r * n * r <= 5000; ++r) {
            const double hist_slack = mean_cell / (static_cast<double>(n) * r);
            const double room = 0.99 * budget - hist_slack;
            if (room <= 0.0) continue;
            int m = std::max(8, static_cast<int>(std::ceil(larc / (4.0 * room))));
            while (m <= 5000 && curve_quadrature_slack(pieces, m) > room) m += 1 + m / 8;
            if (m > 5000) continue;
            const double work = static_cast<double>(n) * r * n * r * m;
            if (work < best_work) {
                best_work = work;
                best_r = r;
                best_m = m;
            }
        }

        WEstimate est;
        if (best_r > 0) {
            est = estimate_w(p, built.net, best_r, best_m, &pieces);
            ++exact_cases;
            if (est.method != "exact") c.fail("expected the exact solver");
        } else {
            int r_pick = -1, m_pick = -1;
            double gap_pick = 0.0;
            for (int r = 2; r <= 32; ++r) {
                const double hist_slack = mean_cell / (static_cast<double>(n) * r);
                const double leftover = 0.99 * budget - hist_slack;
                if (leftover <= 0.0) continue;
                const int m = static_cast<int>(std::ceil(larc / (4.0 * 0.55 * leftover)));
                const double atoms = static_cast<double>(n) * r * n * r;
                if (atoms * m > 6.5e7) continue;
                const double gap = 0.9 * (leftover - curve_quadrature_slack(pieces, m));
                if (gap > gap_pick) {
                    gap_pick = gap;
                    r_pick = r;
                    m_pick = m;
                }
            }
            if (r_pick < 0) {
                c.fail("no feasible discretization at n=" + std::to_string(n) +
                       " s=" + std::to_string(s));
                break;
            }
            est = estimate_w(p, built.net, r_pick, m_pick, &pieces, gap_pick);
            ++sinkhorn_cases;
        }

        c.expect(est.lower() <= g + 1e-12,
                 "estimate - slack exceeds guarantee at n=" + std::to_string(n) +
                     " s=" + std::to_string(s));
        c.expect(est.slack <= budget,
                 "slack " + fmt(est.slack) + " above 0.2*guarantee " + fmt(budget) + " at n=" +
                     std::to_string(n) + " s=" + std::to_string(s) + " (" + est.method + ")");
        worst_rel_slack = std::max(worst_rel_slack, est.slack / g);

        stash.nets.push_back({"c4#" + std::to_string(rep), n, built.report.size,
                              built.report.depth, static_cast<double>(pieces.piece_count()),
                              static_cast<double>(zeta_lines(pieces)), est.upper()});
    }
    c.note(std::to_string(exact_cases) + " exact + " + std::to_string(sinkhorn_cases) +
           " certified-sinkhorn cases, worst slack/guarantee " + fmt(worst_rel_slack));
    return c;
}

// Distance audit for the scaling builds: exact OT against a (possibly
// coarsened) histogram, the coarsening move folded into the slack.
void audit_scaling_net(Stash& stash, Check& c, const std::string& label, const Histogram2D& p,
                       const ReluNet& net, const BuildReport& rep,
                       const PieceDecomposition& pieces, int quad_m) {
    const int divisor = p.n > 64 ? p.n / 64 : 1;
    const Histogram2D coarse = divisor > 1 ? coarsen(p, divisor) : p;
    const int r = coarse.n >= 64 ? 1 : std::max(1, 64 / coarse.n);
    WEstimate est = estimate_w(coarse, net, r, quad_m, &pieces);
    if (divisor > 1) est.slack += std::sqrt(2.0) / coarse.n;
    c.expect(est.method == "exact", label + ": expected exact OT");
    stash.nets.push_back({label, p.n, rep.size, rep.depth,
                          static_cast<double>(pieces.piece_count()),
                          static_cast<double>(zeta_lines(pieces)), est.upper()});
}

Check criterion5_scaling(Stash& stash) {
    Check c;
    const double eps = 0.05;
    std::vector<double> ln_n, ln_deep, ln_base;
    for (int n : {16, 64, 256, 1024}) {
        const Histogram2D p = random_histogram(n, 500 + static_cast<std::uint64_t>(n), 0.4);
        const int s = choose_s(n, eps);
        const PieceDecomposition symbolic = symbolic_phi_pieces(p, s);
        {
            const BuildResult deep = build_phi(p, eps);
            audit_build(stash, "c5-deep-n" + std::to_string(n), deep.report);
            ln_n.push_back(std::log(static_cast<double>(n)));
            ln_deep.push_back(std::log(static_cast<double>(deep.report.size)));
            if (n <= 64) {
                // The structural decomposition must match direct extraction.
                const PieceDecomposition direct = extract_pieces(deep.net, 0.0, 1.0);
                c.expect(direct.piece_count() == symbolic.piece_count(),
                         "n=" + std::to_string(n) + ": symbolic pieces " +
                             std::to_string(symbolic.piece_count()) + " vs extracted " +
                             std::to_string(direct.piece_count()));
                c.expect(zeta_lines(direct) == zeta_lines(symbolic),
                         "n=" + std::to_string(n) + ": symbolic vs extracted line counts");
            }
            audit_scaling_net(stash, c, "c5-deep-n" + std::to_string(n), p, deep.net, deep.report,
                              symbolic, n >= 1024 ? 400 : 600);
        }
        {
            const BuildResult base = build_phi_baseline(p, eps);
            audit_build(stash, "c5-base-n" + std::to_string(n), base.report);
            ln_base.push_back(std::log(static_cast<double>(base.report.size)));
            audit_scaling_net(stash, c, "c5-base-n" + std::to_string(n), p, base.net, base.report,
                              symbolic, n >= 1024 ? 400 : 600);
        }
    }
    const Fit deep = least_squares(ln_n, ln_deep);
    const Fit base = least_squares(ln_n, ln_base);
    c.expect(deep.slope >= 1.35 && deep.slope <= 1.65,
             "deep log-log slope " + fmt(deep.slope) + " outside [1.35,1.65]");
    c.expect(base.slope >= 1.85 && base.slope <= 2.15,
             "baseline log-log slope " + fmt(base.slope) + " outside [1.85,2.15]");
    c.note("deep slope " + fmt(deep.slope) + ", baseline slope " + fmt(base.slope));
    return c;
}

Check criterion6_epsilon(Stash& stash) {
    Check c;
    const int n = 8;
    const Histogram2D p = random_histogram(n, 600, 0.5);
    std::vector<double> k_axis, deep_sizes, base_sizes;
    std::vector<std::pair<std::string, BuildResult>> builds;
    for (int k = 3; k <= 12; ++k) {
        const double eps = std::exp2(-k);
        BuildResult deep = build_phi(p, eps);
        BuildResult base = build_phi_baseline(p, eps);
        k_axis.push_back(static_cast<double>(k));
        deep_sizes.push_back(static_cast<double>(deep.report.size));
        base_sizes.push_back(static_cast<double>(base.report.size));
        audit_build(stash, "c6-deep-k" + std::to_string(k), deep.report);
        audit_build(stash, "c6-base-k" + std::to_string(k), base.report);
        builds.emplace_back("c6-deep-k" + std::to_string(k), std::move(deep));
        builds.emplace_back("c6-base-k" + std::to_string(k), std::move(base));
    }
    const Fit deep = least_squares(k_axis, deep_sizes);
    const Fit base = least_squares(k_axis, base_sizes);
    c.expect(deep.r2 >= 0.99, "deep size not affine in log2(1/eps), R2=" + fmt(deep.r2));
    c.expect(base.r2 >= 0.99, "baseline size not affine in log2(1/eps), R2=" + fmt(base.r2));

    // Piece and distance audits for criterion 7.
    for (const auto& [label, built] : builds) {
        const PieceDecomposition pieces = extract_pieces(built.net, 0.0, 1.0);
        const WEstimate est = estimate_w(p, built.net, 4, 400, &pieces);
        stash.nets.push_back({label, n, built.report.size, built.report.depth,
                              static_cast<double>(pieces.piece_count()),
                              static_cast<double>(zeta_lines(pieces)), est.upper()});
    }
    c.note("deep R2 " + fmt(deep.r2) + " slope " + fmt(deep.slope) + "/bit, baseline R2 " +
           fmt(base.r2));
    return c;
}

Check criterion7_zeta(const Stash& stash) {
    Check c;
    if (stash.nets.empty()) {
        c.fail("requires criteria 4-6 in the same run");
        return c;
    }
    double worst_margin = 1e300;
    for (const auto& audit : stash.nets) {
        const double logcap = log_zeta_cap(audit.size, audit.depth);
        c.expect(std::log(audit.pieces) <= logcap + 1e-9,
                 audit.label + ": pieces exceed the count cap");
        const double floor = w_floor(audit.n, std::max(1.0, audit.zlines), 2);
        c.expect(audit.upper >= floor, audit.label + ": upper bracket " + fmt(audit.upper) +
                                           " below floor " + fmt(floor));
        worst_margin = std::min(worst_margin, audit.upper / floor);
    }
    c.note(std::to_string(stash.nets.size()) + " nets audited, min upper/floor ratio " +
           fmt(worst_margin));
    return c;
}

Check criterion8_lower_bound(const Stash& stash) {
    Check c;
    if (stash.builds.empty()) {
        c.fail("requires criteria 4-6 in the same run");
        return c;
    }
    for (const auto& b : stash.builds) {
        const double lb = lower_bound_size(b.n, b.guarantee, static_cast<int>(b.depth), 2);
        c.expect(static_cast<double>(b.size) >= std::ceil(lb),
                 b.label + ": size below the depth-constrained lower bound");
    }
    const double pi = 4.0 * std::atan(1.0);
    const double via_gamma =
        2.0 * (2.0 * std::tgamma(1.5) * std::tgamma(1.5) / (pi * std::sqrt(2.0)));
    c.expect(std::fabs(c_constant(2) - 1.0 / std::sqrt(2.0)) <= 1e-12, "C(2) != 1/sqrt(2)");
    c.expect(std::fabs(c_constant(2) - via_gamma) <= 1e-12, "C(2) differs from the Gamma oracle");
    c.note(std::to_string(stash.builds.size()) + " builds checked against the Theorem-2 bound");
    return c;
}

Check criterion9_oracle_1d() {
    Check c;
    Rng rng(901);
    double worst_rel = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int n1 = 2 + static_cast<int>(rng.next_below(63));
        const int n2 = 2 + static_cast<int>(rng.next_below(63));
        const Histogram1D a =
            testutil::random_hist1d(n1, 9000 + 2 * static_cast<std::uint64_t>(rep), 0.7);
        const Histogram1D b =
            testutil::random_hist1d(n2, 9001 + 2 * static_cast<std::uint64_t>(rep), 0.7);
        const double exact = wasserstein1d(a, b);

        // Midpoint quadrature of |F_a^{-1} - F_b^{-1}| at 1e6 points, walked
        // with two segment cursors.
        const PiecewiseAffine qa = inverse_cdf(a);
        const PiecewiseAffine qb = inverse_cdf(b);
        const int pts = 1000000;
        std::size_t ia = 0, ib = 0;
        long double acc = 0.0L;
        for (int k = 0; k < pts; ++k) {
            const double u = (k + 0.5) / pts;
            while (qa.knots[ia + 1] < u) ++ia;
            while (qb.knots[ib + 1] < u) ++ib;
            const double va =
                qa.values[ia] + (u - qa.knots[ia]) / (qa.knots[ia + 1] - qa.knots[ia]) *
                                    (qa.values[ia + 1] - qa.values[ia]);
            const double vb =
                qb.values[ib] + (u - qb.knots[ib]) / (qb.knots[ib + 1] - qb.knots[ib]) *
                                    (qb.values[ib + 1] - qb.values[ib]);
            acc += std::fabs(va - vb);
        }
        const double quad = static_cast<double>(acc / pts);
        const double rel = std::fabs(exact - quad) / std::max(quad, 1e-30);
        worst_rel = std::max(worst_rel, rel);
    }
    c.expect(worst_rel <= 1e-6, "relative error " + fmt(worst_rel) + " > 1e-6");
    c.note("50 pairs, worst relative error " + fmt(worst_rel));
    return c;
}

Check criterion10_determinism(const Options& opt) {
    Check c;
    if (opt.cli_path.empty()) {
        c.fail("no --cli path given");
        return c;
    }
    namespace fs = std::filesystem;
    const fs::path tmp =
        fs::temp_directory_path() / ("histopush_accept_" + std::to_string(::getpid()));
    fs::remove_all(tmp);
    fs::create_directories(tmp / "a");
    fs::create_directories(tmp / "b");

    auto shell = [&](const std::string& args, const std::string& out_file) -> bool {
        const std::string cmd = opt.cli_path + " " + args + " > " + out_file + " 2>/dev/null";
        return std::system(cmd.c_str()) == 0;
    };
    auto same = [&](const fs::path& x, const fs::path& y) -> bool {
        return read_text_file(x.string()) == read_text_file(y.string());
    };
    auto twice = [&](const std::string& args_a, const std::string& args_b, const fs::path& fa,
                     const fs::path& fb, const std::string& what) {
        if (!shell(args_a, (tmp / "a_stdout.txt").string()) ||
            !shell(args_b, (tmp / "b_stdout.txt").string())) {
            c.fail(what + ": nonzero exit");
            return;
        }
        if (!same(fa, fb)) c.fail(what + ": outputs differ between runs");
    };

    const std::string ha = (tmp / "a" / "h.json").string();
    const std::string hb = (tmp / "b" / "h.json").string();
    twice("gen --n 4 --seed 1 --spread 0.6 --out " + ha,
          "gen --n 4 --seed 1 --spread 0.6 --out " + hb, ha, hb, "gen");

    for (const std::string variant : {"deep", "baseline"}) {
        const std::string na = (tmp / "a" / (variant + "_net.json")).string();
        const std::string nb = (tmp / "b" / (variant + "_net.json")).string();
        const std::string ra = (tmp / "a" / (variant + "_rep.json")).string();
        const std::string rb = (tmp / "b" / (variant + "_rep.json")).string();
        twice("build --hist " + ha + " --epsilon 0.1 --variant " + variant + " --out-net " + na +
                  " --out-report " + ra,
              "build --hist " + hb + " --epsilon 0.1 --variant " + variant + " --out-net " + nb +
                  " --out-report " + rb,
              na, nb, "build " + variant);
        if (c.ok && !same(ra, rb)) c.fail("build " + variant + ": reports differ");
    }

    const std::string net = (tmp / "a" / "deep_net.json").string();
    const std::string rep = (tmp / "a" / "deep_rep.json").string();
    twice("eval --net " + net + " --grid 7", "eval --net " + net + " --grid 7",
          tmp / "a_stdout.txt", tmp / "b_stdout.txt", "eval");
    twice("sample --hist " + ha + " --count 50 --seed 9",
          "sample --hist " + ha + " --count 50 --seed 9", tmp / "a_stdout.txt",
          tmp / "b_stdout.txt", "sample");
    twice("pieces --net " + net, "pieces --net " + net, tmp / "a_stdout.txt", tmp / "b_stdout.txt",
          "pieces");
    twice("distance --hist " + ha + " --net " + net + " --r 4 --m 300 --report " + rep,
          "distance --hist " + ha + " --net " + net + " --r 4 --m 300 --report " + rep,
          tmp / "a_stdout.txt", tmp / "b_stdout.txt", "distance");
    twice("bounds --n 8 --epsilon 0.05 --L 3", "bounds --n 8 --epsilon 0.05 --L 3",
          tmp / "a_stdout.txt", tmp / "b_stdout.txt", "bounds");

    const std::string cases = (tmp / "cases.csv").string();
    write_text_file(cases, "n,epsilon\n4,0.1\n8,0.05\n");
    const std::string ta = (tmp / "a" / "t.csv").string();
    const std::string tb = (tmp / "b" / "t.csv").string();
    twice("table --cases " + cases + " --out " + ta, "table --cases " + cases + " --out " + tb, ta,
          tb, "table");

    // Serialize/deserialize round trip with zero-ulp evaluation drift.
    if (c.ok) {
        const ReluNet loaded = deserialize_net(read_text_file(net));
        const ReluNet again = deserialize_net(serialize_net(loaded));
        for (int k = 0; k < 1000; ++k) {
            const double x = (k + 0.5) / 1000.0;
            const auto y1 = eval_net(loaded, x);
            const auto y2 = eval_net(again, x);
            if (y1[0] != y2[0] || y1[1] != y2[1]) {
                c.fail("round-trip eval drift at x=" + fmt(x));
                break;
            }
        }
    }
    fs::remove_all(tmp);
    c.note("all subcommands byte-identical across reruns; round-trip drift 0 ulp");
    return c;
}

}  // namespace

bool run(const Options& opt) {
    Stash stash;
    struct Entry {
        int id;
        const char* name;
        std::function<Check()> fn;
    };
    const std::vector<Entry> entries = {
        {1, "combinator algebra", [&] { return criterion1_combinators(); }},
        {2, "sawtooth construction", [&] { return criterion2_sawtooth(); }},
        {3, "spline realization", [&] { return criterion3_spline(); }},
        {4, "pushforward distance guarantee", [&] { return criterion4_guarantee(stash); }},
        {5, "size scaling in n", [&] { return criterion5_scaling(stash); }},
        {6, "size scaling in epsilon", [&] { return criterion6_epsilon(stash); }},
        {7, "piece-count cap and distance floor", [&] { return criterion7_zeta(stash); }},
        {8, "size lower bound consistency", [&] { return criterion8_lower_bound(stash); }},
        {9, "one-dimensional distance oracle", [&] { return criterion9_oracle_1d(); }},
        {10, "determinism and round-trip", [&] { return criterion10_determinism(opt); }},
    };

    bool all_ok = true;
    for (const auto& entry : entries) {
        if (opt.only != 0 && entry.id != opt.only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Check c;
        try {
            c = entry.fn();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("CRITERION %d: %s %s (%s) [%.1f s]\n", entry.id, c.ok ? "PASS" : "FAIL",
                    entry.name, c.detail.c_str(), secs);
        std::fflush(stdout);
        all_ok = all_ok && c.ok;
    }
    std::printf(all_ok ? "ACCEPTANCE: PASS\n" : "ACCEPTANCE: FAIL\n");
    return all_ok;
}

}  // namespace histopush::acceptance
