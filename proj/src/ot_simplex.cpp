#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "histopush/errors.hpp"
#include "histopush/transport.hpp"

namespace histopush {

namespace {

// Transportation network simplex on the dense bipartite graph. Nodes
// 0..R-1 are the mu atoms, R..R+C-1 the nu atoms; a basis is a spanning
// tree of R+C-1 row-col arcs. Supplies carry a tiny strictly increasing
// perturbation so no pivot is degenerate; the perturbation changes masses
// only, so the optimal basis it produces is optimal for the real masses
// too, and the final flows are re-solved on the real masses.
struct Simplex {
    int nr, nc, nodes;
    std::vector<double> cost;     // nr*nc
    std::vector<double> supply;   // perturbed
    std::vector<double> demand;
    struct Arc {
        int u, v;   // row node, col node (v already offset by nr)
        double flow;
    };
    std::vector<Arc> basis;
    std::vector<std::vector<int>> adj;  // node -> basis indices
    std::vector<int> parent, parc, depth, order;
    std::vector<double> pot;

    double c(int i, int j) const { return cost[static_cast<std::size_t>(i) * nc + j]; }

    void northwest_start() {
        basis.reserve(static_cast<std::size_t>(nodes) - 1);
        int i = 0, j = 0;
        double ra = supply[0], rb = demand[0];
        while (true) {
            const double f = std::min(ra, rb);
            basis.push_back({i, nr + j, f});
            if (i == nr - 1 && j == nc - 1) break;
            if (ra <= rb && i < nr - 1) {
                rb -= ra;
                ra = supply[static_cast<std::size_t>(++i)];
            } else {
                ra -= rb;
                rb = demand[static_cast<std::size_t>(++j)];
            }
        }
        if (static_cast<int>(basis.size()) != nodes - 1) {
            throw InternalError("exact_ot: degenerate initial basis");
        }
    }

    void rebuild_tree() {
        parent.assign(static_cast<std::size_t>(nodes), -1);
        parc.assign(static_cast<std::size_t>(nodes), -1);
        depth.assign(static_cast<std::size_t>(nodes), 0);
        pot.assign(static_cast<std::size_t>(nodes), 0.0);
        order.clear();
        order.reserve(static_cast<std::size_t>(nodes));
        std::vector<char> seen(static_cast<std::size_t>(nodes), 0);
        order.push_back(0);
        seen[0] = 1;
        for (std::size_t head = 0; head < order.size(); ++head) {
            const int x = order[head];
            for (int e : adj[static_cast<std::size_t>(x)]) {
                const Arc& a = basis[static_cast<std::size_t>(e)];
                const int y = a.u == x ? a.v : a.u;
                if (seen[static_cast<std::size_t>(y)]) continue;
                seen[static_cast<std::size_t>(y)] = 1;
                parent[static_cast<std::size_t>(y)] = x;
                parc[static_cast<std::size_t>(y)] = e;
                depth[static_cast<std::size_t>(y)] = depth[static_cast<std::size_t>(x)] + 1;
                pot[static_cast<std::size_t>(y)] =
                    c(a.u, a.v - nr) - pot[static_cast<std::size_t>(x)];
                order.push_back(y);
            }
        }
        if (static_cast<int>(order.size()) != nodes) {
            throw InternalError("exact_ot: basis is not a spanning tree");
        }
    }

    double reduced(int i, int j) const {
        return c(i, j) - pot[static_cast<std::size_t>(i)] - pot[static_cast<std::size_t>(nr) + j];
    }

    void adj_remove(int node, int e) {
        auto& lst = adj[static_cast<std::size_t>(node)];
        for (std::size_t k = 0; k < lst.size(); ++k) {
            if (lst[k] == e) {
                lst[k] = lst.back();
                lst.pop_back();
                return;
            }
        }
        throw InternalError("exact_ot: adjacency corrupted");
    }

    void solve() {
        adj.assign(static_cast<std::size_t>(nodes), {});
        for (std::size_t e = 0; e < basis.size(); ++e) {
            adj[static_cast<std::size_t>(basis[e].u)].push_back(static_cast<int>(e));
            adj[static_cast<std::size_t>(basis[e].v)].push_back(static_cast<int>(e));
        }
        rebuild_tree();

        const long long total = static_cast<long long>(nr) * nc;
        const long long block = std::max<long long>(1024, total / 128);
        const double enter_tol = -1e-11;
        long long scan = 0;
        const long long pivot_cap = 200LL * nodes + 100000;
        std::vector<int> path_arcs;
        std::vector<int> path_sign;

        for (long long pivots = 0;; ++pivots) {
            if (pivots > pivot_cap) throw InternalError("exact_ot: pivot limit hit");
            // Entering arc: most negative reduced cost within the first
            // block (rolling start) that contains any negative one.
            int ei = -1, ej = -1;
            {
                double best = enter_tol;
                long long seen_arcs = 0;
                while (seen_arcs < total) {
                    const long long stop = std::min(total, seen_arcs + block);
                    for (; seen_arcs < stop; ++seen_arcs, ++scan) {
                        if (scan == total) scan = 0;
                        const int i = static_cast<int>(scan / nc);
                        const int j = static_cast<int>(scan % nc);
                        const double rc = reduced(i, j);
                        if (rc < best) {
                            best = rc;
                            ei = i;
                            ej = j;
                        }
                    }
                    if (ei >= 0) break;
                }
            }
            if (ei < 0) break;  // optimal

            // Cycle: entering (ei -> nr+ej) plus the tree path between its
            // endpoints. Walking up from either endpoint, even-positioned
            // arcs lose theta and odd-positioned arcs gain it.
            path_arcs.clear();
            path_sign.clear();
            int x = ei, y = nr + ej;
            int kx = 0, ky = 0;
            auto push_x = [&]() {
                path_arcs.push_back(parc[static_cast<std::size_t>(x)]);
                path_sign.push_back(kx++ % 2 == 0 ? -1 : 1);
                x = parent[static_cast<std::size_t>(x)];
            };
            auto push_y = [&]() {
                path_arcs.push_back(parc[static_cast<std::size_t>(y)]);
                path_sign.push_back(ky++ % 2 == 0 ? -1 : 1);
                y = parent[static_cast<std::size_t>(y)];
            };
            while (depth[static_cast<std::size_t>(x)] > depth[static_cast<std::size_t>(y)]) push_x();
            while (depth[static_cast<std::size_t>(y)] > depth[static_cast<std::size_t>(x)]) push_y();
            while (x != y) {
                push_x();
                push_y();
            }

            double theta = -1.0;
            int leave_pos = -1;
            for (std::size_t k = 0; k < path_arcs.size(); ++k) {
                if (path_sign[k] > 0) continue;
                const double f = basis[static_cast<std::size_t>(path_arcs[k])].flow;
                if (theta < 0.0 || f < theta) {
                    theta = f;
                    leave_pos = static_cast<int>(k);
                }
            }
            if (leave_pos < 0) throw InternalError("exact_ot: unbounded cycle");

            for (std::size_t k = 0; k < path_arcs.size(); ++k) {
                basis[static_cast<std::size_t>(path_arcs[k])].flow += path_sign[k] * theta;
            }
            const int le = path_arcs[static_cast<std::size_t>(leave_pos)];
            Arc& slot = basis[static_cast<std::size_t>(le)];
            adj_remove(slot.u, le);
            adj_remove(slot.v, le);
            slot = {ei, nr + ej, theta};
            adj[static_cast<std::size_t>(ei)].push_back(le);
            adj[static_cast<std::size_t>(nr) + ej].push_back(le);
            rebuild_tree();
        }
    }

    // Flows on the final tree for the given (unperturbed) masses, by leaf
    // elimination in reverse BFS order.
    void resolve_flows(const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> residual(static_cast<std::size_t>(nodes));
        for (int i = 0; i < nr; ++i) residual[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)];
        for (int j = 0; j < nc; ++j) residual[static_cast<std::size_t>(nr) + j] = b[static_cast<std::size_t>(j)];
        for (std::size_t k = order.size(); k-- > 1;) {
            const int x = order[k];
            const int e = parc[static_cast<std::size_t>(x)];
            double f = residual[static_cast<std::size_t>(x)];
            if (f < 0.0) {
                if (f < -1e-9) throw InternalError("exact_ot: negative flow");
                f = 0.0;
            }
            basis[static_cast<std::size_t>(e)].flow = f;
            residual[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])] -= f;
        }
    }
};

}  // namespace

DiscreteMeasure make_discrete_measure(std::vector<std::array<double, 2>> points,
                                      std::vector<double> masses) {
    if (points.size() != masses.size() || points.empty()) {
        throw ShapeMismatch("discrete measure: points/masses must have equal positive length");
    }
    long double s = 0.0L;
    for (double m : masses) {
        if (m < 0.0) throw DomainError("discrete measure: negative mass");
        s += m;
    }
    if (std::fabs(static_cast<double>(s) - 1.0) > 1e-9) {
        throw BadNormalization("discrete measure: masses must sum to 1");
    }
    return DiscreteMeasure{std::move(points), std::move(masses)};
}

TransportPlan exact_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    const int nr = mu.size(), nc = nu.size();
    if (nr > 5000 || nc > 5000) {
        throw TooLarge("exact_ot: supports capped at 5000 atoms each");
    }
    long double sa = 0.0L, sb = 0.0L;
    for (double m : mu.masses) sa += m;
    for (double m : nu.masses) sb += m;
    if (std::fabs(static_cast<double>(sa - sb)) > 1e-7) {
        throw InfeasibleMass("exact_ot: total masses differ by more than 1e-7");
    }

    Simplex sx;
    sx.nr = nr;
    sx.nc = nc;
    sx.nodes = nr + nc;
    sx.cost.resize(static_cast<std::size_t>(nr) * nc);
    for (int i = 0; i < nr; ++i) {
        const double xi = mu.points[static_cast<std::size_t>(i)][0];
        const double yi = mu.points[static_cast<std::size_t>(i)][1];
        for (int j = 0; j < nc; ++j) {
            sx.cost[static_cast<std::size_t>(i) * nc + j] =
                std::hypot(xi - nu.points[static_cast<std::size_t>(j)][0],
                           yi - nu.points[static_cast<std::size_t>(j)][1]);
        }
    }

    // Balance demands onto the supply total, then perturb.
    std::vector<double> a = mu.masses, b(static_cast<std::size_t>(nc));
    const double rescale = static_cast<double>(sa / sb);
    for (int j = 0; j < nc; ++j) b[static_cast<std::size_t>(j)] = nu.masses[static_cast<std::size_t>(j)] * rescale;
    sx.supply = a;
    sx.demand = b;
    const double eta = static_cast<double>(sa) * 1e-12 / (nr + 1);
    long double bump = 0.0L;
    for (int i = 0; i < nr; ++i) {
        sx.supply[static_cast<std::size_t>(i)] += eta * (i + 1);
        bump += eta * (i + 1);
    }
    sx.demand.back() += static_cast<double>(bump);

    sx.northwest_start();
    sx.solve();
    sx.resolve_flows(a, b);

    // Certificate: dual feasibility everywhere, marginals recovered.
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nc; ++j) {
            if (sx.reduced(i, j) < -1e-7) {
                throw InternalError("exact_ot: dual certificate failed");
            }
        }
    }
    std::vector<double> rowsum(static_cast<std::size_t>(nr), 0.0), colsum(static_cast<std::size_t>(nc), 0.0);
    TransportPlan plan;
    long double cost = 0.0L;
    for (const auto& arc : sx.basis) {
        rowsum[static_cast<std::size_t>(arc.u)] += arc.flow;
        colsum[static_cast<std::size_t>(arc.v - nr)] += arc.flow;
        cost += static_cast<long double>(arc.flow) * sx.c(arc.u, arc.v - nr);
        if (arc.flow > 0.0) plan.entries.push_back({arc.u, arc.v - nr, arc.flow});
    }
    for (int i = 0; i < nr; ++i) {
        if (std::fabs(rowsum[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)]) > 1e-7) {
            throw InternalError("exact_ot: row marginal violated");
        }
    }
    for (int j = 0; j < nc; ++j) {
        if (std::fabs(colsum[static_cast<std::size_t>(j)] - b[static_cast<std::size_t>(j)]) > 1e-7) {
            throw InternalError("exact_ot: column marginal violated");
        }
    }
    plan.cost = static_cast<double>(cost);
    return plan;
}

}  // namespace histopush
