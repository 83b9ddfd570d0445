#include "histopush/relunet.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "histopush/errors.hpp"
#include "histopush/pieces.hpp"

namespace histopush {

Matrix Matrix::zeros(int rows, int cols) {
    Matrix m;
    m.rows = rows;
    m.cols = cols;
    m.dense.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m;
    m.rows = static_cast<int>(rows.size());
    m.cols = rows.empty() ? 0 : static_cast<int>(rows.front().size());
    m.dense.reserve(static_cast<std::size_t>(m.rows) * m.cols);
    for (const auto& r : rows) {
        if (r.size() != static_cast<std::size_t>(m.cols)) {
            throw ShapeMismatch("matrix: ragged rows");
        }
        m.dense.insert(m.dense.end(), r.begin(), r.end());
    }
    return m;
}

Matrix Matrix::sparse_from_triplets(int rows, int cols,
                                    std::vector<std::vector<std::pair<int, double>>> row_entries) {
    Matrix m;
    m.rows = rows;
    m.cols = cols;
    m.sparse = true;
    m.rptr.resize(static_cast<std::size_t>(rows) + 1, 0);
    std::size_t nnz = 0;
    for (const auto& r : row_entries) nnz += r.size();
    m.cidx.reserve(nnz);
    m.vals.reserve(nnz);
    for (int i = 0; i < rows; ++i) {
        auto& r = row_entries[static_cast<std::size_t>(i)];
        std::sort(r.begin(), r.end());
        for (const auto& [j, v] : r) {
            m.cidx.push_back(j);
            m.vals.push_back(v);
        }
        m.rptr[static_cast<std::size_t>(i) + 1] = static_cast<int>(m.cidx.size());
    }
    return m;
}

double Matrix::at(int i, int j) const {
    if (!sparse) return dense[static_cast<std::size_t>(i) * cols + j];
    for (int k = rptr[static_cast<std::size_t>(i)]; k < rptr[static_cast<std::size_t>(i) + 1]; ++k) {
        if (cidx[static_cast<std::size_t>(k)] == j) return vals[static_cast<std::size_t>(k)];
    }
    return 0.0;
}

double& Matrix::mut(int i, int j) {
    return dense[static_cast<std::size_t>(i) * cols + j];
}

void Matrix::matvec(const double* x, double* y) const {
    if (!sparse) {
        const double* row = dense.data();
        for (int i = 0; i < rows; ++i, row += cols) {
            double acc = 0.0;
            for (int j = 0; j < cols; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
        return;
    }
    for (int i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (int k = rptr[static_cast<std::size_t>(i)]; k < rptr[static_cast<std::size_t>(i) + 1]; ++k) {
            acc += vals[static_cast<std::size_t>(k)] * x[cidx[static_cast<std::size_t>(k)]];
        }
        y[i] = acc;
    }
}

int net_size(const ReluNet& net) {
    int n = 0;
    for (const auto& l : net.layers) n += l.out_dim();
    return n;
}

int net_depth(const ReluNet& net) { return static_cast<int>(net.layers.size()); }

std::vector<double> eval_net(const ReluNet& net, const std::vector<double>& x) {
    if (net.layers.empty()) throw DimensionMismatch("eval_net: empty net");
    if (static_cast<int>(x.size()) != net.in_dim()) {
        throw DimensionMismatch("eval_net: input has dim " + std::to_string(x.size()) +
                                ", net expects " + std::to_string(net.in_dim()));
    }
    std::vector<double> cur = x, next;
    const std::size_t last = net.layers.size() - 1;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        next.assign(static_cast<std::size_t>(layer.out_dim()), 0.0);
        layer.matrix.matvec(cur.data(), next.data());
        for (int i = 0; i < layer.out_dim(); ++i) next[static_cast<std::size_t>(i)] += layer.bias[static_cast<std::size_t>(i)];
        if (l != last) {
            for (auto& v : next) v = v > 0.0 ? v : 0.0;
        }
        cur.swap(next);
    }
    return cur;
}

std::vector<double> eval_net(const ReluNet& net, double x) {
    return eval_net(net, std::vector<double>{x});
}

double eval_net_scalar(const ReluNet& net, double x) {
    const auto y = eval_net(net, std::vector<double>{x});
    if (y.size() != 1) throw DimensionMismatch("eval_net_scalar: net output is not scalar");
    return y[0];
}

ReluNet identity_net() {
    ReluNet net;
    net.layers.push_back({Matrix::from_rows({{1.0}}), {0.0}});
    return net;
}

ReluNet pass(const ReluNet& net, int l_target) {
    if (net.out_dim() != 1) throw DimensionMismatch("pass: scalar output required");
    if (l_target < net_depth(net)) {
        throw DepthTooSmall("pass: target depth " + std::to_string(l_target) + " below current " +
                            std::to_string(net_depth(net)));
    }
    ReluNet out = net;
    for (int l = net_depth(net); l < l_target; ++l) {
        out.layers.push_back({Matrix::from_rows({{1.0}}), {0.0}});
    }
    return out;
}

ReluNet parallel(const ReluNet& f, const ReluNet& g) {
    if (f.in_dim() != 1 || g.in_dim() != 1) {
        throw InputDimMismatch("parallel: both nets must take scalar input");
    }
    const int lf = net_depth(f), lg = net_depth(g);
    const ReluNet& ftop = lf >= lg ? f : g;
    const ReluNet fpad = lf >= lg ? f : pass(f, lg);
    const ReluNet gpad = lf >= lg ? pass(g, lf) : g;
    (void)ftop;

    ReluNet out;
    const int depth = std::max(lf, lg);
    for (int l = 0; l < depth; ++l) {
        const AffineLayer& a = fpad.layers[static_cast<std::size_t>(l)];
        const AffineLayer& b = gpad.layers[static_cast<std::size_t>(l)];
        const int in = l == 0 ? 1 : a.in_dim() + b.in_dim();
        Matrix m = Matrix::zeros(a.out_dim() + b.out_dim(), in);
        std::vector<double> bias(static_cast<std::size_t>(a.out_dim() + b.out_dim()));
        for (int i = 0; i < a.out_dim(); ++i) {
            for (int j = 0; j < a.in_dim(); ++j) m.mut(i, j) = a.matrix.at(i, j);
            bias[static_cast<std::size_t>(i)] = a.bias[static_cast<std::size_t>(i)];
        }
        const int roff = a.out_dim();
        const int coff = l == 0 ? 0 : a.in_dim();
        for (int i = 0; i < b.out_dim(); ++i) {
            for (int j = 0; j < b.in_dim(); ++j) m.mut(roff + i, coff + j) = b.matrix.at(i, j);
            bias[static_cast<std::size_t>(roff + i)] = b.bias[static_cast<std::size_t>(i)];
        }
        out.layers.push_back({std::move(m), std::move(bias)});
    }
    return out;
}

ReluNet compose(const ReluNet& f, const ReluNet& g, double p, double q) {
    if (f.in_dim() != 1) throw DimensionMismatch("compose: f must take scalar input");
    if (g.out_dim() != 1) throw DimensionMismatch("compose: g must produce scalar output");

    const AffineLayer& gout = g.layers.back();
    const AffineLayer& fin = f.layers.front();
    const int m1 = fin.out_dim();
    const int k = gout.in_dim();

    // Fused map: y = A_f * (p * (A_g x + b_g) + q) + b_f.
    Matrix merged = Matrix::zeros(m1, k);
    std::vector<double> bias(static_cast<std::size_t>(m1));
    for (int i = 0; i < m1; ++i) {
        const double af = fin.matrix.at(i, 0);
        for (int j = 0; j < k; ++j) merged.mut(i, j) = af * p * gout.matrix.at(0, j);
        bias[static_cast<std::size_t>(i)] =
            af * (p * gout.bias[0] + q) + fin.bias[static_cast<std::size_t>(i)];
    }

    ReluNet out;
    for (std::size_t l = 0; l + 1 < g.layers.size(); ++l) out.layers.push_back(g.layers[l]);
    out.layers.push_back({std::move(merged), std::move(bias)});
    for (std::size_t l = 1; l < f.layers.size(); ++l) out.layers.push_back(f.layers[l]);
    return out;
}

ReluNet sawtooth(int s) {
    if (s < 1) throw DomainError("sawtooth: s must be >= 1");
    ReluNet g1;
    g1.layers.push_back({Matrix::from_rows({{1.0}, {1.0}, {1.0}}), {0.0, -0.5, -1.0}});
    g1.layers.push_back({Matrix::from_rows({{2.0, -4.0, 2.0}}), {0.0}});
    ReluNet net = g1;
    for (int i = 1; i < s; ++i) net = compose(net, g1, 1.0, 0.0);
    return net;
}

ReluNet spline_shallow(const PiecewiseAffine& f_in) {
    const PiecewiseAffine f = simplify(f_in);
    const int m = f.breakpoints();
    Matrix hidden = Matrix::zeros(m + 1, 1);
    std::vector<double> hbias(static_cast<std::size_t>(m) + 1);
    hidden.mut(0, 0) = 1.0;
    hbias[0] = 0.0;
    for (int j = 1; j <= m; ++j) {
        hidden.mut(j, 0) = 1.0;
        hbias[static_cast<std::size_t>(j)] = -f.knots[static_cast<std::size_t>(j)];
    }
    Matrix outm = Matrix::zeros(1, m + 1);
    outm.mut(0, 0) = pwl_slope(f, 0);
    for (int j = 1; j <= m; ++j) outm.mut(0, j) = pwl_slope(f, j) - pwl_slope(f, j - 1);
    ReluNet net;
    net.layers.push_back({std::move(hidden), std::move(hbias)});
    net.layers.push_back({std::move(outm), {f.values.front()}});
    return net;
}

namespace {

// --- deep spline construction ----------------------------------------------
//
// The net is a chain of two-layer blocks of width W. Every hidden layer
// reserves unit 0 for the input x and unit 1 for a shifted running sum; the
// other W-2 units are free. Each block realizes the slope changes of up to
// (W-2)*floor((W-2)/6) consecutive breakpoints of the target:
//
//   * up to W-2 breakpoints become first-layer hinge units ReLU(x - beta_j),
//     absorbed into the running sum with signed weights;
//   * the remaining breakpoints are realized as zero crossings of
//     second-layer units ReLU(u_b(x)), where each u_b is a zigzag whose only
//     kinks sit on the shared grid {beta_j}. A crossing contributes a slope
//     change of |u_b'| with the sign of the unit's output weight, so each
//     unit serves breakpoints of one sign; crossings of one unit are kept in
//     non-adjacent grid cells so the zigzag can turn between them. Kinks the
//     zigzags introduce at grid points are cancelled by adjusting the
//     first-layer absorption weights.

struct KinkTarget {
    double pos;
    double dslope;
};

struct UnitPlan {
    std::vector<double> uvals;  // value of u_b at {0, beta..., 1}
    double wsign = 1.0;         // output weight (sign of the served slope changes)
};

struct BlockPlan {
    std::vector<double> beta;   // first-layer hinge positions (the shared grid)
    std::vector<double> omega;  // absorption weight per hinge, after cancellation
    std::vector<UnitPlan> units;
};

// Values of the zigzag u at all block knots {0, beta..., 1}: pinned on the
// walls of crossing cells, interpolated between pins, constant outside.
std::vector<double> zigzag_values(const std::vector<double>& knots,
                                  const std::vector<std::tuple<int, double, double>>& crossings) {
    const std::size_t nk = knots.size();
    std::vector<double> v(nk, 0.0);
    std::vector<bool> pinned(nk, false);
    double dir = 1.0;
    for (const auto& [cell, x, mag] : crossings) {
        const std::size_t l = static_cast<std::size_t>(cell);
        v[l] = dir * mag * (knots[l] - x);
        v[l + 1] = dir * mag * (knots[l + 1] - x);
        pinned[l] = pinned[l + 1] = true;
        dir = -dir;
    }
    std::vector<std::size_t> pins;
    for (std::size_t i = 0; i < nk; ++i) {
        if (pinned[i]) pins.push_back(i);
    }
    if (pins.empty()) {
        std::fill(v.begin(), v.end(), -1.0);  // idle unit
        return v;
    }
    for (std::size_t i = 0; i < pins.front(); ++i) v[i] = v[pins.front()];
    for (std::size_t i = pins.back() + 1; i < nk; ++i) v[i] = v[pins.back()];
    for (std::size_t pi = 0; pi + 1 < pins.size(); ++pi) {
        const std::size_t a = pins[pi], b = pins[pi + 1];
        for (std::size_t i = a + 1; i < b; ++i) {
            const double t = (knots[i] - knots[a]) / (knots[b] - knots[a]);
            v[i] = v[a] + t * (v[b] - v[a]);
        }
    }
    return v;
}

BlockPlan plan_block(const std::vector<KinkTarget>& kinks, int r, int t) {
    BlockPlan plan;
    const int m = static_cast<int>(kinks.size());

    if (m <= r) {
        for (const auto& k : kinks) {
            plan.beta.push_back(k.pos);
            plan.omega.push_back(k.dslope);
        }
        return plan;
    }

    // Grid: every t-th breakpoint. The rest are cell interiors.
    const int g = m / t;
    std::vector<KinkTarget> grid;
    std::vector<std::vector<KinkTarget>> cell(static_cast<std::size_t>(g) + 1);
    {
        int next_grid = t - 1;
        int c = 0;
        for (int i = 0; i < m; ++i) {
            if (i == next_grid && static_cast<int>(grid.size()) < g) {
                grid.push_back(kinks[static_cast<std::size_t>(i)]);
                next_grid += t;
                ++c;
            } else {
                cell[static_cast<std::size_t>(c)].push_back(kinks[static_cast<std::size_t>(i)]);
            }
        }
    }

    plan.beta.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) plan.beta[j] = grid[j].pos;

    // Block knots {0, beta..., 1}; cell c spans knots[c]..knots[c+1].
    std::vector<double> knots;
    knots.push_back(0.0);
    knots.insert(knots.end(), plan.beta.begin(), plan.beta.end());
    knots.push_back(1.0);

    // Assign interiors: key = (sign, cell parity, within-cell rank of that
    // sign). One unit never gets two crossings in the same or adjacent
    // cells, and all its crossings share a sign.
    std::map<std::tuple<int, int, int>, std::vector<std::tuple<int, double, double>>> assignment;
    for (int c = 0; c <= g; ++c) {
        int rank_pos = 0, rank_neg = 0;
        for (const auto& k : cell[static_cast<std::size_t>(c)]) {
            const int sign = k.dslope > 0.0 ? 1 : -1;
            const int rank = sign > 0 ? rank_pos++ : rank_neg++;
            assignment[{sign, c % 2, rank}].push_back({c, k.pos, std::fabs(k.dslope)});
        }
    }
    if (static_cast<int>(assignment.size()) > r) {
        throw InternalError("spline_deep: unit budget exceeded");
    }

    for (const auto& [key, crossings] : assignment) {
        UnitPlan u;
        u.wsign = static_cast<double>(std::get<0>(key));
        u.uvals = zigzag_values(knots, crossings);
        plan.units.push_back(std::move(u));
    }

    // Cancel the kinks the zigzags leave on the grid. The slope change of
    // ReLU(u) at an interior knot is the kink of u there when u > 0, else 0.
    plan.omega.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double parasite = 0.0;
        for (const auto& u : plan.units) {
            if (u.uvals[j + 1] <= 0.0) continue;
            const double sl = (u.uvals[j + 1] - u.uvals[j]) / (knots[j + 1] - knots[j]);
            const double sr = (u.uvals[j + 2] - u.uvals[j + 1]) / (knots[j + 2] - knots[j + 1]);
            parasite += u.wsign * (sr - sl);
        }
        plan.omega[j] = grid[j].dslope - parasite;
    }
    return plan;
}

}  // namespace

ReluNet spline_deep(const PiecewiseAffine& f_in, int w) {
    if (w < 8) throw WidthTooSmall("spline_deep: W must be >= 8");
    const PiecewiseAffine f = simplify(f_in);
    const int m = f.breakpoints();
    const double f0 = f.values.front();
    const double s0 = pwl_slope(f, 0);

    if (m == 0) {
        Matrix hidden = Matrix::zeros(w, 1);
        hidden.mut(0, 0) = 1.0;
        Matrix out = Matrix::zeros(1, w);
        out.mut(0, 0) = s0;
        ReluNet net;
        net.layers.push_back({std::move(hidden), std::vector<double>(static_cast<std::size_t>(w), 0.0)});
        net.layers.push_back({std::move(out), {f0}});
        return net;
    }

    const int r = w - 2;
    const int t = (w - 2) / 6;
    const int m_w = r * t;
    const int blocks = (m + m_w - 1) / m_w;

    std::vector<KinkTarget> kinks(static_cast<std::size_t>(m));
    for (int j = 1; j <= m; ++j) {
        kinks[static_cast<std::size_t>(j - 1)] = {f.knots[static_cast<std::size_t>(j)],
                                                  pwl_slope(f, j) - pwl_slope(f, j - 1)};
    }

    std::vector<BlockPlan> plans;
    plans.reserve(static_cast<std::size_t>(blocks));
    for (int b = 0; b < blocks; ++b) {
        const int lo = b * m_w;
        const int hi = std::min(m, lo + m_w);
        plans.push_back(plan_block({kinks.begin() + lo, kinks.begin() + hi}, r, t));
    }

    // Offset keeping the running-sum channel nonnegative through ReLUs.
    double big = 1.0;
    for (const auto& plan : plans) {
        for (double o : plan.omega) big += std::fabs(o);
        for (const auto& u : plan.units) {
            double umax = 0.0;
            for (double v : u.uvals) umax = std::max(umax, v);
            big += umax;
        }
    }

    ReluNet net;
    const std::size_t sw = static_cast<std::size_t>(w);
    for (int b = 0; b < blocks; ++b) {
        const BlockPlan& plan = plans[static_cast<std::size_t>(b)];
        const std::size_t nbeta = plan.beta.size();

        // Layer A: x channel, running sum (absorbing the previous block's
        // units), and this block's hinges.
        {
            Matrix mat = Matrix::zeros(w, b == 0 ? 1 : w);
            std::vector<double> bias(sw, 0.0);
            mat.mut(0, 0) = 1.0;
            if (b == 0) {
                bias[1] = big;
            } else {
                mat.mut(1, 1) = 1.0;
                const BlockPlan& prev = plans[static_cast<std::size_t>(b - 1)];
                for (std::size_t u = 0; u < prev.units.size(); ++u) {
                    mat.mut(1, 2 + static_cast<int>(u)) = prev.units[u].wsign;
                }
            }
            for (std::size_t j = 0; j < nbeta; ++j) {
                mat.mut(2 + static_cast<int>(j), 0) = 1.0;
                bias[2 + j] = -plan.beta[j];
            }
            net.layers.push_back({std::move(mat), std::move(bias)});
        }

        // Layer B: channels plus the zigzag units.
        {
            Matrix mat = Matrix::zeros(w, w);
            std::vector<double> bias(sw, 0.0);
            mat.mut(0, 0) = 1.0;
            mat.mut(1, 1) = 1.0;
            for (std::size_t j = 0; j < nbeta; ++j) mat.mut(1, 2 + static_cast<int>(j)) = plan.omega[j];
            for (std::size_t u = 0; u < plan.units.size(); ++u) {
                const auto& uv = plan.units[u].uvals;
                const int row = 2 + static_cast<int>(u);
                bias[static_cast<std::size_t>(row)] = uv[0];
                double prev_slope = 0.0;
                for (std::size_t c = 0; c <= nbeta; ++c) {
                    const double left = c == 0 ? 0.0 : plan.beta[c - 1];
                    const double right = c == nbeta ? 1.0 : plan.beta[c];
                    const double slope = (uv[c + 1] - uv[c]) / (right - left);
                    if (c == 0) {
                        mat.mut(row, 0) = slope;
                    } else {
                        mat.mut(row, 2 + static_cast<int>(c - 1)) = slope - prev_slope;
                    }
                    prev_slope = slope;
                }
            }
            net.layers.push_back({std::move(mat), std::move(bias)});
        }
    }

    // Output: shifted sum plus the last block's units plus the affine base.
    {
        Matrix mat = Matrix::zeros(1, w);
        mat.mut(0, 0) = s0;
        mat.mut(0, 1) = 1.0;
        const BlockPlan& last = plans.back();
        for (std::size_t u = 0; u < last.units.size(); ++u) {
            mat.mut(0, 2 + static_cast<int>(u)) = last.units[u].wsign;
        }
        net.layers.push_back({std::move(mat), {f0 - big}});
    }
    return net;
}

ReluNet add(const std::vector<ReluNet>& nets,
            const std::optional<std::vector<double>>& output_bounds) {
    if (nets.empty()) throw EmptyList("add: empty list");
    for (const auto& n : nets) {
        if (n.in_dim() != 1 || n.out_dim() != 1) {
            throw DimensionMismatch("add: all nets must be scalar to scalar");
        }
    }
    if (nets.size() == 1) return nets.front();

    double big = 1.0;
    if (output_bounds) {
        if (output_bounds->size() != nets.size()) {
            throw ShapeMismatch("add: one output bound per net required");
        }
        for (double b : *output_bounds) big += std::fabs(b);
    } else {
        for (const auto& n : nets) {
            big += max_abs_value(extract_pieces(n, 0.0, 1.0));
        }
    }

    // Series chain. Each emitted hidden layer is [net units..., x, sum+big].
    // A net's output map is folded into the sum channel at the next block
    // boundary; depth-1 nets contribute through the x channel alone.
    ReluNet out;
    int prev_units = -1;          // units of the previous emitted layer, -1 = at input
    const ReluNet* emitted = nullptr;  // net whose output is pending on those units
    std::vector<const ReluNet*> pending;  // depth-1 nets not yet folded

    auto fold_sum_row = [&](Matrix& mat, std::vector<double>& bias, int row, int xcol, int scol) {
        if (scol >= 0) {
            mat.mut(row, scol) = 1.0;
        } else {
            bias[static_cast<std::size_t>(row)] += big;
        }
        if (emitted) {
            const AffineLayer& last = emitted->layers.back();
            for (int j = 0; j < last.in_dim(); ++j) mat.mut(row, j) = last.matrix.at(0, j);
            bias[static_cast<std::size_t>(row)] += last.bias[0];
        }
        for (const ReluNet* p : pending) {
            const AffineLayer& only = p->layers.front();
            mat.mut(row, xcol) += only.matrix.at(0, 0);
            bias[static_cast<std::size_t>(row)] += only.bias[0];
        }
        pending.clear();
        emitted = nullptr;
    };

    for (const auto& net : nets) {
        const int li = net_depth(net);
        if (li == 1) {
            pending.push_back(&net);
            continue;
        }
        for (int l = 0; l + 1 < li; ++l) {
            const AffineLayer& src = net.layers[static_cast<std::size_t>(l)];
            const int units = src.out_dim();
            const int in = prev_units < 0 ? 1 : prev_units + 2;
            const int xcol = prev_units < 0 ? 0 : prev_units;
            const int scol = prev_units < 0 ? -1 : prev_units + 1;
            Matrix mat = Matrix::zeros(units + 2, in);
            std::vector<double> bias(static_cast<std::size_t>(units) + 2, 0.0);
            if (l == 0) {
                // This net's first layer reads the x channel.
                for (int i = 0; i < units; ++i) {
                    mat.mut(i, xcol) = src.matrix.at(i, 0);
                    bias[static_cast<std::size_t>(i)] = src.bias[static_cast<std::size_t>(i)];
                }
                fold_sum_row(mat, bias, units + 1, xcol, scol);
            } else {
                for (int i = 0; i < units; ++i) {
                    for (int j = 0; j < src.in_dim(); ++j) mat.mut(i, j) = src.matrix.at(i, j);
                    bias[static_cast<std::size_t>(i)] = src.bias[static_cast<std::size_t>(i)];
                }
                mat.mut(units + 1, scol) = 1.0;
            }
            mat.mut(units, xcol < 0 ? 0 : xcol) = 1.0;  // x channel
            out.layers.push_back({std::move(mat), std::move(bias)});
            prev_units = units;
        }
        emitted = &net;
    }

    // Final affine layer: fold the last output map, the stragglers, and
    // remove the offset.
    {
        const int in = prev_units < 0 ? 1 : prev_units + 2;
        const int xcol = prev_units < 0 ? 0 : prev_units;
        const int scol = prev_units < 0 ? -1 : prev_units + 1;
        Matrix mat = Matrix::zeros(1, in);
        std::vector<double> bias(1, 0.0);
        fold_sum_row(mat, bias, 0, xcol, scol);
        bias[0] -= big;
        if (scol < 0) bias[0] -= big;  // never had a sum channel: offset was never added
        out.layers.push_back({std::move(mat), std::move(bias)});
    }
    return out;
}

SizeDepth pass_arith(SizeDepth f, long long l_target) {
    return {f.size + (l_target - f.depth), l_target};
}

SizeDepth parallel_arith(SizeDepth f, SizeDepth g) {
    return {f.size + g.size + std::llabs(f.depth - g.depth), std::max(f.depth, g.depth)};
}

SizeDepth compose_arith(SizeDepth f, SizeDepth g) {
    return {f.size + g.size - 1, f.depth + g.depth - 1};
}

SizeDepth add_arith(const std::vector<SizeDepth>& items) {
    if (items.empty()) throw EmptyList("add_arith: empty list");
    if (items.size() == 1) return items.front();
    SizeDepth out{1, 1};
    for (const auto& it : items) {
        out.size += it.size + 2 * it.depth - 3;
        out.depth += it.depth - 1;
    }
    return out;
}

SizeDepth sawtooth_arith(int s) { return {3LL * s + 1, static_cast<long long>(s) + 1}; }

SizeDepth spline_deep_arith(long long m, int w) {
    if (w < 8) throw WidthTooSmall("spline_deep_arith: W must be >= 8");
    const long long m_w = static_cast<long long>(w - 2) * ((w - 2) / 6);
    const long long depth = m == 0 ? 2 : 2 * ((m + m_w - 1) / m_w) + 1;
    return {static_cast<long long>(w) * (depth - 1) + 1, depth};
}

}  // namespace histopush
