#pragma once

#include <optional>
#include <vector>

#include "histopush/pwl.hpp"

namespace histopush {

// Dense row-major matrix with an optional CSR representation for the very
// wide, very sparse layers the baseline generator produces. All combinator
// algebra runs on dense matrices; only construction-time emitters create
// sparse ones.
struct Matrix {
    int rows = 0;
    int cols = 0;
    bool sparse = false;
    std::vector<double> dense;        // rows*cols when !sparse
    std::vector<int> rptr;            // CSR row pointers when sparse
    std::vector<int> cidx;            // CSR column indices
    std::vector<double> vals;         // CSR values

    static Matrix zeros(int rows, int cols);
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);
    static Matrix sparse_from_triplets(int rows, int cols,
                                       std::vector<std::vector<std::pair<int, double>>> row_entries);

    double at(int i, int j) const;
    double& mut(int i, int j);  // dense only
    void matvec(const double* x, double* y) const;
};

struct AffineLayer {
    Matrix matrix;
    std::vector<double> bias;

    int in_dim() const { return matrix.cols; }
    int out_dim() const { return matrix.rows; }
};

// Feedforward ReLU network: alternating affine maps and ReLUs, no ReLU
// after the last affine map. Depth is the number of affine maps; size is
// the total neuron count, i.e. the sum of all layer output dimensions
// (the final layer's outputs included, the input excluded).
struct ReluNet {
    std::vector<AffineLayer> layers;

    int in_dim() const { return layers.front().in_dim(); }
    int out_dim() const { return layers.back().out_dim(); }
};

int net_size(const ReluNet& net);
int net_depth(const ReluNet& net);

std::vector<double> eval_net(const ReluNet& net, const std::vector<double>& x);
// Scalar-input convenience.
std::vector<double> eval_net(const ReluNet& net, double x);
// Scalar-input, scalar-output convenience.
double eval_net_scalar(const ReluNet& net, double x);

// Identity map as a single 1x1 layer.
ReluNet identity_net();

// Depth padding: appends identity single-neuron layers until the depth is
// l_target. Requires a scalar output with range in [0,inf) so the extra
// ReLUs are no-ops; every function this library pads maps into [0,1].
// Size grows by exactly l_target - depth.
ReluNet pass(const ReluNet& net, int l_target);

// Pairing x -> (f(x), g(x)) for scalar-input nets mapping [0,1] into [0,1].
// The shallower net is pass-padded, then layers are stacked block-diagonally
// (first layers share the input). Size N1+N2+|L1-L2|, depth max(L1,L2).
ReluNet parallel(const ReluNet& f, const ReluNet& g);

// x -> f(p*g(x)+q) for scalar-input f and scalar-output g, fusing g's
// output layer into f's first layer. Size N1+N2-1, depth L1+L2-1.
ReluNet compose(const ReluNet& f, const ReluNet& g, double p, double q);

// Sum of scalar functions on [0,1], chained in series with two pass-through
// channels (the input and an offset running sum) added to each intermediate
// layer. Size sum(Ni+2Li-2)-l+1, depth sum(Li)-l+1 for l >= 2; a singleton
// list returns the net unchanged. output_bounds, when given, supplies
// max|f_i| on [0,1] for the accumulator offset; otherwise the bound is
// measured by piece extraction.
ReluNet add(const std::vector<ReluNet>& nets,
            const std::optional<std::vector<double>>& output_bounds = std::nullopt);

// The s-fold composition of the unit triangular map: 2^s teeth on [0,1],
// identically 0 outside. Size 3s+1, depth s+1.
ReluNet sawtooth(int s);

// Depth-2 realization of a piecewise-affine f: f(0) + s0*ReLU(x) +
// sum_j (s_j - s_{j-1}) ReLU(x - beta_j), exact on [0,1] because x >= 0
// there. Size m+2 (within the m+3 budget), depth 2. f is simplified first.
ReluNet spline_shallow(const PiecewiseAffine& f);

// Width-W realization of a piecewise-affine f with m (simplified)
// breakpoints: depth exactly max(2, 2*ceil(m/((W-2)*floor((W-2)/6)))+1) and
// size exactly W*(L-1)+1, any W >= 8. Exact on [0,1].
ReluNet spline_deep(const PiecewiseAffine& f, int w);

// Size/depth bookkeeping mirrors of the combinators, for predicting builder
// output without constructing nets.
struct SizeDepth {
    long long size = 0;
    long long depth = 0;
};
SizeDepth pass_arith(SizeDepth f, long long l_target);
SizeDepth parallel_arith(SizeDepth f, SizeDepth g);
SizeDepth compose_arith(SizeDepth f, SizeDepth g);
SizeDepth add_arith(const std::vector<SizeDepth>& items);
SizeDepth sawtooth_arith(int s);
SizeDepth spline_deep_arith(long long m, int w);

}  // namespace histopush
