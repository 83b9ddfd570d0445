#pragma once

#include <utility>
#include <vector>

namespace histopush {

struct ReluNet;

// Exact affine-piece decomposition of a scalar-input net on [a,b]:
// interior breakpoints plus, per output coordinate, (slope, intercept)
// on every interval.
struct PieceDecomposition {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> breakpoints;  // sorted, strictly inside (a,b)
    std::vector<std::vector<std::pair<double, double>>> coeffs;  // [out][piece]

    int piece_count() const { return static_cast<int>(breakpoints.size()) + 1; }
    int out_dim() const { return static_cast<int>(coeffs.size()); }
    double piece_left(int piece) const {
        return piece == 0 ? a : breakpoints[static_cast<std::size_t>(piece) - 1];
    }
    double piece_right(int piece) const {
        return piece == piece_count() - 1 ? b : breakpoints[static_cast<std::size_t>(piece)];
    }
    std::vector<double> eval(double x) const;
};

// Layer-wise propagation of every neuron's affine form, splitting at ReLU
// zero crossings. Breakpoints are deduplicated at 1e-10 and pieces with
// slope change below 1e-10 fused. A pre-activation that is identically
// zero on a piece counts as inactive. With exact_rational the propagation
// runs in arbitrary-precision rational arithmetic (nets up to 1000 neurons)
// and is used to validate the float path.
PieceDecomposition extract_pieces(const ReluNet& net, double a, double b,
                                  bool exact_rational = false);

// Largest |value| any output coordinate attains on [a,b].
double max_abs_value(const PieceDecomposition& d);

// Length of the image curve of a 2-output decomposition.
double curve_length(const PieceDecomposition& d);

// Supporting lines of the image of a 2-output decomposition: pieces merged
// when adjacent segments are collinear (relative angle tolerance).
int zeta_lines(const PieceDecomposition& d, double tol = 1e-9);

// Largest jump between adjacent pieces at their shared breakpoint.
double max_discontinuity(const PieceDecomposition& d);

}  // namespace histopush
