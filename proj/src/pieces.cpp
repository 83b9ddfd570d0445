#include "histopush/pieces.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "histopush/errors.hpp"
#include "histopush/relunet.hpp"

namespace histopush {

std::vector<double> PieceDecomposition::eval(double x) const {
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    const std::size_t p = static_cast<std::size_t>(it - breakpoints.begin());
    std::vector<double> out(coeffs.size());
    for (std::size_t c = 0; c < coeffs.size(); ++c) {
        out[c] = coeffs[c][p].first * x + coeffs[c][p].second;
    }
    return out;
}

namespace {

using BigRat = boost::multiprecision::cpp_rational;

inline double to_double(double x) { return x; }
inline double to_double(const BigRat& x) { return static_cast<double>(x); }

// Forms are (slope, intercept) in the global input coordinate, one per
// neuron of the current layer, tracked per segment of [a,b].
template <typename S>
struct Segmentation {
    std::vector<S> bounds;                                // k+1 boundaries
    std::vector<std::vector<std::pair<S, S>>> forms;      // k segments
};

template <typename S>
void affine_step(const AffineLayer& layer, Segmentation<S>& seg) {
    const int out = layer.out_dim();
    const int in = layer.in_dim();
    for (auto& f : seg.forms) {
        std::vector<std::pair<S, S>> nf(static_cast<std::size_t>(out));
        for (int i = 0; i < out; ++i) {
            S slope = S(0);
            S inter = S(layer.bias[static_cast<std::size_t>(i)]);
            if (layer.matrix.sparse) {
                for (int k = layer.matrix.rptr[static_cast<std::size_t>(i)];
                     k < layer.matrix.rptr[static_cast<std::size_t>(i) + 1]; ++k) {
                    const S w = S(layer.matrix.vals[static_cast<std::size_t>(k)]);
                    const auto& src = f[static_cast<std::size_t>(layer.matrix.cidx[static_cast<std::size_t>(k)])];
                    slope += w * src.first;
                    inter += w * src.second;
                }
            } else {
                for (int j = 0; j < in; ++j) {
                    const double wd = layer.matrix.dense[static_cast<std::size_t>(i) * in + j];
                    if (wd == 0.0) continue;
                    const S w = S(wd);
                    slope += w * f[static_cast<std::size_t>(j)].first;
                    inter += w * f[static_cast<std::size_t>(j)].second;
                }
            }
            nf[static_cast<std::size_t>(i)] = {std::move(slope), std::move(inter)};
        }
        f = std::move(nf);
    }
}

template <typename S>
void relu_step(Segmentation<S>& seg) {
    Segmentation<S> out;
    out.bounds.push_back(seg.bounds.front());
    std::vector<S> cuts;
    for (std::size_t s = 0; s < seg.forms.size(); ++s) {
        const S& lo = seg.bounds[s];
        const S& hi = seg.bounds[s + 1];
        cuts.clear();
        for (const auto& [slope, inter] : seg.forms[s]) {
            if (slope == S(0)) continue;
            S x = -inter / slope;
            if (lo < x && x < hi) cuts.push_back(std::move(x));
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        cuts.push_back(hi);
        S left = lo;
        for (const S& right : cuts) {
            const S mid = (left + right) / 2;
            std::vector<std::pair<S, S>> f = seg.forms[s];
            for (auto& [slope, inter] : f) {
                if (slope * mid + inter <= S(0)) {
                    slope = S(0);
                    inter = S(0);
                }
            }
            out.forms.push_back(std::move(f));
            out.bounds.push_back(right);
            left = right;
        }
    }
    seg = std::move(out);
}

template <typename S>
PieceDecomposition run_extraction(const ReluNet& net, double a, double b) {
    Segmentation<S> seg;
    seg.bounds = {S(a), S(b)};
    seg.forms = {{{S(1), S(0)}}};
    const std::size_t last = net.layers.size() - 1;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        affine_step(net.layers[l], seg);
        if (l != last) relu_step(seg);
    }

    const int out_dim = net.out_dim();
    const double merge_tol = 1e-10;
    PieceDecomposition dec;
    dec.a = a;
    dec.b = b;
    dec.coeffs.resize(static_cast<std::size_t>(out_dim));

    // Merge pass: drop boundaries that are too close to the previous kept
    // one or where no output coordinate changes slope appreciably.
    std::vector<std::size_t> keep;  // indices of kept segments
    keep.push_back(0);
    double last_bound = a;
    for (std::size_t s = 1; s < seg.forms.size(); ++s) {
        const double bound = to_double(seg.bounds[s]);
        bool distinct = bound - last_bound >= merge_tol;
        if (distinct) {
            double dslope = 0.0;
            for (int c = 0; c < out_dim; ++c) {
                const double sl = to_double(seg.forms[keep.back()][static_cast<std::size_t>(c)].first);
                const double sr = to_double(seg.forms[s][static_cast<std::size_t>(c)].first);
                dslope = std::max(dslope, std::fabs(sr - sl));
            }
            distinct = dslope >= merge_tol;
        }
        if (distinct) {
            dec.breakpoints.push_back(bound);
            keep.push_back(s);
            last_bound = bound;
        }
    }
    for (int c = 0; c < out_dim; ++c) {
        auto& pieces = dec.coeffs[static_cast<std::size_t>(c)];
        pieces.reserve(keep.size());
        for (std::size_t k : keep) {
            pieces.emplace_back(to_double(seg.forms[k][static_cast<std::size_t>(c)].first),
                                to_double(seg.forms[k][static_cast<std::size_t>(c)].second));
        }
    }
    return dec;
}

}  // namespace

PieceDecomposition extract_pieces(const ReluNet& net, double a, double b, bool exact_rational) {
    if (net.in_dim() != 1) throw DimensionMismatch("extract_pieces: scalar input required");
    if (!(a < b)) throw DomainError("extract_pieces: need a < b");
    if (exact_rational) {
        if (net_size(net) > 1000) {
            throw TooLarge("extract_pieces: rational mode capped at 1000 neurons");
        }
        return run_extraction<BigRat>(net, a, b);
    }
    return run_extraction<double>(net, a, b);
}

double max_abs_value(const PieceDecomposition& d) {
    double best = 0.0;
    for (const auto& pieces : d.coeffs) {
        for (int p = 0; p < d.piece_count(); ++p) {
            const auto& [s, c] = pieces[static_cast<std::size_t>(p)];
            best = std::max(best, std::fabs(s * d.piece_left(p) + c));
            best = std::max(best, std::fabs(s * d.piece_right(p) + c));
        }
    }
    return best;
}

double curve_length(const PieceDecomposition& d) {
    if (d.out_dim() != 2) throw DimensionMismatch("curve_length: two outputs required");
    double len = 0.0;
    for (int p = 0; p < d.piece_count(); ++p) {
        const double dx = d.piece_right(p) - d.piece_left(p);
        const double s1 = d.coeffs[0][static_cast<std::size_t>(p)].first;
        const double s2 = d.coeffs[1][static_cast<std::size_t>(p)].first;
        len += dx * std::hypot(s1, s2);
    }
    return len;
}

int zeta_lines(const PieceDecomposition& d, double tol) {
    if (d.out_dim() != 2) throw DimensionMismatch("zeta_lines: two outputs required");
    int lines = 1;
    for (int p = 1; p < d.piece_count(); ++p) {
        const double a1 = d.coeffs[0][static_cast<std::size_t>(p) - 1].first;
        const double a2 = d.coeffs[1][static_cast<std::size_t>(p) - 1].first;
        const double b1 = d.coeffs[0][static_cast<std::size_t>(p)].first;
        const double b2 = d.coeffs[1][static_cast<std::size_t>(p)].first;
        const double na = std::hypot(a1, a2);
        const double nb = std::hypot(b1, b2);
        if (na == 0.0 || nb == 0.0) continue;  // stationary piece: a point on any line
        const double cross = std::fabs(a1 * b2 - a2 * b1);
        if (cross > tol * na * nb) ++lines;
    }
    return lines;
}

double max_discontinuity(const PieceDecomposition& d) {
    double worst = 0.0;
    for (std::size_t i = 0; i < d.breakpoints.size(); ++i) {
        const double x = d.breakpoints[i];
        for (const auto& pieces : d.coeffs) {
            const double l = pieces[i].first * x + pieces[i].second;
            const double r = pieces[i + 1].first * x + pieces[i + 1].second;
            worst = std::max(worst, std::fabs(l - r));
        }
    }
    return worst;
}

}  // namespace histopush
