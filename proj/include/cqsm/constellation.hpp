// Signal constellation sets: source alphabets, unitary rotation, Minkowski
// sums, minimum-distance computation and rotation-angle optimization.
//
// The central object is the effective received-symbol set
//   omega_d = omega_a  U  omega_b  U  (omega_a (+) omega_b)
// where omega_b is omega_a rotated by theta and (+) is the Minkowski sum.
// The rotation angle is chosen to maximize the minimum pairwise Euclidean
// distance of omega_d over theta in [0, pi/2].
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cqsm {

using Complex = std::complex<double>;

/// Two symbols closer than this are treated as coincident; min_distance
/// collapses such pairs to exactly zero so degenerate rotation angles are
/// distinguishable from floating-point noise.
inline constexpr double kDuplicateTolerance = 1e-9;

enum class AlphabetKind { BPSK, QPSK, PSK8, QAM16 };

inline const char* to_string(AlphabetKind kind) {
    switch (kind) {
        case AlphabetKind::BPSK: return "bpsk";
        case AlphabetKind::QPSK: return "qpsk";
        case AlphabetKind::PSK8: return "8psk";
        case AlphabetKind::QAM16: return "16qam";
    }
    return "?";
}

inline AlphabetKind alphabet_from_string(const std::string& name) {
    if (name == "bpsk") return AlphabetKind::BPSK;
    if (name == "qpsk") return AlphabetKind::QPSK;
    if (name == "8psk" || name == "psk8") return AlphabetKind::PSK8;
    if (name == "16qam" || name == "qam16") return AlphabetKind::QAM16;
    throw std::invalid_argument("unknown alphabet '" + name + "' (expected bpsk|qpsk|8psk|16qam)");
}

/// Ordered finite set of constellation symbols. Order is load-bearing: the
/// modem's bit maps and the CSV export both index into it. `bits_per_symbol`
/// is nonzero only for source alphabets (|symbols| == 2^q).
struct SignalSet {
    std::vector<Complex> symbols;
    std::string label;
    int bits_per_symbol = 0;

    std::size_t size() const { return symbols.size(); }

    double mean_power() const {
        double acc = 0.0;
        for (const Complex& s : symbols) acc += std::norm(s);
        return acc / static_cast<double>(symbols.size());
    }
};

/// Unit-average-power source alphabet in its documented deterministic order:
///   BPSK   {1, -1}
///   QPSK   {1, j, -1, -j}                 (e^{j(i-1)pi/2}, i = 1..4)
///   8PSK   e^{j(i-1)pi/4}, i = 1..8
///   16QAM  {-3,-1,1,3}^2 / sqrt(10), real-major, imaginary ascending
inline SignalSet make_alphabet(AlphabetKind kind) {
    SignalSet set;
    set.label = to_string(kind);
    switch (kind) {
        case AlphabetKind::BPSK:
            set.symbols = {{1.0, 0.0}, {-1.0, 0.0}};
            set.bits_per_symbol = 1;
            return set;
        case AlphabetKind::QPSK:
            set.symbols = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
            set.bits_per_symbol = 2;
            return set;
        case AlphabetKind::PSK8:
            for (int i = 0; i < 8; ++i) {
                const double phi = i * M_PI / 4.0;
                set.symbols.emplace_back(std::cos(phi), std::sin(phi));
            }
            set.bits_per_symbol = 3;
            return set;
        case AlphabetKind::QAM16: {
            const double scale = 1.0 / std::sqrt(10.0);
            for (double re : {-3.0, -1.0, 1.0, 3.0})
                for (double im : {-3.0, -1.0, 1.0, 3.0})
                    set.symbols.emplace_back(re * scale, im * scale);
            set.bits_per_symbol = 4;
            return set;
        }
    }
    throw std::invalid_argument("unsupported alphabet kind");
}

/// Multiply every symbol by e^{j theta}; order preserved.
inline SignalSet rotate_set(const SignalSet& set, double theta) {
    if (set.symbols.empty()) throw std::invalid_argument("rotate_set: empty set");
    SignalSet out;
    out.label = "rot(" + set.label + "," + std::to_string(theta) + ")";
    out.symbols.reserve(set.size());
    const Complex phase{std::cos(theta), std::sin(theta)};
    for (const Complex& s : set.symbols) out.symbols.push_back(s * phase);
    return out;
}

/// Multiset {s_i + s_k : s_i in a, s_k in b}, |a|*|b| entries, a-major order.
/// Duplicates are retained; collapsing them is min_distance's concern.
inline SignalSet minkowski_sum(const SignalSet& a, const SignalSet& b) {
    if (a.symbols.empty() || b.symbols.empty())
        throw std::invalid_argument("minkowski_sum: empty operand");
    SignalSet out;
    out.label = a.label + "+" + b.label;
    out.symbols.reserve(a.size() * b.size());
    for (const Complex& si : a.symbols)
        for (const Complex& sk : b.symbols) out.symbols.push_back(si + sk);
    return out;
}

/// The effective received-symbol multiset omega_d = a U b U (a (+) b), with
/// 2*2^q + 4^q entries for source alphabets of cardinality 2^q.
inline SignalSet effective_set(const SignalSet& omega_a, const SignalSet& omega_b) {
    SignalSet out;
    out.label = "omega_d(" + omega_a.label + ")";
    out.symbols = omega_a.symbols;
    out.symbols.insert(out.symbols.end(), omega_b.symbols.begin(), omega_b.symbols.end());
    const SignalSet sum = minkowski_sum(omega_a, omega_b);
    out.symbols.insert(out.symbols.end(), sum.symbols.begin(), sum.symbols.end());
    return out;
}

/// Minimum pairwise Euclidean distance over all unordered pairs. Pairs closer
/// than kDuplicateTolerance count as coincident and force an exact 0.
inline double min_distance(const SignalSet& set) {
    const std::size_t n = set.size();
    if (n < 2) throw std::invalid_argument("min_distance: need at least two symbols");
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t k = i + 1; k < n; ++k) {
            const double d_sq = std::norm(set.symbols[i] - set.symbols[k]);
            if (d_sq < best_sq) best_sq = d_sq;
        }
    const double best = std::sqrt(best_sq);
    return best < kDuplicateTolerance ? 0.0 : best;
}

/// Result of the rotation-angle grid search: every grid angle whose d_min is
/// within relative 1e-6 of the maximum (optima often come in plateaus and
/// symmetric pairs), plus that maximum.
struct RotationOptimum {
    std::vector<double> angles;
    double dmin = 0.0;
};

/// d_min of omega_d(theta) for one alphabet and angle.
inline double effective_dmin(AlphabetKind kind, double theta) {
    const SignalSet a = make_alphabet(kind);
    return min_distance(effective_set(a, rotate_set(a, theta)));
}

/// Grid search of max_theta min-distance over [lo, hi] with the given step
/// (radians). The default 0.1 degree step resolves the published optima.
inline RotationOptimum optimize_rotation(AlphabetKind kind, double lo, double hi, double step) {
    if (!(lo >= 0.0 && lo < hi && hi <= M_PI / 2.0 + 1e-12))
        throw std::invalid_argument("optimize_rotation: need 0 <= lo < hi <= pi/2");
    if (!(step > 0.0)) throw std::invalid_argument("optimize_rotation: step must be positive");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (count < 2) throw std::invalid_argument("optimize_rotation: empty grid");

    std::vector<double> grid(count);
    std::vector<double> dmin(count);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = lo + static_cast<double>(i) * step;
        dmin[i] = effective_dmin(kind, grid[i]);
    }
    RotationOptimum out;
    for (double d : dmin) out.dmin = std::max(out.dmin, d);
    const double cutoff = out.dmin * (1.0 - 1e-6);
    for (std::size_t i = 0; i < count; ++i)
        if (dmin[i] >= cutoff) out.angles.push_back(grid[i]);
    return out;
}

/// Closed-form distances of the QPSK geometry on [0, pi/4]:
///   d1 = |1 - (j - j e^{j theta})| = sqrt(3 - 2 sin(theta) - 2 cos(theta))
///   d2 = |1 - e^{j theta}|         = sqrt(2 - 2 cos(theta))
/// d1 decreases and d2 increases in theta, so the optimum sits at d1 == d2.
inline std::pair<double, double> qpsk_appendix_distances(double theta) {
    const double d1 = std::sqrt(3.0 - 2.0 * std::sin(theta) - 2.0 * std::cos(theta));
    const double d2 = std::sqrt(2.0 - 2.0 * std::cos(theta));
    return {d1, d2};
}

/// d1 == d2 solves sin(theta) = 1/2 on [0, pi/4].
inline double qpsk_analytic_optimum() { return M_PI / 6.0; }

struct PolarPoint {
    double r = 0.0;
    double phi = 0.0;
};

/// Polar form of the first element of the i-th Minkowski-sum subset for QPSK:
/// the sum splits into four squares, each a copy of omega_a centered on one
/// rotated symbol, and their lead corners have these closed forms.
inline PolarPoint minkowski_subset_polar(int i, double theta) {
    switch (i) {
        case 1: return {std::sqrt(2.0 + 2.0 * std::cos(theta)), theta / 2.0};
        case 2: return {std::sqrt(2.0 - 2.0 * std::sin(theta)), theta / 2.0 + M_PI / 4.0};
        case 3: return {std::sqrt(2.0 + 2.0 * std::sin(theta)), theta / 2.0 - M_PI / 4.0};
        case 4: return {std::sqrt(2.0 - 2.0 * std::cos(theta)), theta / 2.0 - M_PI / 2.0};
        default: throw std::invalid_argument("minkowski_subset_polar: index must be 1..4");
    }
}

}  // namespace cqsm
