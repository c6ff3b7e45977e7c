// Closed-form error-probability analysis for CQSM.
//
// The pairwise error probability conditioned on the channel is Q(sqrt(zeta))
// with zeta = ||g - g_hat||^2 / (2 sigma_n^2). Its fading average uses the
// per-receive-branch expectation zeta_bar (the twelve-case table below) fed
// into the standard n_r-branch diversity closed form, and the ABEP is the
// Hamming-weighted union bound over all ordered hypothesis pairs.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "cqsm/channel.hpp"
#include "cqsm/modem.hpp"

namespace cqsm {

/// Gaussian tail probability Q(x) = P[N(0,1) > x] = erfc(x / sqrt(2)) / 2.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// True and hypothesized CQSM transmissions: antenna indices and the two
/// (already scaled) symbols of each side.
struct HypothesisPair {
    int alpha = 1;
    int beta = 1;
    int alpha_hat = 1;
    int beta_hat = 1;
    Complex x_a, x_b, x_a_hat, x_b_hat;
};

/// Per-receive-branch expectation of zeta over the fading ensemble.
///
/// Column (in)equalities are implemented as antenna-index (in)equalities:
/// columns of a continuous random H coincide exactly when their indices do.
/// The twelve index-consistent combinations of (alpha = beta), (alpha_hat =
/// beta_hat), (alpha = alpha_hat), (beta = beta_hat) are exhaustive; the four
/// remaining boolean patterns are self-contradictory.
inline double expected_zeta(const HypothesisPair& p, double sigma_h_sq, double sigma_n_sq) {
    const bool tx_same = p.alpha == p.beta;
    const bool hyp_same = p.alpha_hat == p.beta_hat;
    const bool a_match = p.alpha == p.alpha_hat;
    const bool b_match = p.beta == p.beta_hat;
    const double c = sigma_h_sq / (2.0 * sigma_n_sq);

    const Complex xa = p.x_a, xb = p.x_b, xah = p.x_a_hat, xbh = p.x_b_hat;
    if (!tx_same && !hyp_same) {
        if (!a_match && !b_match) return c * (std::norm(xa) + std::norm(xb) + std::norm(xah) + std::norm(xbh));
        if (a_match && !b_match) return c * (std::norm(xa - xah) + std::norm(xb) + std::norm(xbh));
        if (!a_match && b_match) return c * (std::norm(xb - xbh) + std::norm(xa) + std::norm(xah));
        return c * (std::norm(xa - xah) + std::norm(xb - xbh));
    }
    if (tx_same && !hyp_same) {
        if (!a_match && !b_match) return c * (std::norm(xa + xb) + std::norm(xah) + std::norm(xbh));
        if (a_match && !b_match) return c * (std::norm(xa + xb - xah) + std::norm(xbh));
        return c * (std::norm(xa + xb - xbh) + std::norm(xah));  // !a_match && b_match
    }
    if (!tx_same && hyp_same) {
        if (!a_match && !b_match) return c * (std::norm(xah + xbh) + std::norm(xa) + std::norm(xb));
        if (a_match && !b_match) return c * (std::norm(xa - xah - xbh) + std::norm(xb));
        return c * (std::norm(xb - xah - xbh) + std::norm(xa));  // !a_match && b_match
    }
    // tx_same && hyp_same: a_match and b_match coincide.
    if (!a_match) return c * (std::norm(xa + xb) + std::norm(xah + xbh));
    return c * std::norm(xa + xb - xah - xbh);
}

/// Average PEP over Rayleigh fading with n_r receive branches:
///   gamma^{n_r} sum_{k=0}^{n_r-1} C(n_r-1+k, k) (1-gamma)^k,
///   gamma = (1 - sqrt((zb/2) / (1 + zb/2))) / 2.
/// The binomials are built by multiplicative recurrence, stable through
/// n_r = 64 and beyond.
inline double average_pep(double zeta_bar, int n_r) {
    if (n_r < 1) throw std::invalid_argument("average_pep: n_r must be >= 1");
    if (!(zeta_bar >= 0.0)) throw std::invalid_argument("average_pep: zeta_bar must be >= 0");
    const double half = zeta_bar / 2.0;
    const double gamma = 0.5 * (1.0 - std::sqrt(half / (1.0 + half)));
    const double one_minus = 1.0 - gamma;

    double sum = 0.0;
    double binom = 1.0;       // C(n_r - 1 + k, k)
    double weight = 1.0;      // (1 - gamma)^k
    for (int k = 0; k < n_r; ++k) {
        sum += binom * weight;
        binom = binom * static_cast<double>(n_r + k) / static_cast<double>(k + 1);
        weight *= one_minus;
    }
    return std::pow(gamma, n_r) * sum;
}

/// ABEP union bound (CQSM):
///   P_b = 2^{-M} sum_i sum_{k != i} (1/M) PEP(i -> k) e_{i,k}
/// with e_{i,k} the Hamming distance between bit blocks i and k. Pairs come
/// from the modem's bit-to-hypothesis map with the transmit normalization
/// applied, so bound and simulation share one convention. Cost is O(4^M);
/// M above the guard is rejected with a cost diagnostic.
inline double abep_bound(const SchemeConfig& config, const SnrSpec& snr, double sigma_h_sq, int n_r,
                         int m_guard = 16) {
    if (config.scheme != Scheme::CQSM) throw std::invalid_argument("abep_bound: scheme must be CQSM");
    const int m = spectral_efficiency(config);
    if (m > m_guard)
        throw std::invalid_argument("abep_bound: M = " + std::to_string(m) + " exceeds the guard (" +
                                    std::to_string(m_guard) + "); cost grows as O(4^M)");

    const std::uint64_t count = std::uint64_t{1} << m;
    struct Tuple {
        int alpha, beta;
        Complex x_a, x_b;
    };
    std::vector<Tuple> tuples(count);
    BitBlock bits;
    for (std::uint64_t i = 0; i < count; ++i) {
        bits.clear();
        detail::uint_to_bits(i, m, bits);
        const CqsmMapping map = cqsm_map(bits, config);
        tuples[i] = {map.alpha, map.beta, map.s_a * map.scale, map.s_b * map.scale};
    }

    double acc = 0.0;
    for (std::uint64_t i = 0; i < count; ++i)
        for (std::uint64_t k = 0; k < count; ++k) {
            if (k == i) continue;
            const HypothesisPair pair{tuples[i].alpha, tuples[i].beta, tuples[k].alpha,
                                      tuples[k].beta,  tuples[i].x_a,  tuples[i].x_b,
                                      tuples[k].x_a,   tuples[k].x_b};
            const double zeta_bar = expected_zeta(pair, sigma_h_sq, snr.sigma_n_sq);
            const auto hamming = static_cast<double>(std::popcount(i ^ k));
            acc += average_pep(zeta_bar, n_r) * hamming;
        }
    return acc / (static_cast<double>(count) * static_cast<double>(m));
}

/// ABEP samples over an SNR grid, exported as `snr_db,abep` CSV rows.
struct AbepCurve {
    std::vector<std::pair<double, double>> points;
};

inline AbepCurve abep_curve(const SchemeConfig& config, const std::vector<double>& snr_grid_db,
                            int n_r, double sigma_h_sq = 1.0) {
    AbepCurve curve;
    curve.points.reserve(snr_grid_db.size());
    for (double snr_db : snr_grid_db)
        curve.points.emplace_back(snr_db, abep_bound(config, SnrSpec::from_db(snr_db), sigma_h_sq, n_r));
    return curve;
}

}  // namespace cqsm
