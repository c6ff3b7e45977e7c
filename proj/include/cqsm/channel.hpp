// Rayleigh fading channel and additive noise.
//
// One trial is one channel use with a fresh H (quasi-static per use). Entries
// are i.i.d. circularly symmetric complex Gaussian; the receive vector is
// formed sparsely from the active antennas only.
//
// SNR convention (recorded in every output manifest):
//   snr_db = 10 log10(E_tx / sigma_n_sq)
// with E_tx the mean ||s||^2 per channel use under the scheme's
// normalization (1 when normalize_power is on).
#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "cqsm/modem.hpp"
#include "cqsm/rng.hpp"

namespace cqsm {

/// n_r x n_t complex fading realization, column-major so that the per-antenna
/// columns used by the detectors are contiguous.
struct ChannelMatrix {
    int n_r = 0;
    int n_t = 0;
    std::vector<Complex> entries;  // entries[(t-1)*n_r + r]

    std::span<const Complex> column(int antenna) const {
        return {entries.data() + static_cast<std::size_t>(antenna - 1) * static_cast<std::size_t>(n_r),
                static_cast<std::size_t>(n_r)};
    }
};

struct SnrSpec {
    double snr_db = 0.0;
    double sigma_n_sq = 1.0;

    /// sigma_n_sq = e_tx / 10^(snr_db/10); +inf dB gives exactly zero noise.
    static SnrSpec from_db(double snr_db, double e_tx = 1.0) {
        if (std::isinf(snr_db) && snr_db > 0) return {snr_db, 0.0};
        return {snr_db, e_tx * std::pow(10.0, -snr_db / 10.0)};
    }
};

/// Draw H with i.i.d. CN(0, sigma_h_sq) entries. Generation order is fixed:
/// column by column, ascending receive index within a column.
inline ChannelMatrix sample_channel(int n_r, int n_t, double sigma_h_sq, RandomStream& rng) {
    if (n_r < 1 || n_t < 1) throw std::invalid_argument("sample_channel: dimensions must be >= 1");
    if (!(sigma_h_sq > 0.0)) throw std::invalid_argument("sample_channel: sigma_h_sq must be > 0");
    ChannelMatrix h{n_r, n_t, {}};
    h.entries.resize(static_cast<std::size_t>(n_r) * static_cast<std::size_t>(n_t));
    for (Complex& e : h.entries) e = rng.complex_gaussian(sigma_h_sq);
    return h;
}

/// y = H s + n, exploiting the sparsity of s (at most a few active columns).
/// Noise is skipped entirely when sigma_n_sq == 0 so the noiseless case is exact.
inline std::vector<Complex> transmit(const ChannelMatrix& h, const TxVector& s, const SnrSpec& snr,
                                     RandomStream& rng) {
    if (s.n_t != h.n_t) throw std::invalid_argument("transmit: channel/transmit dimension mismatch");
    std::vector<Complex> y(static_cast<std::size_t>(h.n_r));
    for (const TxEntry& e : s.entries) {
        if (e.antenna < 1 || e.antenna > h.n_t)
            throw std::invalid_argument("transmit: antenna index out of range");
        const Complex amplitude = e.symbol * s.scale;
        const auto col = h.column(e.antenna);
        for (int r = 0; r < h.n_r; ++r) y[static_cast<std::size_t>(r)] += col[static_cast<std::size_t>(r)] * amplitude;
    }
    if (snr.sigma_n_sq > 0.0)
        for (Complex& yr : y) yr += rng.complex_gaussian(snr.sigma_n_sq);
    return y;
}

}  // namespace cqsm
