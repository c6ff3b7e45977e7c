// Bit-to-transmit-vector mapping for the SM, GSM, QSM and CQSM schemes.
//
// All maps follow the worked numeric examples of the source system: QPSK bit
// pair (b1, b2) selects (2 b1 - 1) - j (2 b2 - 1) (so [1 1] -> 1-j and
// [0 1] -> -1-j), and antenna bit groups decode as natural binary with
// 1-based offset ([0 0] -> antenna 1, [1 0] -> antenna 3). Higher-order
// alphabets are Gray coded; any Gray map gives identical error statistics
// over uniform bits.
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "cqsm/constellation.hpp"

namespace cqsm {

using BitBlock = std::vector<std::uint8_t>;

enum class Scheme { SM, GSM, QSM, CQSM };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::SM: return "sm";
        case Scheme::GSM: return "gsm";
        case Scheme::QSM: return "qsm";
        case Scheme::CQSM: return "cqsm";
    }
    return "?";
}

inline Scheme scheme_from_string(const std::string& name) {
    if (name == "sm") return Scheme::SM;
    if (name == "gsm") return Scheme::GSM;
    if (name == "qsm") return Scheme::QSM;
    if (name == "cqsm") return Scheme::CQSM;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected sm|gsm|qsm|cqsm)");
}

/// Raw integer-grid constellations keep the exact symbol values of the worked
/// examples (QPSK {+-1 +-j}); unit_power divides by the grid's RMS amplitude.
enum class AlphabetScaling { unit_power, raw_grid };

namespace detail {

inline unsigned gray_decode(unsigned g) {
    for (unsigned shift = 1; shift < 8; shift <<= 1) g ^= g >> shift;
    return g;
}

// Gray-coded 4-PAM amplitude: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
inline double pam4(unsigned bits2) {
    static constexpr double amp[4] = {-3.0, -1.0, +1.0, +3.0};
    return amp[gray_decode(bits2)];
}

}  // namespace detail

/// Bit-map-ordered modulation alphabet: symbols[v] is the symbol selected by
/// the q-bit group with numeric value v (first bit most significant).
inline SignalSet bitmap_alphabet(AlphabetKind kind,
                                 AlphabetScaling scaling = AlphabetScaling::unit_power) {
    SignalSet set;
    set.label = std::string(to_string(kind)) + "-bitmap";
    switch (kind) {
        case AlphabetKind::BPSK:
            set.symbols = {{-1.0, 0.0}, {1.0, 0.0}};
            set.bits_per_symbol = 1;
            return set;
        case AlphabetKind::QPSK: {
            const double s = scaling == AlphabetScaling::unit_power ? 1.0 / std::sqrt(2.0) : 1.0;
            for (unsigned v = 0; v < 4; ++v) {
                const double re = (v & 2u) ? 1.0 : -1.0;
                const double im = (v & 1u) ? -1.0 : 1.0;
                set.symbols.emplace_back(re * s, im * s);
            }
            set.bits_per_symbol = 2;
            return set;
        }
        case AlphabetKind::PSK8:
            for (unsigned v = 0; v < 8; ++v) {
                const double phi = detail::gray_decode(v) * M_PI / 4.0;
                set.symbols.emplace_back(std::cos(phi), std::sin(phi));
            }
            set.bits_per_symbol = 3;
            return set;
        case AlphabetKind::QAM16: {
            const double s = scaling == AlphabetScaling::unit_power ? 1.0 / std::sqrt(10.0) : 1.0;
            for (unsigned v = 0; v < 16; ++v) {
                const double re = detail::pam4(v >> 2);
                const double im = -detail::pam4(v & 3u);
                set.symbols.emplace_back(re * s, im * s);
            }
            set.bits_per_symbol = 4;
            return set;
        }
    }
    throw std::invalid_argument("unsupported alphabet kind");
}

/// Full scheme configuration. `alphabet` is the bit-map-ordered signal set;
/// `theta` applies to CQSM only (the second symbol is drawn from the rotated
/// copy of `alphabet`). Degenerate theta in {0, pi/2} makes the CQSM map
/// ambiguous and is rejected unless `allow_degenerate_theta` is set, which
/// exists solely so tests can replicate the unrotated illustration.
struct SchemeConfig {
    Scheme scheme = Scheme::CQSM;
    int n_t = 4;
    int n_u = 1;  // GSM: antennas active per channel use
    SignalSet alphabet = bitmap_alphabet(AlphabetKind::QPSK);
    double theta = 0.0;
    bool normalize_power = true;
    bool allow_degenerate_theta = false;

    int q() const { return alphabet.bits_per_symbol; }
};

/// Sparse transmit vector: `entries` hold the unscaled symbols per active
/// antenna; `scale` is the normalization factor to apply on transmission.
/// Entries landing on the same antenna are pre-summed into one entry.
struct TxEntry {
    int antenna = 1;  // 1-based
    Complex symbol;
};

struct TxVector {
    int n_t = 0;
    std::vector<TxEntry> entries;
    double scale = 1.0;

    /// Dense expansion (tests and reference paths only; the hot paths stay sparse).
    std::vector<Complex> dense() const {
        std::vector<Complex> v(static_cast<std::size_t>(n_t));
        for (const TxEntry& e : entries) v[static_cast<std::size_t>(e.antenna - 1)] += e.symbol * scale;
        return v;
    }
};

namespace detail {

inline int ilog2(int v) { return std::bit_width(static_cast<unsigned>(v)) - 1; }

inline bool is_pow2(int v) { return v > 0 && std::has_single_bit(static_cast<unsigned>(v)); }

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

inline std::uint64_t bits_to_uint(const BitBlock& bits, int from, int len) {
    std::uint64_t v = 0;
    for (int i = 0; i < len; ++i) v = (v << 1) | bits[static_cast<std::size_t>(from + i)];
    return v;
}

inline void uint_to_bits(std::uint64_t v, int len, BitBlock& out) {
    for (int i = len - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((v >> i) & 1u));
}

inline void check_antenna_bits(const SchemeConfig& config) {
    if (config.n_t < 2 || !is_pow2(config.n_t))
        throw std::invalid_argument("scheme requires n_t >= 2 and a power of two");
}

inline void check_theta(const SchemeConfig& config) {
    if (config.allow_degenerate_theta) return;
    const double eps = 1e-12;
    if (std::abs(config.theta) < eps || std::abs(config.theta - M_PI / 2.0) < eps)
        throw std::invalid_argument(
            "cqsm: theta in {0, pi/2} makes omega_a and omega_b coincide; demapping is ambiguous");
}

}  // namespace detail

/// Lexicographically ordered n_u-of-n_t antenna combinations, truncated to
/// the first 2^floor(log2 C(n_t, n_u)) so a whole number of bits indexes them.
inline std::vector<std::vector<int>> gsm_combinations(int n_t, int n_u) {
    if (n_u < 1 || n_u > n_t) throw std::invalid_argument("gsm: need 1 <= n_u <= n_t");
    std::vector<std::vector<int>> combos;
    std::vector<int> cur(static_cast<std::size_t>(n_u));
    for (int i = 0; i < n_u; ++i) cur[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
        combos.push_back(cur);
        int i = n_u - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == n_t - (n_u - 1 - i)) --i;
        if (i < 0) break;
        ++cur[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n_u; ++k)
            cur[static_cast<std::size_t>(k)] = cur[static_cast<std::size_t>(k - 1)] + 1;
    }
    const int bits = detail::ilog2(static_cast<int>(combos.size()));
    combos.resize(static_cast<std::size_t>(1) << bits);
    return combos;
}

/// Spectral efficiency M in bits per channel use.
inline int spectral_efficiency(const SchemeConfig& config) {
    const int q = config.q();
    switch (config.scheme) {
        case Scheme::SM: return q + detail::ilog2(config.n_t);
        case Scheme::GSM:
            return q + detail::ilog2(static_cast<int>(detail::binomial(config.n_t, config.n_u)));
        case Scheme::QSM: return q + 2 * detail::ilog2(config.n_t);
        case Scheme::CQSM: return 2 * q + 2 * detail::ilog2(config.n_t);
    }
    throw std::invalid_argument("unknown scheme");
}

/// CQSM bit decomposition before vector assembly: the two symbols with the
/// rotation applied, the two 1-based antenna indices, and the normalization
/// scale (1/sqrt(2) splits unit energy across the two symbols).
struct CqsmMapping {
    int alpha = 1;
    int beta = 1;
    int idx_a = 0;
    int idx_b = 0;
    Complex s_a;
    Complex s_b;  // already rotated
    double scale = 1.0;
};

inline CqsmMapping cqsm_map(const BitBlock& bits, const SchemeConfig& config) {
    detail::check_antenna_bits(config);
    detail::check_theta(config);
    const int q = config.q();
    const int ln = detail::ilog2(config.n_t);
    if (static_cast<int>(bits.size()) != 2 * q + 2 * ln)
        throw std::invalid_argument("cqsm_modulate: bit block length != spectral efficiency");
    CqsmMapping m;
    m.idx_a = static_cast<int>(detail::bits_to_uint(bits, 0, q));
    m.idx_b = static_cast<int>(detail::bits_to_uint(bits, q, q));
    m.alpha = static_cast<int>(detail::bits_to_uint(bits, 2 * q, ln)) + 1;
    m.beta = static_cast<int>(detail::bits_to_uint(bits, 2 * q + ln, ln)) + 1;
    m.s_a = config.alphabet.symbols[static_cast<std::size_t>(m.idx_a)];
    const Complex phase{std::cos(config.theta), std::sin(config.theta)};
    m.s_b = config.alphabet.symbols[static_cast<std::size_t>(m.idx_b)] * phase;
    m.scale = config.normalize_power ? 1.0 / std::sqrt(2.0) : 1.0;
    return m;
}

inline TxVector cqsm_modulate(const BitBlock& bits, const SchemeConfig& config) {
    const CqsmMapping m = cqsm_map(bits, config);
    TxVector tx{config.n_t, {}, m.scale};
    if (m.alpha == m.beta) {
        tx.entries.push_back({m.alpha, m.s_a + m.s_b});
    } else {
        tx.entries.push_back({m.alpha, m.s_a});
        tx.entries.push_back({m.beta, m.s_b});
    }
    return tx;
}

inline TxVector qsm_modulate(const BitBlock& bits, const SchemeConfig& config) {
    detail::check_antenna_bits(config);
    const int q = config.q();
    const int ln = detail::ilog2(config.n_t);
    if (static_cast<int>(bits.size()) != q + 2 * ln)
        throw std::invalid_argument("qsm_modulate: bit block length != spectral efficiency");
    const auto sym_idx = static_cast<std::size_t>(detail::bits_to_uint(bits, 0, q));
    const int ant_re = static_cast<int>(detail::bits_to_uint(bits, q, ln)) + 1;
    const int ant_im = static_cast<int>(detail::bits_to_uint(bits, q + ln, ln)) + 1;
    const Complex s = config.alphabet.symbols[sym_idx];

    TxVector tx{config.n_t, {}, 1.0};
    if (config.normalize_power) tx.scale = 1.0 / std::sqrt(config.alphabet.mean_power());
    if (ant_re == ant_im) {
        tx.entries.push_back({ant_re, s});
    } else {
        tx.entries.push_back({ant_re, Complex{s.real(), 0.0}});
        tx.entries.push_back({ant_im, Complex{0.0, s.imag()}});
    }
    return tx;
}

inline TxVector sm_modulate(const BitBlock& bits, const SchemeConfig& config) {
    detail::check_antenna_bits(config);
    const int q = config.q();
    const int ln = detail::ilog2(config.n_t);
    if (static_cast<int>(bits.size()) != q + ln)
        throw std::invalid_argument("sm_modulate: bit block length != spectral efficiency");
    const auto sym_idx = static_cast<std::size_t>(detail::bits_to_uint(bits, 0, q));
    const int antenna = static_cast<int>(detail::bits_to_uint(bits, q, ln)) + 1;
    TxVector tx{config.n_t, {{antenna, config.alphabet.symbols[sym_idx]}}, 1.0};
    if (config.normalize_power) tx.scale = 1.0 / std::sqrt(config.alphabet.mean_power());
    return tx;
}

inline TxVector gsm_modulate(const BitBlock& bits, const SchemeConfig& config) {
    const int q = config.q();
    const auto combos = gsm_combinations(config.n_t, config.n_u);
    const int cbits = detail::ilog2(static_cast<int>(combos.size()));
    if (static_cast<int>(bits.size()) != q + cbits)
        throw std::invalid_argument("gsm_modulate: bit block length != spectral efficiency");
    const auto sym_idx = static_cast<std::size_t>(detail::bits_to_uint(bits, 0, q));
    const auto combo_idx = static_cast<std::size_t>(detail::bits_to_uint(bits, q, cbits));
    const Complex s = config.alphabet.symbols[sym_idx];

    TxVector tx{config.n_t, {}, 1.0 / std::sqrt(static_cast<double>(config.n_u))};
    if (config.normalize_power) tx.scale /= std::sqrt(config.alphabet.mean_power());
    for (int antenna : combos[combo_idx]) tx.entries.push_back({antenna, s});
    return tx;
}

inline TxVector modulate(const BitBlock& bits, const SchemeConfig& config) {
    switch (config.scheme) {
        case Scheme::SM: return sm_modulate(bits, config);
        case Scheme::GSM: return gsm_modulate(bits, config);
        case Scheme::QSM: return qsm_modulate(bits, config);
        case Scheme::CQSM: return cqsm_modulate(bits, config);
    }
    throw std::invalid_argument("unknown scheme");
}

/// A detected hypothesis in demap-ready form. `alpha`/`beta` are 1-based
/// antenna indices (for GSM, `alpha` is the 1-based combination index);
/// `symbol_b` is CQSM's second symbol, already rotated.
struct DetectedHypothesis {
    int alpha = 1;
    int beta = 1;
    Complex symbol_a;
    Complex symbol_b;
};

namespace detail {

inline int find_symbol(const std::vector<Complex>& set, Complex s, const char* what) {
    for (std::size_t i = 0; i < set.size(); ++i)
        if (std::abs(set[i] - s) < kDuplicateTolerance) return static_cast<int>(i);
    throw std::invalid_argument(std::string("demap: ") + what + " is not a member of the configured set");
}

inline void check_index(int value, int lo, int hi, const char* what) {
    if (value < lo || value > hi)
        throw std::invalid_argument(std::string("demap: ") + what + " out of range");
}

}  // namespace detail

/// Exact inverse of `modulate` on symbol indices; see `demap` for the
/// symbol-valued front end.
inline BitBlock demap_indices(const SchemeConfig& config, int alpha, int beta, int idx_a, int idx_b) {
    const int q = config.q();
    BitBlock bits;
    switch (config.scheme) {
        case Scheme::SM: {
            detail::uint_to_bits(static_cast<std::uint64_t>(idx_a), q, bits);
            detail::uint_to_bits(static_cast<std::uint64_t>(alpha - 1), detail::ilog2(config.n_t), bits);
            return bits;
        }
        case Scheme::GSM: {
            const auto combos = gsm_combinations(config.n_t, config.n_u);
            detail::uint_to_bits(static_cast<std::uint64_t>(idx_a), q, bits);
            detail::uint_to_bits(static_cast<std::uint64_t>(alpha - 1),
                                 detail::ilog2(static_cast<int>(combos.size())), bits);
            return bits;
        }
        case Scheme::QSM: {
            const int ln = detail::ilog2(config.n_t);
            detail::uint_to_bits(static_cast<std::uint64_t>(idx_a), q, bits);
            detail::uint_to_bits(static_cast<std::uint64_t>(alpha - 1), ln, bits);
            detail::uint_to_bits(static_cast<std::uint64_t>(beta - 1), ln, bits);
            return bits;
        }
        case Scheme::CQSM: {
            const int ln = detail::ilog2(config.n_t);
            detail::uint_to_bits(static_cast<std::uint64_t>(idx_a), q, bits);
            detail::uint_to_bits(static_cast<std::uint64_t>(idx_b), q, bits);
            detail::uint_to_bits(static_cast<std::uint64_t>(alpha - 1), ln, bits);
            detail::uint_to_bits(static_cast<std::uint64_t>(beta - 1), ln, bits);
            return bits;
        }
    }
    throw std::invalid_argument("unknown scheme");
}

/// Recover the transmitted bit block from a detected hypothesis. Symbols must
/// belong to the configured sets (rotated set for CQSM's second symbol) and
/// indices must be in range; violations are rejected with a diagnostic.
inline BitBlock demap(const DetectedHypothesis& hyp, const SchemeConfig& config) {
    const auto& alphabet = config.alphabet.symbols;
    switch (config.scheme) {
        case Scheme::SM: {
            detail::check_index(hyp.alpha, 1, config.n_t, "antenna");
            return demap_indices(config, hyp.alpha, 1, detail::find_symbol(alphabet, hyp.symbol_a, "symbol"), 0);
        }
        case Scheme::GSM: {
            const auto combos = gsm_combinations(config.n_t, config.n_u);
            detail::check_index(hyp.alpha, 1, static_cast<int>(combos.size()), "combination index");
            return demap_indices(config, hyp.alpha, 1, detail::find_symbol(alphabet, hyp.symbol_a, "symbol"), 0);
        }
        case Scheme::QSM: {
            detail::check_index(hyp.alpha, 1, config.n_t, "alpha");
            detail::check_index(hyp.beta, 1, config.n_t, "beta");
            return demap_indices(config, hyp.alpha, hyp.beta,
                                 detail::find_symbol(alphabet, hyp.symbol_a, "symbol"), 0);
        }
        case Scheme::CQSM: {
            detail::check_index(hyp.alpha, 1, config.n_t, "alpha");
            detail::check_index(hyp.beta, 1, config.n_t, "beta");
            const Complex phase{std::cos(config.theta), std::sin(config.theta)};
            std::vector<Complex> rotated(alphabet.size());
            std::transform(alphabet.begin(), alphabet.end(), rotated.begin(),
                           [phase](Complex s) { return s * phase; });
            return demap_indices(config, hyp.alpha, hyp.beta,
                                 detail::find_symbol(alphabet, hyp.symbol_a, "first symbol"),
                                 detail::find_symbol(rotated, hyp.symbol_b, "second symbol"));
        }
    }
    throw std::invalid_argument("unknown scheme");
}

}  // namespace cqsm
