// Exhaustive maximum-likelihood detection for SM, GSM, QSM and CQSM.
//
// Two reference paths evaluate the metric literally:
//   expanded  ||g||^2 - 2 Re{y^H g}   (default; instrumented operation counts)
//   direct    ||y - g||^2
// Both order hypotheses identically (they differ by the constant ||y||^2).
// Hypotheses are enumerated in bit-block numeric order and ties break to the
// lowest index, so repeated detection of the same input is reproducible.
//
// FastDetector is the separately-flagged precomputation path used by the
// Monte Carlo harness: per call it reduces the metric to O(1) per hypothesis
// via the Gram matrix h_a^H h_b, the column energies and y^H h_t. It selects
// the same hypothesis as the reference paths but keeps no operation counters.
#pragma once

#include <cstdint>
#include <limits>
#include <span>

#include "cqsm/channel.hpp"
#include "cqsm/modem.hpp"

namespace cqsm {

/// Real-operation counts. table3_* cover the metric evaluation only (the
/// published per-hypothesis budget); total_* additionally include forming
/// g = h_alpha s_a + h_beta s_b, which that budget leaves out.
struct OpCounters {
    std::uint64_t table3_mults = 0;
    std::uint64_t table3_adds = 0;
    std::uint64_t total_mults = 0;
    std::uint64_t total_adds = 0;
};

struct ComplexityReport {
    std::uint64_t real_multiplications = 0;
    std::uint64_t real_additions = 0;
};

/// Closed-form ML budget: ((4 n_r + 1) 2^m, (4 n_r - 1) 2^m) real operations.
inline ComplexityReport complexity_count(int n_r, int m) {
    if (n_r < 1 || m < 1) throw std::invalid_argument("complexity_count: need n_r >= 1 and m >= 1");
    const std::uint64_t hypotheses = std::uint64_t{1} << m;
    return {(4ULL * static_cast<std::uint64_t>(n_r) + 1ULL) * hypotheses,
            (4ULL * static_cast<std::uint64_t>(n_r) - 1ULL) * hypotheses};
}

enum class MetricPath { expanded, direct };

struct DetectionResult {
    int alpha = 1;
    int beta = 1;
    int idx_a = 0;
    int idx_b = 0;
    Complex symbol_a;
    Complex symbol_b;
    double metric = 0.0;
    std::uint64_t hypothesis_index = 0;
    BitBlock bits;
    OpCounters ops;
};

namespace detail {

inline void check_dimensions(std::span<const Complex> y, const ChannelMatrix& h,
                             const SchemeConfig& config) {
    if (static_cast<int>(y.size()) != h.n_r)
        throw std::invalid_argument("ml_detect: received vector length != n_r");
    if (h.n_t != config.n_t)
        throw std::invalid_argument("ml_detect: channel has wrong antenna count");
}

// ||g||^2: 2 n_r mults, 2 n_r - 1 adds.
inline double norm_sq(std::span<const Complex> g) {
    double acc = 0.0;
    for (const Complex& v : g) acc += v.real() * v.real() + v.imag() * v.imag();
    return acc;
}

// 2 Re{y^H g}: 2 n_r + 1 mults, 2 n_r - 1 adds.
inline double two_re_yhg(std::span<const Complex> y, std::span<const Complex> g) {
    double acc = 0.0;
    for (std::size_t r = 0; r < y.size(); ++r)
        acc += y[r].real() * g[r].real() + y[r].imag() * g[r].imag();
    return 2.0 * acc;
}

inline double diff_norm_sq(std::span<const Complex> y, std::span<const Complex> g) {
    double acc = 0.0;
    for (std::size_t r = 0; r < y.size(); ++r) acc += std::norm(y[r] - g[r]);
    return acc;
}

// y^H h_t (conjugate on y).
inline Complex inner_yh(std::span<const Complex> y, std::span<const Complex> col) {
    Complex acc{0.0, 0.0};
    for (std::size_t r = 0; r < y.size(); ++r) acc += std::conj(y[r]) * col[r];
    return acc;
}

}  // namespace detail

/// CQSM ML detection over all (alpha, beta, s_a, s_b). The expanded path
/// charges per hypothesis exactly 4 n_r + 1 mults and 4 n_r - 1 adds to the
/// table3 scope; forming g costs another 12 n_r mults / 6 n_r adds counted in
/// the total scope (complex multiply expanded as 4 mults + 2 adds).
inline DetectionResult ml_detect_cqsm(std::span<const Complex> y, const ChannelMatrix& h,
                                      const SchemeConfig& config,
                                      MetricPath path = MetricPath::expanded) {
    if (config.scheme != Scheme::CQSM) throw std::invalid_argument("ml_detect_cqsm: scheme != CQSM");
    detail::check_dimensions(y, h, config);

    const auto n_sym = config.alphabet.size();
    const double scale = config.normalize_power ? 1.0 / std::sqrt(2.0) : 1.0;
    const Complex phase{std::cos(config.theta), std::sin(config.theta)};

    std::vector<Complex> xs_a(n_sym), xs_b(n_sym);
    for (std::size_t i = 0; i < n_sym; ++i) {
        xs_a[i] = config.alphabet.symbols[i] * scale;
        xs_b[i] = config.alphabet.symbols[i] * phase * scale;
    }

    const auto n_r = static_cast<std::size_t>(h.n_r);
    std::vector<Complex> g(n_r);
    DetectionResult best;
    best.metric = std::numeric_limits<double>::infinity();
    OpCounters ops;
    std::uint64_t hyp = 0;

    for (std::size_t ia = 0; ia < n_sym; ++ia)
        for (std::size_t ib = 0; ib < n_sym; ++ib)
            for (int alpha = 1; alpha <= config.n_t; ++alpha)
                for (int beta = 1; beta <= config.n_t; ++beta, ++hyp) {
                    const auto ha = h.column(alpha);
                    const auto hb = h.column(beta);
                    for (std::size_t r = 0; r < n_r; ++r) g[r] = ha[r] * xs_a[ia] + hb[r] * xs_b[ib];
                    ops.total_mults += 8 * n_r;
                    ops.total_adds += 6 * n_r;

                    double metric;
                    if (path == MetricPath::expanded) {
                        metric = detail::norm_sq(g) - detail::two_re_yhg(y, g);
                        ops.table3_mults += 4 * n_r + 1;
                        ops.table3_adds += 4 * n_r - 1;
                    } else {
                        metric = detail::diff_norm_sq(y, g);
                    }
                    if (metric < best.metric) {
                        best.metric = metric;
                        best.alpha = alpha;
                        best.beta = beta;
                        best.idx_a = static_cast<int>(ia);
                        best.idx_b = static_cast<int>(ib);
                        best.hypothesis_index = hyp;
                    }
                }

    if (path == MetricPath::expanded) {
        ops.total_mults += ops.table3_mults;
        ops.total_adds += ops.table3_adds;
        best.ops = ops;
    }
    best.symbol_a = config.alphabet.symbols[static_cast<std::size_t>(best.idx_a)];
    best.symbol_b = config.alphabet.symbols[static_cast<std::size_t>(best.idx_b)] * phase;
    best.bits = demap_indices(config, best.alpha, best.beta, best.idx_a, best.idx_b);
    return best;
}

/// QSM ML detection over all (alpha, beta, s): the real part of s leaves
/// antenna alpha, j times the imaginary part leaves antenna beta.
inline DetectionResult ml_detect_qsm(std::span<const Complex> y, const ChannelMatrix& h,
                                     const SchemeConfig& config,
                                     MetricPath path = MetricPath::expanded) {
    if (config.scheme != Scheme::QSM) throw std::invalid_argument("ml_detect_qsm: scheme != QSM");
    detail::check_dimensions(y, h, config);

    const auto n_sym = config.alphabet.size();
    const double scale = config.normalize_power ? 1.0 / std::sqrt(config.alphabet.mean_power()) : 1.0;
    const auto n_r = static_cast<std::size_t>(h.n_r);
    std::vector<Complex> g(n_r);
    DetectionResult best;
    best.metric = std::numeric_limits<double>::infinity();
    OpCounters ops;
    std::uint64_t hyp = 0;

    for (std::size_t is = 0; is < n_sym; ++is)
        for (int alpha = 1; alpha <= config.n_t; ++alpha)
            for (int beta = 1; beta <= config.n_t; ++beta, ++hyp) {
                const double s_re = config.alphabet.symbols[is].real() * scale;
                const double s_im = config.alphabet.symbols[is].imag() * scale;
                const auto ha = h.column(alpha);
                const auto hb = h.column(beta);
                // g = h_alpha s_re + j h_beta s_im; real-scalar products only.
                for (std::size_t r = 0; r < n_r; ++r)
                    g[r] = Complex{ha[r].real() * s_re - hb[r].imag() * s_im,
                                   ha[r].imag() * s_re + hb[r].real() * s_im};
                ops.total_mults += 4 * n_r;
                ops.total_adds += 2 * n_r;

                double metric;
                if (path == MetricPath::expanded) {
                    metric = detail::norm_sq(g) - detail::two_re_yhg(y, g);
                    ops.table3_mults += 4 * n_r + 1;
                    ops.table3_adds += 4 * n_r - 1;
                } else {
                    metric = detail::diff_norm_sq(y, g);
                }
                if (metric < best.metric) {
                    best.metric = metric;
                    best.alpha = alpha;
                    best.beta = beta;
                    best.idx_a = static_cast<int>(is);
                    best.hypothesis_index = hyp;
                }
            }

    if (path == MetricPath::expanded) {
        ops.total_mults += ops.table3_mults;
        ops.total_adds += ops.table3_adds;
        best.ops = ops;
    }
    best.symbol_a = config.alphabet.symbols[static_cast<std::size_t>(best.idx_a)];
    best.bits = demap_indices(config, best.alpha, best.beta, best.idx_a, 0);
    return best;
}

/// SM/GSM baseline: exhaustive ||y - H s(m)||^2 over all 2^M bit blocks,
/// re-modulating each hypothesis through the modem.
inline DetectionResult ml_detect_generic(std::span<const Complex> y, const ChannelMatrix& h,
                                         const SchemeConfig& config) {
    if (config.scheme != Scheme::SM && config.scheme != Scheme::GSM)
        throw std::invalid_argument("ml_detect_generic: scheme must be SM or GSM");
    detail::check_dimensions(y, h, config);

    const int m = spectral_efficiency(config);
    const auto n_r = static_cast<std::size_t>(h.n_r);
    std::vector<Complex> g(n_r);
    DetectionResult best;
    best.metric = std::numeric_limits<double>::infinity();
    BitBlock bits;

    for (std::uint64_t msg = 0; msg < (std::uint64_t{1} << m); ++msg) {
        bits.clear();
        detail::uint_to_bits(msg, m, bits);
        const TxVector tx = modulate(bits, config);
        std::fill(g.begin(), g.end(), Complex{0.0, 0.0});
        for (const TxEntry& e : tx.entries) {
            const Complex amplitude = e.symbol * tx.scale;
            const auto col = h.column(e.antenna);
            for (std::size_t r = 0; r < n_r; ++r) g[r] += col[r] * amplitude;
        }
        const double metric = detail::diff_norm_sq(y, g);
        if (metric < best.metric) {
            best.metric = metric;
            best.hypothesis_index = msg;
        }
    }

    best.bits.clear();
    detail::uint_to_bits(best.hypothesis_index, m, best.bits);
    const int q = config.q();
    best.idx_a = static_cast<int>(detail::bits_to_uint(best.bits, 0, q));
    best.alpha = static_cast<int>(detail::bits_to_uint(best.bits, q, m - q)) + 1;
    best.symbol_a = config.alphabet.symbols[static_cast<std::size_t>(best.idx_a)];
    return best;
}

inline DetectionResult ml_detect(std::span<const Complex> y, const ChannelMatrix& h,
                                 const SchemeConfig& config,
                                 MetricPath path = MetricPath::expanded) {
    switch (config.scheme) {
        case Scheme::CQSM: return ml_detect_cqsm(y, h, config, path);
        case Scheme::QSM: return ml_detect_qsm(y, h, config, path);
        case Scheme::SM:
        case Scheme::GSM: return ml_detect_generic(y, h, config);
    }
    throw std::invalid_argument("unknown scheme");
}

/// Precomputation-backed ML detection (the harness's hot path).
///
/// Per call the metric of hypothesis (alpha, beta, i, k) collapses to
///   A[alpha][i] + B[beta][k] + 2 Re{P[i][k] G[alpha][beta]}
/// with A/B/G/P as below; enumeration order and tie-breaking match the
/// reference paths. Holds scratch buffers: use one instance per thread.
class FastDetector {
public:
    FastDetector(SchemeConfig config, int n_r)
        : config_(std::move(config)), n_r_(static_cast<std::size_t>(n_r)) {
        const auto n_sym = config_.alphabet.size();
        const auto n_t = static_cast<std::size_t>(config_.n_t);
        m_ = spectral_efficiency(config_);
        switch (config_.scheme) {
            case Scheme::CQSM: {
                const double scale = config_.normalize_power ? 1.0 / std::sqrt(2.0) : 1.0;
                const Complex phase{std::cos(config_.theta), std::sin(config_.theta)};
                xs_a_.resize(n_sym);
                xs_b_.resize(n_sym);
                for (std::size_t i = 0; i < n_sym; ++i) {
                    xs_a_[i] = config_.alphabet.symbols[i] * scale;
                    xs_b_[i] = config_.alphabet.symbols[i] * phase * scale;
                }
                break;
            }
            case Scheme::QSM: {
                const double scale =
                    config_.normalize_power ? 1.0 / std::sqrt(config_.alphabet.mean_power()) : 1.0;
                xs_a_.resize(n_sym);
                xs_b_.resize(n_sym);
                for (std::size_t i = 0; i < n_sym; ++i) {
                    xs_a_[i] = Complex{config_.alphabet.symbols[i].real() * scale, 0.0};
                    xs_b_[i] = Complex{0.0, config_.alphabet.symbols[i].imag() * scale};
                }
                break;
            }
            case Scheme::SM: {
                const double scale =
                    config_.normalize_power ? 1.0 / std::sqrt(config_.alphabet.mean_power()) : 1.0;
                xs_a_.resize(n_sym);
                for (std::size_t i = 0; i < n_sym; ++i) xs_a_[i] = config_.alphabet.symbols[i] * scale;
                combos_ = {};
                break;
            }
            case Scheme::GSM: {
                double scale = 1.0 / std::sqrt(static_cast<double>(config_.n_u));
                if (config_.normalize_power) scale /= std::sqrt(config_.alphabet.mean_power());
                xs_a_.resize(n_sym);
                for (std::size_t i = 0; i < n_sym; ++i) xs_a_[i] = config_.alphabet.symbols[i] * scale;
                combos_ = gsm_combinations(config_.n_t, config_.n_u);
                break;
            }
        }
        if (pairwise()) {
            pair_products_.resize(xs_a_.size() * xs_b_.size());
            for (std::size_t i = 0; i < xs_a_.size(); ++i)
                for (std::size_t k = 0; k < xs_b_.size(); ++k)
                    pair_products_[i * xs_b_.size() + k] = std::conj(xs_a_[i]) * xs_b_[k];
            gram_.resize(n_t * n_t);
            col_a_.resize(n_t * xs_a_.size());
            col_b_.resize(n_t * xs_b_.size());
            yh_.resize(n_t);
            col_energy_.resize(n_t);
        } else {
            const std::size_t n_eff = effective_columns();
            eff_col_.resize(n_eff * n_r_);
            yh_.resize(n_eff);
            col_energy_.resize(n_eff);
        }
    }

    const SchemeConfig& config() const { return config_; }
    int spectral_bits() const { return m_; }

    DetectionResult detect(std::span<const Complex> y, const ChannelMatrix& h) {
        detail::check_dimensions(y, h, config_);
        return pairwise() ? detect_pairwise(y, h) : detect_single(y, h);
    }

private:
    bool pairwise() const { return config_.scheme == Scheme::CQSM || config_.scheme == Scheme::QSM; }

    std::size_t effective_columns() const {
        return config_.scheme == Scheme::GSM ? combos_.size() : static_cast<std::size_t>(config_.n_t);
    }

    DetectionResult detect_pairwise(std::span<const Complex> y, const ChannelMatrix& h) {
        const auto n_t = static_cast<std::size_t>(config_.n_t);
        const auto n_sym = xs_a_.size();

        for (std::size_t t = 0; t < n_t; ++t) {
            const auto col = h.column(static_cast<int>(t) + 1);
            yh_[t] = detail::inner_yh(y, col);
            col_energy_[t] = detail::norm_sq(col);
            for (std::size_t u = t + 1; u < n_t; ++u) {
                const auto cu = h.column(static_cast<int>(u) + 1);
                Complex acc{0.0, 0.0};
                for (std::size_t r = 0; r < n_r_; ++r) acc += std::conj(col[r]) * cu[r];
                gram_[t * n_t + u] = acc;
                gram_[u * n_t + t] = std::conj(acc);
            }
            gram_[t * n_t + t] = Complex{col_energy_[t], 0.0};
        }
        // A[t][i] = |x_a_i|^2 ||h_t||^2 - 2 Re{x_a_i y^H h_t}; likewise B.
        for (std::size_t t = 0; t < n_t; ++t)
            for (std::size_t i = 0; i < n_sym; ++i) {
                col_a_[t * n_sym + i] =
                    std::norm(xs_a_[i]) * col_energy_[t] - 2.0 * (xs_a_[i] * yh_[t]).real();
                col_b_[t * n_sym + i] =
                    std::norm(xs_b_[i]) * col_energy_[t] - 2.0 * (xs_b_[i] * yh_[t]).real();
            }

        DetectionResult best;
        best.metric = std::numeric_limits<double>::infinity();
        const bool tied = config_.scheme == Scheme::QSM;  // one symbol index drives both parts
        std::uint64_t hyp = 0;
        for (std::size_t ia = 0; ia < n_sym; ++ia) {
            const std::size_t kb_begin = tied ? ia : 0;
            const std::size_t kb_end = tied ? ia + 1 : n_sym;
            for (std::size_t ib = kb_begin; ib < kb_end; ++ib) {
                const Complex p = pair_products_[ia * n_sym + ib];
                for (std::size_t a = 0; a < n_t; ++a) {
                    const double base = col_a_[a * n_sym + ia];
                    const Complex* gram_row = &gram_[a * n_t];
                    for (std::size_t b = 0; b < n_t; ++b, ++hyp) {
                        const Complex g = gram_row[b];
                        const double metric = base + col_b_[b * n_sym + ib] +
                                              2.0 * (p.real() * g.real() - p.imag() * g.imag());
                        if (metric < best.metric) {
                            best.metric = metric;
                            best.alpha = static_cast<int>(a) + 1;
                            best.beta = static_cast<int>(b) + 1;
                            best.idx_a = static_cast<int>(ia);
                            best.idx_b = static_cast<int>(ib);
                            best.hypothesis_index = hyp;
                        }
                    }
                }
            }
        }
        best.symbol_a = config_.alphabet.symbols[static_cast<std::size_t>(best.idx_a)];
        if (config_.scheme == Scheme::CQSM) {
            const Complex phase{std::cos(config_.theta), std::sin(config_.theta)};
            best.symbol_b = config_.alphabet.symbols[static_cast<std::size_t>(best.idx_b)] * phase;
            best.bits = demap_indices(config_, best.alpha, best.beta, best.idx_a, best.idx_b);
        } else {
            best.bits = demap_indices(config_, best.alpha, best.beta, best.idx_a, 0);
        }
        return best;
    }

    DetectionResult detect_single(std::span<const Complex> y, const ChannelMatrix& h) {
        const std::size_t n_eff = effective_columns();
        // Effective columns: combo sums for GSM, plain columns for SM.
        if (config_.scheme == Scheme::GSM) {
            for (std::size_t c = 0; c < n_eff; ++c) {
                Complex* dst = &eff_col_[c * n_r_];
                std::fill(dst, dst + n_r_, Complex{0.0, 0.0});
                for (int antenna : combos_[c]) {
                    const auto col = h.column(antenna);
                    for (std::size_t r = 0; r < n_r_; ++r) dst[r] += col[r];
                }
            }
        } else {
            for (std::size_t c = 0; c < n_eff; ++c) {
                const auto col = h.column(static_cast<int>(c) + 1);
                std::copy(col.begin(), col.end(), &eff_col_[c * n_r_]);
            }
        }
        for (std::size_t c = 0; c < n_eff; ++c) {
            const std::span<const Complex> col{&eff_col_[c * n_r_], n_r_};
            yh_[c] = detail::inner_yh(y, col);
            col_energy_[c] = detail::norm_sq(col);
        }

        DetectionResult best;
        best.metric = std::numeric_limits<double>::infinity();
        std::uint64_t hyp = 0;
        for (std::size_t i = 0; i < xs_a_.size(); ++i)
            for (std::size_t c = 0; c < n_eff; ++c, ++hyp) {
                const double metric =
                    std::norm(xs_a_[i]) * col_energy_[c] - 2.0 * (xs_a_[i] * yh_[c]).real();
                if (metric < best.metric) {
                    best.metric = metric;
                    best.alpha = static_cast<int>(c) + 1;
                    best.idx_a = static_cast<int>(i);
                    best.hypothesis_index = hyp;
                }
            }
        best.symbol_a = config_.alphabet.symbols[static_cast<std::size_t>(best.idx_a)];
        best.bits = demap_indices(config_, best.alpha, 1, best.idx_a, 0);
        return best;
    }

    SchemeConfig config_;
    std::size_t n_r_;
    int m_ = 0;
    std::vector<Complex> xs_a_, xs_b_;        // scaled hypothesis symbols
    std::vector<Complex> pair_products_;      // conj(x_a_i) x_b_k
    std::vector<std::vector<int>> combos_;    // GSM antenna combinations
    std::vector<Complex> gram_, eff_col_, yh_;
    std::vector<double> col_a_, col_b_, col_energy_;
};

}  // namespace cqsm
