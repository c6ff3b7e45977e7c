// Deterministic, parallel Monte Carlo BER harness.
//
// One trial is one channel use: fresh bits, fresh H, fresh noise, drawn from
// a stream derived by counter from (master_seed, point_index, trial_index).
// Trials are processed in fixed-size rounds; the stopping rule (enough
// bit-error events, or the trial budget) is evaluated only at round
// boundaries, and error counters are integers, so results are bit-identical
// for any worker count and any scheduling order.
#pragma once

#include <cstdint>
#include <thread>
#include <utility>

#include "cqsm/analysis.hpp"
#include "cqsm/detector.hpp"

namespace cqsm {

struct SimConfig {
    SchemeConfig scheme;
    int n_r = 4;
    std::vector<double> snr_grid_db;
    std::vector<double> theta_grid;  // radians; used by sweep_rotation only
    std::uint64_t master_seed = 1;
    std::uint64_t max_trials = 1'000'000;
    std::uint64_t target_error_events = 200;  // bit-error events before a point may stop
    double max_ber_floor = 0.0;  // skip remaining (higher-SNR) points once BER drops below
};

struct BerPoint {
    double snr_db = 0.0;
    std::uint64_t bit_errors = 0;
    std::uint64_t bits_simulated = 0;
    double ber = 0.0;
    double std_error = 0.0;
};

struct SweepResult {
    std::vector<double> theta;       // radians, the sweep grid
    std::vector<BerPoint> points;    // one per theta, all at the same SNR
    std::vector<double> plateau;     // every theta within one combined std error of the minimum
    double theta_opt = 0.0;          // the theta attaining the minimum observed BER
};

namespace detail {

/// Trials per stopping-rule check. Fixed: it is part of the reproducibility
/// contract (the set of simulated trials must not depend on worker count).
inline constexpr std::uint64_t kTrialsPerRound = 16384;

inline int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

inline BerPoint finalize_point(double snr_db, std::uint64_t errors, std::uint64_t bits) {
    BerPoint p;
    p.snr_db = snr_db;
    p.bit_errors = errors;
    p.bits_simulated = bits;
    p.ber = bits == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(bits);
    p.std_error = bits == 0 ? 0.0 : std::sqrt(p.ber * (1.0 - p.ber) / static_cast<double>(bits));
    return p;
}

/// Generic round loop. `make_trial(worker)` returns a callable
/// (point_index, trial_index) -> bit errors for that trial; each worker gets
/// its own callable so per-thread scratch state stays unshared.
template <typename MakeTrial>
BerPoint run_point(double snr_db, const SimConfig& config, std::size_t point_index, int workers,
                   int bits_per_trial, MakeTrial&& make_trial) {
    const int n_workers = resolve_workers(workers);
    std::uint64_t trials_done = 0;
    std::uint64_t errors = 0;

    while (trials_done < config.max_trials &&
           (config.target_error_events == 0 || errors < config.target_error_events)) {
        const std::uint64_t round = std::min(kTrialsPerRound, config.max_trials - trials_done);
        std::vector<std::uint64_t> worker_errors(static_cast<std::size_t>(n_workers), 0);
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) {
            const std::uint64_t lo = trials_done + round * static_cast<std::uint64_t>(w) /
                                                       static_cast<std::uint64_t>(n_workers);
            const std::uint64_t hi = trials_done + round * static_cast<std::uint64_t>(w + 1) /
                                                       static_cast<std::uint64_t>(n_workers);
            pool.emplace_back([&, w, lo, hi] {
                auto trial = make_trial(w);
                std::uint64_t local = 0;
                for (std::uint64_t t = lo; t < hi; ++t) local += trial(point_index, t);
                worker_errors[static_cast<std::size_t>(w)] = local;
            });
        }
        for (std::thread& th : pool) th.join();
        for (std::uint64_t e : worker_errors) errors += e;
        trials_done += round;
    }
    return finalize_point(snr_db, errors, trials_done * static_cast<std::uint64_t>(bits_per_trial));
}

/// The physical channel-use trial: bits -> modulate -> fade -> detect.
struct PhysicalTrial {
    const SimConfig* config;
    SnrSpec snr;
    FastDetector detector;
    BitBlock bits;

    PhysicalTrial(const SimConfig& cfg, const SnrSpec& s)
        : config(&cfg), snr(s), detector(cfg.scheme, cfg.n_r) {}

    std::uint32_t operator()(std::size_t point_index, std::uint64_t trial_index) {
        RandomStream rng = trial_stream(config->master_seed, point_index, trial_index);
        const int m = detector.spectral_bits();
        bits.clear();
        rng.bits(m, std::back_inserter(bits));
        const TxVector tx = modulate(bits, config->scheme);
        const ChannelMatrix h = sample_channel(config->n_r, config->scheme.n_t, 1.0, rng);
        const std::vector<Complex> y = transmit(h, tx, snr, rng);
        const DetectionResult det = detector.detect(y, h);
        std::uint32_t errors = 0;
        for (int i = 0; i < m; ++i)
            errors += bits[static_cast<std::size_t>(i)] != det.bits[static_cast<std::size_t>(i)];
        return errors;
    }
};

inline double mean_tx_energy(const SchemeConfig& config) {
    const double p = config.alphabet.mean_power();
    switch (config.scheme) {
        case Scheme::SM: return config.normalize_power ? 1.0 : p;
        case Scheme::GSM: return config.normalize_power ? 1.0 : p;  // n_u antennas at 1/sqrt(n_u) each
        case Scheme::QSM: return config.normalize_power ? 1.0 : p;
        case Scheme::CQSM: return config.normalize_power ? 1.0 : 2.0 * p;
    }
    return 1.0;
}

}  // namespace detail

/// BER-vs-SNR curve. Point i uses trial streams (master_seed, i, t); the
/// result is independent of `workers`. Once a point's estimate falls below
/// max_ber_floor (if set), the remaining higher-SNR points are skipped.
inline std::vector<BerPoint> run_ber_curve(const SimConfig& config, int workers = 0) {
    if (config.snr_grid_db.empty()) throw std::invalid_argument("run_ber_curve: empty SNR grid");
    if (config.max_trials < 1) throw std::invalid_argument("run_ber_curve: max_trials must be >= 1");
    const int m = spectral_efficiency(config.scheme);
    modulate(BitBlock(static_cast<std::size_t>(m), 0), config.scheme);  // surface config errors here, not in a worker
    std::vector<BerPoint> points;
    points.reserve(config.snr_grid_db.size());
    for (std::size_t si = 0; si < config.snr_grid_db.size(); ++si) {
        const SnrSpec snr = SnrSpec::from_db(config.snr_grid_db[si], detail::mean_tx_energy(config.scheme));
        points.push_back(detail::run_point(
            config.snr_grid_db[si], config, si, workers, m,
            [&](int) { return detail::PhysicalTrial(config, snr); }));
        if (config.max_ber_floor > 0.0 && points.back().ber < config.max_ber_floor) break;
    }
    return points;
}

/// Calibration entry: same round loop and stopping rule, but the trial
/// outcome comes from the caller (e.g. a Bernoulli source with known p), so
/// the estimator itself can be validated.
template <typename MakeTrial>
BerPoint run_calibration_point(const SimConfig& config, int bits_per_trial, MakeTrial&& make_trial,
                               int workers = 0) {
    return detail::run_point(0.0, config, 0, workers, bits_per_trial,
                             std::forward<MakeTrial>(make_trial));
}

/// BER versus rotation angle at one fixed SNR (the first grid entry). All
/// theta points share trial streams (common random numbers), which sharpens
/// the argmin comparison. The plateau contains every theta whose BER is
/// within one combined standard error of the minimum.
inline SweepResult sweep_rotation(const SimConfig& config, int workers = 0) {
    if (config.scheme.scheme != Scheme::CQSM)
        throw std::invalid_argument("sweep_rotation: scheme must be CQSM");
    if (config.theta_grid.empty()) throw std::invalid_argument("sweep_rotation: empty theta grid");
    if (config.snr_grid_db.empty()) throw std::invalid_argument("sweep_rotation: need one SNR point");

    SweepResult result;
    result.theta = config.theta_grid;
    for (double theta : config.theta_grid) {
        SimConfig point_config = config;
        point_config.scheme.theta = theta;
        point_config.snr_grid_db = {config.snr_grid_db.front()};
        point_config.max_ber_floor = 0.0;
        result.points.push_back(run_ber_curve(point_config, workers).front());
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.points.size(); ++i)
        if (result.points[i].ber < result.points[best].ber) best = i;
    result.theta_opt = result.theta[best];
    const BerPoint& min_point = result.points[best];
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        const double combined = std::sqrt(result.points[i].std_error * result.points[i].std_error +
                                          min_point.std_error * min_point.std_error);
        if (result.points[i].ber - min_point.ber <= combined) result.plateau.push_back(result.theta[i]);
    }
    return result;
}

/// Empirical antenna-collision probabilities over random CQSM messages:
/// the fraction of messages with alpha == beta and its exact complement.
inline std::pair<double, double> empirical_probabilities(const SimConfig& config,
                                                         std::uint64_t trials) {
    if (config.scheme.scheme != Scheme::CQSM)
        throw std::invalid_argument("empirical_probabilities: scheme must be CQSM");
    if (trials < 1) throw std::invalid_argument("empirical_probabilities: trials must be >= 1");
    const int m = spectral_efficiency(config.scheme);
    std::uint64_t collisions = 0;
    BitBlock bits;
    for (std::uint64_t t = 0; t < trials; ++t) {
        RandomStream rng = trial_stream(config.master_seed, 0, t);
        bits.clear();
        rng.bits(m, std::back_inserter(bits));
        const CqsmMapping map = cqsm_map(bits, config.scheme);
        collisions += map.alpha == map.beta;
    }
    const double p = static_cast<double>(collisions) / static_cast<double>(trials);
    return {p, 1.0 - p};
}

}  // namespace cqsm
