// cqsm: command-line front end for the CQSM/SM/GSM/QSM link-level toolkit.
//
// Subcommands: angle-opt, ber, sweep-theta, abep, constellation, complexity.
// Every run writes its data as CSV plus a JSON manifest holding the full
// resolved configuration; `cqsm --from-manifest run.json` reproduces the
// data files byte-for-byte. `--workers` tunes parallelism only — it is
// deliberately absent from the manifest because it cannot change results.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>

#include "cqsm/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kDegToRad = M_PI / 180.0;

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

/// Inclusive `start:step:stop` grid; a bare number is a one-point grid.
std::vector<double> parse_range(const std::string& text) {
    std::vector<double> values;
    const auto first = text.find(':');
    if (first == std::string::npos) {
        values.push_back(std::stod(text));
        return values;
    }
    const auto second = text.find(':', first + 1);
    if (second == std::string::npos)
        throw std::invalid_argument("range '" + text + "' must be start:step:stop");
    const double start = std::stod(text.substr(0, first));
    const double step = std::stod(text.substr(first + 1, second - first - 1));
    const double stop = std::stod(text.substr(second + 1));
    if (!(step > 0.0) || stop < start)
        throw std::invalid_argument("range '" + text + "' needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) values.push_back(start + static_cast<double>(i) * step);
    return values;
}

fs::path default_out_dir() {
    if (const char* env = std::getenv("CQSM_OUT_DIR")) return env;
    return ".";
}

/// Collects written files so the manifest can list every output.
struct OutputSink {
    fs::path dir;
    std::vector<std::string> files;

    explicit OutputSink(fs::path d) : dir(std::move(d)) { fs::create_directories(dir); }

    void write(const std::string& name, const std::string& content) {
        cqsm::atomic_write(dir / name, content);
        files.push_back(name);
    }
};

void write_manifest(OutputSink& sink, const std::string& command, const json& params,
                    const json& summary = json::object()) {
    json manifest{
        {"manifest_version", 1},
        {"tool", "cqsm"},
        {"tool_version", cqsm::kToolVersion},
        {"command", command},
        {"timestamp_utc", timestamp_utc()},
        {"params", params},
        {"outputs", sink.files},
        {"conventions",
         {{"snr_db", "10*log10(E_tx/sigma_n_sq) with E_tx the mean ||s||^2 per channel use"},
          {"angles", "degrees at the CLI, radians internally"},
          {"rng", "per-trial streams derived from (master_seed, point_index, trial_index)"}}},
    };
    if (!summary.empty()) manifest["summary"] = summary;
    cqsm::atomic_write(sink.dir / (command + ".manifest.json"), manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------- commands

struct AngleOptParams {
    std::string alphabet = "qpsk";
    double lo_deg = 0.0;
    double hi_deg = 90.0;
    double step_deg = 0.1;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AngleOptParams, alphabet, lo_deg, hi_deg, step_deg)

void run_angle_opt(const AngleOptParams& p, const fs::path& out_dir) {
    const cqsm::AlphabetKind kind = cqsm::alphabet_from_string(p.alphabet);
    std::vector<std::pair<double, double>> scan;
    const auto count =
        static_cast<std::size_t>(std::floor((p.hi_deg - p.lo_deg) / p.step_deg + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
        const double deg = p.lo_deg + static_cast<double>(i) * p.step_deg;
        scan.emplace_back(deg, cqsm::effective_dmin(kind, deg * kDegToRad));
    }
    const cqsm::RotationOptimum opt =
        cqsm::optimize_rotation(kind, p.lo_deg * kDegToRad, p.hi_deg * kDegToRad, p.step_deg * kDegToRad);

    OutputSink sink(out_dir);
    sink.write("angle_opt.csv", cqsm::angle_scan_csv(scan));

    json optima = json::array();
    std::cout << "optima_deg=";
    for (std::size_t i = 0; i < opt.angles.size(); ++i) {
        const double deg = opt.angles[i] / kDegToRad;
        optima.push_back(deg);
        std::cout << (i ? "," : "") << cqsm::format_double(deg);
    }
    std::cout << " dmin=" << cqsm::format_double(opt.dmin) << "\n";
    write_manifest(sink, "angle-opt", p, {{"optima_deg", optima}, {"dmin", opt.dmin}});
}

struct BerParams {
    std::string scheme = "cqsm";
    std::string alphabet = "qpsk";
    int nt = 4;
    int nr = 4;
    int nu = 1;
    double theta_deg = 30.0;
    std::string snr = "0:2:20";
    std::uint64_t seed = 1;
    std::uint64_t max_trials = 1'000'000;
    std::uint64_t target_errors = 200;
    double ber_floor = 0.0;
    bool normalize = true;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BerParams, scheme, alphabet, nt, nr, nu, theta_deg, snr, seed,
                                   max_trials, target_errors, ber_floor, normalize)

cqsm::SimConfig to_sim_config(const BerParams& p) {
    cqsm::SimConfig config;
    config.scheme.scheme = cqsm::scheme_from_string(p.scheme);
    config.scheme.n_t = p.nt;
    config.scheme.n_u = p.nu;
    config.scheme.alphabet = cqsm::bitmap_alphabet(cqsm::alphabet_from_string(p.alphabet));
    config.scheme.theta = p.theta_deg * kDegToRad;
    config.scheme.normalize_power = p.normalize;
    config.n_r = p.nr;
    config.snr_grid_db = parse_range(p.snr);
    config.master_seed = p.seed;
    config.max_trials = p.max_trials;
    config.target_error_events = p.target_errors;
    config.max_ber_floor = p.ber_floor;
    return config;
}

void run_ber(const BerParams& p, const fs::path& out_dir, int workers) {
    const std::vector<cqsm::BerPoint> points = cqsm::run_ber_curve(to_sim_config(p), workers);
    OutputSink sink(out_dir);
    sink.write("ber.csv", cqsm::ber_csv(points));
    write_manifest(sink, "ber", p);
    for (const cqsm::BerPoint& pt : points)
        std::cout << "snr_db=" << cqsm::format_double(pt.snr_db) << " ber=" << cqsm::format_double(pt.ber)
                  << " errors=" << pt.bit_errors << " bits=" << pt.bits_simulated << "\n";
}

struct SweepParams {
    std::string alphabet = "qpsk";
    int nt = 4;
    int nr = 8;
    double snr_db = 10.0;
    std::string theta = "2.5:2.5:87.5";
    std::uint64_t seed = 1;
    std::uint64_t max_trials = 1'000'000;
    std::uint64_t target_errors = 200;
    bool normalize = true;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SweepParams, alphabet, nt, nr, snr_db, theta, seed, max_trials,
                                   target_errors, normalize)

void run_sweep_theta(const SweepParams& p, const fs::path& out_dir, int workers) {
    cqsm::SimConfig config;
    config.scheme.scheme = cqsm::Scheme::CQSM;
    config.scheme.n_t = p.nt;
    config.scheme.alphabet = cqsm::bitmap_alphabet(cqsm::alphabet_from_string(p.alphabet));
    config.scheme.normalize_power = p.normalize;
    config.n_r = p.nr;
    config.snr_grid_db = {p.snr_db};
    config.master_seed = p.seed;
    config.max_trials = p.max_trials;
    config.target_error_events = p.target_errors;
    for (double deg : parse_range(p.theta)) config.theta_grid.push_back(deg * kDegToRad);

    const cqsm::SweepResult sweep = cqsm::sweep_rotation(config, workers);
    OutputSink sink(out_dir);
    sink.write("sweep_theta.csv", cqsm::sweep_csv(sweep));

    json plateau = json::array();
    for (double t : sweep.plateau) plateau.push_back(t / kDegToRad);
    const double opt_deg = sweep.theta_opt / kDegToRad;
    std::cout << "theta_opt_deg=" << cqsm::format_double(opt_deg) << "\n";
    write_manifest(sink, "sweep-theta", p, {{"theta_opt_deg", opt_deg}, {"plateau_deg", plateau}});
}

struct AbepParams {
    std::string alphabet = "qpsk";
    int nt = 4;
    int nr = 4;
    double theta_deg = 35.0;
    std::string snr = "0:2:20";
    double sigma_h_sq = 1.0;
    bool normalize = true;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AbepParams, alphabet, nt, nr, theta_deg, snr, sigma_h_sq, normalize)

void run_abep(const AbepParams& p, const fs::path& out_dir) {
    cqsm::SchemeConfig scheme;
    scheme.scheme = cqsm::Scheme::CQSM;
    scheme.n_t = p.nt;
    scheme.alphabet = cqsm::bitmap_alphabet(cqsm::alphabet_from_string(p.alphabet));
    scheme.theta = p.theta_deg * kDegToRad;
    scheme.normalize_power = p.normalize;
    const cqsm::AbepCurve curve = cqsm::abep_curve(scheme, parse_range(p.snr), p.nr, p.sigma_h_sq);
    OutputSink sink(out_dir);
    sink.write("abep.csv", cqsm::abep_csv(curve));
    write_manifest(sink, "abep", p);
}

struct ConstellationParams {
    std::string alphabet = "qpsk";
    double theta_deg = 45.0;
    std::string set = "d";  // a | b | c | d
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ConstellationParams, alphabet, theta_deg, set)

void run_constellation(const ConstellationParams& p, const fs::path& out_dir) {
    const cqsm::AlphabetKind kind = cqsm::alphabet_from_string(p.alphabet);
    const cqsm::SignalSet a = cqsm::make_alphabet(kind);
    const cqsm::SignalSet b = cqsm::rotate_set(a, p.theta_deg * kDegToRad);

    std::ostringstream csv;
    csv << "index,re,im,set_label\n";
    std::size_t row = 0;
    const auto emit = [&](const cqsm::SignalSet& set, const char* label) {
        for (const cqsm::Complex& s : set.symbols)
            csv << row++ << ',' << cqsm::format_double(s.real()) << ','
                << cqsm::format_double(s.imag()) << ',' << label << '\n';
    };
    if (p.set == "a") emit(a, "omega_a");
    else if (p.set == "b") emit(b, "omega_b");
    else if (p.set == "c") emit(cqsm::minkowski_sum(a, b), "omega_c");
    else if (p.set == "d") {
        emit(a, "omega_a");
        emit(b, "omega_b");
        emit(cqsm::minkowski_sum(a, b), "omega_c");
    } else {
        throw std::invalid_argument("--set must be one of a|b|c|d");
    }

    OutputSink sink(out_dir);
    sink.write("constellation.csv", csv.str());
    write_manifest(sink, "constellation", p);
}

struct ComplexityParams {
    int nr = 8;
    int m = 8;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ComplexityParams, nr, m)

void run_complexity(const ComplexityParams& p, const fs::path& out_dir, bool write_files) {
    const cqsm::ComplexityReport report = cqsm::complexity_count(p.nr, p.m);
    std::cout << "mults=" << report.real_multiplications << " adds=" << report.real_additions << "\n";
    if (write_files) {
        OutputSink sink(out_dir);
        std::ostringstream csv;
        csv << "real_multiplications,real_additions\n"
            << report.real_multiplications << ',' << report.real_additions << '\n';
        sink.write("complexity.csv", csv.str());
        write_manifest(sink, "complexity", p);
    }
}

int run_from_manifest(const fs::path& manifest_path, const fs::path& out_dir, int workers) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot read manifest: " + manifest_path.string());
    const json manifest = json::parse(in);
    const std::string command = manifest.at("command");
    const json& params = manifest.at("params");
    if (command == "angle-opt") run_angle_opt(params.get<AngleOptParams>(), out_dir);
    else if (command == "ber") run_ber(params.get<BerParams>(), out_dir, workers);
    else if (command == "sweep-theta") run_sweep_theta(params.get<SweepParams>(), out_dir, workers);
    else if (command == "abep") run_abep(params.get<AbepParams>(), out_dir);
    else if (command == "constellation") run_constellation(params.get<ConstellationParams>(), out_dir);
    else if (command == "complexity") run_complexity(params.get<ComplexityParams>(), out_dir, true);
    else throw std::runtime_error("manifest names unknown command '" + command + "'");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CQSM link-level simulation toolkit"};
    app.set_config("--config", "", "Read option defaults from an INI/TOML file");
    app.set_version_flag("--version", std::string("cqsm ") + cqsm::kToolVersion);

    std::string out_dir = default_out_dir().string();
    int workers = 0;
    std::string manifest_file;
    app.add_option("--out", out_dir, "Output directory (default: $CQSM_OUT_DIR or .)")
        ->capture_default_str();
    app.add_option("--workers", workers, "Worker threads (0 = hardware); never affects results")
        ->capture_default_str();
    app.add_option("--from-manifest", manifest_file, "Reproduce a previous run from its manifest");

    AngleOptParams angle_params;
    CLI::App* angle = app.add_subcommand("angle-opt", "Grid-search the rotation angle maximizing d_min");
    angle->add_option("--alphabet", angle_params.alphabet, "bpsk|qpsk|8psk|16qam")->capture_default_str();
    angle->add_option("--lo-deg", angle_params.lo_deg)->capture_default_str();
    angle->add_option("--hi-deg", angle_params.hi_deg)->capture_default_str();
    angle->add_option("--step-deg", angle_params.step_deg)->capture_default_str();

    BerParams ber_params;
    CLI::App* ber = app.add_subcommand("ber", "Monte Carlo BER-vs-SNR curve");
    ber->add_option("--scheme", ber_params.scheme, "sm|gsm|qsm|cqsm")->capture_default_str();
    ber->add_option("--alphabet", ber_params.alphabet, "bpsk|qpsk|8psk|16qam")->capture_default_str();
    ber->add_option("--nt", ber_params.nt, "Transmit antennas")->capture_default_str();
    ber->add_option("--nr", ber_params.nr, "Receive antennas")->capture_default_str();
    ber->add_option("--nu", ber_params.nu, "Active antennas (GSM)")->capture_default_str();
    ber->add_option("--theta-deg", ber_params.theta_deg, "Rotation angle (CQSM)")->capture_default_str();
    ber->add_option("--snr", ber_params.snr, "SNR grid, dB, start:step:stop")->capture_default_str();
    ber->add_option("--seed", ber_params.seed, "Master seed")->capture_default_str();
    ber->add_option("--max-trials", ber_params.max_trials, "Channel-use budget per point")
        ->capture_default_str();
    ber->add_option("--target-errors", ber_params.target_errors, "Bit-error events before a point stops")
        ->capture_default_str();
    ber->add_option("--ber-floor", ber_params.ber_floor, "Skip higher SNR points once BER < floor")
        ->capture_default_str();
    ber->add_flag("!--no-normalize", ber_params.normalize, "Transmit without unit-power normalization");

    SweepParams sweep_params;
    CLI::App* sweep = app.add_subcommand("sweep-theta", "BER versus rotation angle at one SNR (CQSM)");
    sweep->add_option("--alphabet", sweep_params.alphabet)->capture_default_str();
    sweep->add_option("--nt", sweep_params.nt)->capture_default_str();
    sweep->add_option("--nr", sweep_params.nr)->capture_default_str();
    sweep->add_option("--snr-db", sweep_params.snr_db, "Fixed SNR for the sweep")->capture_default_str();
    sweep->add_option("--theta", sweep_params.theta, "Angle grid, degrees, start:step:stop")
        ->capture_default_str();
    sweep->add_option("--seed", sweep_params.seed)->capture_default_str();
    sweep->add_option("--max-trials", sweep_params.max_trials)->capture_default_str();
    sweep->add_option("--target-errors", sweep_params.target_errors)->capture_default_str();
    sweep->add_flag("!--no-normalize", sweep_params.normalize);

    AbepParams abep_params;
    CLI::App* abep = app.add_subcommand("abep", "Closed-form ABEP union bound (CQSM)");
    abep->add_option("--alphabet", abep_params.alphabet)->capture_default_str();
    abep->add_option("--nt", abep_params.nt)->capture_default_str();
    abep->add_option("--nr", abep_params.nr)->capture_default_str();
    abep->add_option("--theta-deg", abep_params.theta_deg)->capture_default_str();
    abep->add_option("--snr", abep_params.snr, "SNR grid, dB, start:step:stop")->capture_default_str();
    abep->add_option("--sigma-h-sq", abep_params.sigma_h_sq, "Channel gain variance")->capture_default_str();
    abep->add_flag("!--no-normalize", abep_params.normalize);

    ConstellationParams const_params;
    CLI::App* constellation = app.add_subcommand("constellation", "Export constellation sets as CSV");
    constellation->add_option("--alphabet", const_params.alphabet)->capture_default_str();
    constellation->add_option("--theta-deg", const_params.theta_deg)->capture_default_str();
    constellation->add_option("--set", const_params.set, "a|b|c|d (source, rotated, sum, all three)")
        ->capture_default_str();

    ComplexityParams cx_params;
    CLI::App* complexity = app.add_subcommand("complexity", "Closed-form ML operation counts");
    complexity->add_option("--nr", cx_params.nr)->capture_default_str();
    complexity->add_option("--m", cx_params.m, "Spectral efficiency, bits per channel use")
        ->capture_default_str();

    app.require_subcommand(0, 1);
    CLI11_PARSE(app, argc, argv);

    try {
        if (!manifest_file.empty()) return run_from_manifest(manifest_file, out_dir, workers);
        if (angle->parsed()) run_angle_opt(angle_params, out_dir);
        else if (ber->parsed()) run_ber(ber_params, out_dir, workers);
        else if (sweep->parsed()) run_sweep_theta(sweep_params, out_dir, workers);
        else if (abep->parsed()) run_abep(abep_params, out_dir);
        else if (constellation->parsed()) run_constellation(const_params, out_dir);
        else if (complexity->parsed()) run_complexity(cx_params, out_dir, true);
        else {
            std::cerr << app.help() << "\n";
            return 2;
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
