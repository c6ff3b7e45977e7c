// CSV and manifest output helpers.
//
// All numeric output uses round-trip decimal formatting (%.17g for doubles)
// so downstream parsing is lossless, and files are written atomically
// (temp + rename) so a failed run never leaves a partial artifact.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cqsm/analysis.hpp"
#include "cqsm/constellation.hpp"
#include "cqsm/montecarlo.hpp"

namespace cqsm {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest-safe round-trip decimal for a double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Write `content` to `path` atomically: a partial file is never observable.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

/// `index,re,im,set_label` rows for a signal set.
inline std::string signal_set_csv(const SignalSet& set) {
    std::ostringstream out;
    out << "index,re,im,set_label\n";
    for (std::size_t i = 0; i < set.symbols.size(); ++i)
        out << i << ',' << format_double(set.symbols[i].real()) << ','
            << format_double(set.symbols[i].imag()) << ',' << set.label << '\n';
    return out.str();
}

/// `snr_db,bit_errors,bits,ber,std_err` rows for a BER curve.
inline std::string ber_csv(const std::vector<BerPoint>& points) {
    std::ostringstream out;
    out << "snr_db,bit_errors,bits,ber,std_err\n";
    for (const BerPoint& p : points)
        out << format_double(p.snr_db) << ',' << p.bit_errors << ',' << p.bits_simulated << ','
            << format_double(p.ber) << ',' << format_double(p.std_error) << '\n';
    return out.str();
}

/// `theta_deg,bit_errors,bits,ber,std_err` rows for a rotation sweep.
inline std::string sweep_csv(const SweepResult& sweep) {
    std::ostringstream out;
    out << "theta_deg,bit_errors,bits,ber,std_err\n";
    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
        const BerPoint& p = sweep.points[i];
        out << format_double(sweep.theta[i] * 180.0 / M_PI) << ',' << p.bit_errors << ','
            << p.bits_simulated << ',' << format_double(p.ber) << ',' << format_double(p.std_error)
            << '\n';
    }
    return out.str();
}

/// `snr_db,abep` rows for an ABEP curve.
inline std::string abep_csv(const AbepCurve& curve) {
    std::ostringstream out;
    out << "snr_db,abep\n";
    for (const auto& [snr_db, abep] : curve.points)
        out << format_double(snr_db) << ',' << format_double(abep) << '\n';
    return out.str();
}

/// `theta_deg,dmin` rows for an angle-optimization scan.
inline std::string angle_scan_csv(const std::vector<std::pair<double, double>>& scan) {
    std::ostringstream out;
    out << "theta_deg,dmin\n";
    for (const auto& [deg, dmin] : scan) out << format_double(deg) << ',' << format_double(dmin) << '\n';
    return out.str();
}

}  // namespace cqsm
