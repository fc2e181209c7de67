#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "constants.hpp"
#include "geometry.hpp"
#include "lindblad.hpp"
#include "noisequanta.hpp"
#include "numerics.hpp"
#include "wgmodel.hpp"

namespace rydnoise {

struct LNARecord {
    double f;        // Hz
    double T_noise;  // K
    std::string technology;
    std::string citation;
};

struct DipoleRecord {
    int n;
    double f;      // Hz
    double mu_d;   // C m
    double tau_s;  // nS lifetime [s]
    double tau_p;  // nP lifetime [s]
};

template <class T>
struct Table {
    std::vector<T> rows;
    std::vector<std::string> warnings;
};

namespace csv_detail {

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) {
        const auto b = cur.find_first_not_of(" \t\r");
        const auto e = cur.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double number(const std::string& s, int lineno, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("line " + std::to_string(lineno) + ": bad " + what + " '" + s + "'");
    }
}

// Calls row(fields, lineno) for each data line; skips '#' comments and the header.
template <class F>
void read_rows(std::istream& in, std::size_t ncols, F&& row) {
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) { header = true; continue; }
        auto f = split(line);
        if (f.size() != ncols)
            throw std::runtime_error("line " + std::to_string(lineno) + ": expected " + std::to_string(ncols) +
                                     " columns, got " + std::to_string(f.size()));
        row(f, lineno);
    }
}

template <class T>
void finish(Table<T>& t, const std::string& name) {
    if (t.rows.empty()) t.warnings.push_back(name + ": empty table");
    std::stable_sort(t.rows.begin(), t.rows.end(), [](const T& a, const T& b) { return a.f < b.f; });
    for (std::size_t i = 1; i < t.rows.size(); ++i)
        if (t.rows[i].f == t.rows[i - 1].f)
            t.warnings.push_back(name + ": duplicate frequency " + std::to_string(t.rows[i].f) + " Hz");
}

}  // namespace csv_detail

// Columns: f_Hz, T_noise_K, technology, citation
inline Table<LNARecord> load_lna_csv(std::istream& in) {
    Table<LNARecord> t;
    csv_detail::read_rows(in, 4, [&](const std::vector<std::string>& f, int ln) {
        LNARecord r{csv_detail::number(f[0], ln, "frequency"), csv_detail::number(f[1], ln, "noise temperature"), f[2], f[3]};
        if (!(r.f > 0.0) || !(r.T_noise > 0.0))
            throw std::runtime_error("line " + std::to_string(ln) + ": frequency and temperature must be positive");
        t.rows.push_back(r);
    });
    csv_detail::finish(t, "LNA table");
    return t;
}

// Columns: n, f_transition_Hz, mu_d_Cm, tau_nS_s, tau_nP_s
inline Table<DipoleRecord> load_dipole_csv(std::istream& in) {
    Table<DipoleRecord> t;
    csv_detail::read_rows(in, 5, [&](const std::vector<std::string>& f, int ln) {
        DipoleRecord r{static_cast<int>(csv_detail::number(f[0], ln, "n")), csv_detail::number(f[1], ln, "frequency"),
                       csv_detail::number(f[2], ln, "dipole"), csv_detail::number(f[3], ln, "lifetime"),
                       csv_detail::number(f[4], ln, "lifetime")};
        if (!(r.f > 0.0) || !(r.mu_d > 0.0) || r.n <= 0)
            throw std::runtime_error("line " + std::to_string(ln) + ": n, frequency and dipole must be positive");
        t.rows.push_back(r);
    });
    csv_detail::finish(t, "dipole table");
    // Higher n means lower frequency within a series.
    for (std::size_t i = 1; i < t.rows.size(); ++i)
        if (t.rows[i].n >= t.rows[i - 1].n && t.rows[i].f != t.rows[i - 1].f)
            t.warnings.push_back("dipole table: f(n) not monotone at n = " + std::to_string(t.rows[i].n));
    return t;
}

template <class F>
auto load_csv_file(const std::string& path, F&& loader) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return loader(in);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

inline Table<LNARecord> load_lna_csv(const std::string& path) {
    return load_csv_file(path, [](std::istream& in) { return load_lna_csv(in); });
}
inline Table<DipoleRecord> load_dipole_csv(const std::string& path) {
    return load_csv_file(path, [](std::istream& in) { return load_dipole_csv(in); });
}

inline const DipoleRecord* find_state(const std::vector<DipoleRecord>& t, int n) {
    for (const auto& r : t)
        if (r.n == n) return &r;
    return nullptr;
}

// Log-log interpolation of the dipole moment at an arbitrary frequency.
inline double interpolate_dipole(const std::vector<DipoleRecord>& t, double f) {
    require(t.size() >= 2, "need at least two dipole records");
    require(f >= t.front().f && f <= t.back().f, "frequency outside dipole table");
    auto it = std::lower_bound(t.begin(), t.end(), f, [](const DipoleRecord& r, double x) { return r.f < x; });
    if (it == t.begin()) return it->mu_d;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double s = std::log(f / lo.f) / std::log(hi.f / lo.f);
    return std::exp(std::log(lo.mu_d) + s * std::log(hi.mu_d / lo.mu_d));
}

enum class VolumeMode { FixedVolume, CavityVolume };

// Measured free-space reference: 1.25 uV/m/rtHz at n = 70 in a 70 mm, 0.5 mm-waist cell.
struct NEF0Reference {
    int n = 70;
    double nef0 = 1.25e-6;
    double L = 70e-3;
    double w0 = 0.5e-3;
};

inline constexpr double sine_average_penalty = consts::pi / 2.0;

inline double extrapolate_nef0(const std::vector<DipoleRecord>& table, int n, const NEF0Reference& ref, VolumeMode mode,
                               bool sine_average = true) {
    std::string missing;
    const auto* rn = find_state(table, n);
    const auto* rr = find_state(table, ref.n);
    if (!rn) missing += " " + std::to_string(n);
    if (!rr) missing += " " + std::to_string(ref.n);
    if (!missing.empty()) throw std::runtime_error("dipole table lacks n =" + missing);
    double v = ref.nef0 * rr->mu_d / rn->mu_d;
    if (mode == VolumeMode::CavityVolume) {
        const auto cav = survey_sizing(rn->f);
        v *= (ref.L * ref.w0) / (cav.L * cav.w0);
        if (sine_average) v *= sine_average_penalty;
    }
    return v;
}

// Free-space NET of a dipole-pattern sensor with intrinsic nef0 at T = 0.
inline double freespace_net(double f, double nef0, DetectionMode mode) {
    return temperature_from_nef(nef0, f) + noise_quantum(f, 0.0, mode) / consts::k_B;
}

enum class Nef0Source { Extrapolated, Model };

struct SweepConfig {
    std::vector<DipoleRecord> dipoles;
    std::vector<LNARecord> lnas;
    NEF0Reference reference;
    Nef0Source source = Nef0Source::Extrapolated;
    double sigma = 25e6;
    double T_p = room_temperature;
    double T_A = 0.0;
    cplx Gamma_L{-1.0, 0.0};
    DetectionMode mode = DetectionMode::Heterodyne;
    int model_grid = 9;  // Rabi grid per axis for the Model source
};

struct SweepRow {
    int n = 0;
    double f = 0.0;
    double mu_d = 0.0;
    double nef0_fixed_volume = 0.0;   // free space, reference cell volume
    double nef0_scaled_volume = 0.0;  // free space, cavity-sized volume
    double nef0_cavity = 0.0;         // cavity-sized volume with sine-average penalty
    double net_freespace = 0.0;       // fixed volume
    double net_freespace_scaled = 0.0;
    double net_cavity_optimal = 0.0;
    double net_cavity_critical = 0.0;
    double a = 0.0, b = 0.0, L = 0.0, w0 = 0.0;
    double coupling_ratio = 0.0;      // gamma_c / gamma_i at the optimum
    double z_opt = 0.0;
    double lna_f = 0.0, lna_T = 0.0;  // nearest survey point (log frequency)
    std::string lna_technology;
    std::string error;
};

inline const LNARecord* nearest_lna(const std::vector<LNARecord>& t, double f) {
    const LNARecord* best = nullptr;
    double d = std::numeric_limits<double>::infinity();
    for (const auto& r : t) {
        const double x = std::abs(std::log(r.f / f));
        if (x < d) { d = x; best = &r; }
    }
    return best;
}

inline double model_nef0(const DipoleRecord& r, const SurveyCavity& cav, int grid) {
    FourLevelSystem s;
    s.length = cav.L;
    s.w0 = cav.w0;
    s.mu_d = r.mu_d;
    s.gamma32 = 1.0 / r.tau_s;
    s.gamma43 = 1.0 / r.tau_p;
    s.transit_broadening = true;
    return optimize_rabi(s, RabiBounds{}, grid, 1).nef0;
}

inline SweepRow sweep_row(const SweepConfig& cfg, const DipoleRecord& r) {
    SweepRow row;
    row.n = r.n;
    row.f = r.f;
    row.mu_d = r.mu_d;
    const auto cav = survey_sizing(r.f);
    row.a = cav.a;
    row.b = cav.b;
    row.L = cav.L;
    row.w0 = cav.w0;
    if (const auto* lna = nearest_lna(cfg.lnas, r.f)) {
        row.lna_f = lna->f;
        row.lna_T = lna->T_noise;
        row.lna_technology = lna->technology;
    }
    try {
        row.nef0_fixed_volume = extrapolate_nef0(cfg.dipoles, r.n, cfg.reference, VolumeMode::FixedVolume);
        row.nef0_scaled_volume = extrapolate_nef0(cfg.dipoles, r.n, cfg.reference, VolumeMode::CavityVolume, false);
        row.nef0_cavity = cfg.source == Nef0Source::Model
                              ? model_nef0(r, cav, cfg.model_grid) * sine_average_penalty
                              : row.nef0_scaled_volume * sine_average_penalty;
        row.net_freespace = freespace_net(r.f, row.nef0_fixed_volume, cfg.mode);
        row.net_freespace_scaled = freespace_net(r.f, row.nef0_scaled_volume, cfg.mode);

        const RectWaveguide guide{cav.a, cav.b, cfg.sigma, {1.0, 0.0}};
        WaveguideResonator w;
        w.kappa = te10_propagation(guide, r.f);
        w.L = cav.L;
        w.Gamma_L = cfg.Gamma_L;
        w.K_W = te10_KW(guide, r.f);
        w.T_p = cfg.T_p;
        w.T_L = cfg.T_p;
        const double loss = 2.0 * w.alpha() * w.L;  // gamma_i tau
        WGFamily fam{w, r.f, 0.05 * loss, 5.0, 0.0, -1.0, 401};
        const auto opt = optimal_design(fam, cfg.T_A, cfg.mode, row.nef0_cavity);
        row.net_cavity_optimal = opt.nep / consts::k_B;
        row.coupling_ratio = opt.coupling / loss;
        row.z_opt = opt.z;
        const auto crit = optimal_position(fam.at(loss), r.f, cfg.T_A, cfg.mode, row.nef0_cavity, 0.0, w.L, 401);
        row.net_cavity_critical = crit.nep / consts::k_B;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
    std::vector<DipoleRecord> rows = cfg.dipoles;
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.f < b.f; });
    std::vector<SweepRow> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(sweep_row(cfg, r));
    return out;
}

// Frequency of the sharpest log-log slope change, comparing mean slopes over
// `window` intervals on either side.
inline double find_knee(const std::vector<double>& f, const std::vector<double>& y, int window = 4) {
    require(f.size() == y.size() && f.size() >= static_cast<std::size_t>(2 * window + 2), "not enough points for knee");
    std::vector<double> s(f.size() - 1);
    for (std::size_t i = 0; i + 1 < f.size(); ++i) s[i] = std::log(y[i + 1] / y[i]) / std::log(f[i + 1] / f[i]);
    double best = -1.0, fk = f.front();
    for (std::size_t i = window; i + window <= s.size(); ++i) {
        double lo = 0.0, hi = 0.0;
        for (int k = 0; k < window; ++k) {
            lo += s[i - 1 - k];
            hi += s[i + k];
        }
        const double d = std::abs(hi - lo) / window;
        if (d > best) { best = d; fk = f[i]; }
    }
    return fk;
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, DetectionMode mode) {
    const bool het = mode == DetectionMode::Heterodyne;
    os << "n,f_Hz,mu_d_Cm,nef0_fixed_volume_V_m_rtHz,nef0_scaled_volume_V_m_rtHz,nef0_cavity_V_m_rtHz,"
          "net_freespace_K,net_freespace_scaled_K,net_cavity_optimal_K,net_cavity_critical_K,"
          "net_cavity_optimal_ssb_K,comparable_lna_K,a_m,b_m,L_m,w0_m,coupling_ratio,z_opt_m,"
          "lna_f_Hz,lna_T_K,lna_technology,error\n";
    for (const auto& r : rows) {
        const double ssb = het ? 0.5 * r.net_cavity_optimal : r.net_cavity_optimal;
        const double vals[] = {r.f, r.mu_d, r.nef0_fixed_volume, r.nef0_scaled_volume, r.nef0_cavity,
                               r.net_freespace, r.net_freespace_scaled, r.net_cavity_optimal, r.net_cavity_critical,
                               ssb, ssb, r.a, r.b, r.L, r.w0, r.coupling_ratio, r.z_opt, r.lna_f, r.lna_T};
        os << r.n;
        for (double v : vals) os << ',' << format_number(v);
        os << ',' << r.lna_technology << ',' << r.error << '\n';
    }
}

}  // namespace rydnoise
