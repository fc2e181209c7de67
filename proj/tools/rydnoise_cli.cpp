// rydnoise command-line front end: JSON configs in, CSV out.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <rydnoise/rydnoise.hpp>

using json = nlohmann::json;
using namespace rydnoise;

namespace {

// Bad input: reported with exit code 2.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Dim { None, Int, Bool, Text, Hz, Meter, Kelvin, Second, Nef, Radian, Conductivity, Dipole, Density, Attenuation };

struct Suffix {
    const char* name;
    double scale;
};

const std::map<Dim, std::vector<Suffix>>& suffixes() {
    static const std::map<Dim, std::vector<Suffix>> t = {
        {Dim::Hz, {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}, {"THz", 1e12}}},
        {Dim::Meter, {{"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}}},
        {Dim::Kelvin, {{"K", 1.0}, {"mK", 1e-3}}},
        {Dim::Second, {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}, {"fs", 1e-15}}},
        {Dim::Nef,
         {{"V", 1.0}, {"mV", 1e-3}, {"uV", 1e-6}, {"nV", 1e-9}, {"V/m/rtHz", 1.0}, {"mV/m/rtHz", 1e-3},
          {"uV/m/rtHz", 1e-6}, {"nV/m/rtHz", 1e-9}}},
        {Dim::Radian, {{"rad", 1.0}, {"deg", consts::pi / 180.0}}},
        {Dim::Conductivity, {{"S/m", 1.0}, {"MS/m", 1e6}}},
        {Dim::Dipole, {{"Cm", 1.0}, {"ea0", consts::e * consts::a0}}},
        {Dim::Density, {{"m^-3", 1.0}, {"cm^-3", 1e6}}},
        {Dim::Attenuation, {{"Np/m", 1.0}, {"dB/m", 1.0 / (20.0 * std::log10(std::exp(1.0)))}}},
    };
    return t;
}

const char* unit_name(Dim d) {
    switch (d) {
    case Dim::Hz: return "Hz";
    case Dim::Meter: return "m";
    case Dim::Kelvin: return "K";
    case Dim::Second: return "s";
    case Dim::Nef: return "V/m/rtHz";
    case Dim::Radian: return "rad";
    case Dim::Conductivity: return "S/m";
    case Dim::Dipole: return "C m";
    case Dim::Density: return "m^-3";
    case Dim::Attenuation: return "Np/m";
    case Dim::Int: return "integer";
    case Dim::Bool: return "bool";
    case Dim::Text: return "text";
    case Dim::None: return "1";
    }
    return "";
}

struct Key {
    std::string name;
    Dim dim;
    json def;
    std::string help;
    std::vector<std::string> choices = {};
};

struct Command {
    std::string name;
    std::string summary;
    std::vector<Key> keys;
};

const std::string data_dir = RYDNOISE_DATA_DIR;

const Key k_mode{"mode", Dim::Text, "heterodyne", "microwave detection", {"homodyne", "heterodyne"}};
const Key k_Tp{"T_p", Dim::Kelvin, 290.0, "structure physical temperature"};
const Key k_TA{"T_A", Dim::Kelvin, 0.0, "antenna / input temperature"};

std::vector<Key> resonator_keys() {
    return {{"f", Dim::Hz, 10e9, "resonance / signal frequency"},
            {"a", Dim::Meter, 22.86e-3, "waveguide broad wall"},
            {"b", Dim::Meter, 10.16e-3, "waveguide narrow wall"},
            {"Q_i", Dim::None, 2000.0, "intrinsic quality factor"},
            k_Tp,
            k_TA,
            k_mode,
            {"nef0", Dim::Nef, 1.25e-6, "intrinsic atomic NEF"}};
}

std::vector<Key> line_keys() {
    auto k = resonator_keys();
    k.insert(k.end(), {{"L", Dim::Meter, 17.85e-3, "line length"},
                       {"alpha", Dim::Attenuation, 0.0, "line attenuation; 0 derives it from Q_i"},
                       {"Gamma_L", Dim::None, -1.0, "load reflection magnitude with sign"},
                       {"Gamma_L_phase", Dim::Radian, 0.0, "extra load reflection phase"},
                       {"K_W", Dim::None, 0.0, "field per root travelling power [V m^-1 W^-1/2]; 0 uses TE10 centre"},
                       {"T_L", Dim::Kelvin, 290.0, "load temperature"},
                       {"component", Dim::Text, "transverse", "sensed field component", {"transverse", "longitudinal"}}});
    return k;
}

const std::vector<Command>& commands() {
    static const std::vector<Command> c = [] {
        std::vector<Command> v;
        v.push_back({"limits", "free-space NEF limits versus frequency",
                     {{"f_min", Dim::Hz, 1e8, "first frequency"},
                      {"f_max", Dim::Hz, 1e14, "last frequency"},
                      {"points", Dim::Int, 241, "log-spaced frequencies"},
                      {"T", Dim::Kelvin, 290.0, "background temperature"},
                      {"G", Dim::None, 1.5, "sensor gain"}}});
        auto ho = resonator_keys();
        ho.insert(ho.end(), {{"tau", Dim::Second, 1e-10, "phase round-trip delay"},
                             {"tau_ratio", Dim::None, 0.0, "group/phase delay ratio; 0 uses TE101"},
                             {"K_U", Dim::None, 0.0, "field per root stored energy [V m^-1 J^-1/2]; 0 uses TE101"},
                             {"C_min", Dim::None, 0.01, "smallest coupling ratio Q_i/Q_c"},
                             {"C_max", Dim::None, 1000.0, "largest coupling ratio"},
                             {"points", Dim::Int, 121, "log-spaced coupling ratios"},
                             {"forms", Dim::Text, "approximate", "cooling factor and K^2 forms", {"approximate", "exact"}}});
        v.push_back({"ho", "single-mode resonator NET versus coupling", ho});
        auto wg = line_keys();
        wg.insert(wg.end(), {{"C", Dim::None, 10.0, "coupling ratio Q_i/Q_c"},
                             {"points", Dim::Int, 201, "atom positions along the line"}});
        v.push_back({"wg", "transmission-line resonator NET versus atom position", wg});
        auto opt = line_keys();
        opt.insert(opt.end(), {{"nef0_list", Dim::Nef, json::array({0.1e-6, 0.2e-6, 0.5e-6, 1.25e-6, 2.5e-6, 5e-6}),
                                "intrinsic NEF values (list)"},
                               {"C_min", Dim::None, 0.05, "smallest coupling ratio searched"},
                               {"C_max", Dim::None, 5000.0, "largest coupling ratio searched"}});
        v.push_back({"optimize", "optimal coupling and position for each intrinsic NEF", opt});
        v.push_back({"sweep", "Rydberg transition survey with cavity sizing",
                     {{"dipole_csv", Dim::Text, data_dir + "/rb85_dipoles.csv", "dipole / lifetime table"},
                      {"lna_csv", Dim::Text, data_dir + "/lna_survey.csv", "LNA survey table"},
                      {"source", Dim::Text, "extrapolated", "cavity NEF0 source", {"extrapolated", "model"}},
                      {"sigma", Dim::Conductivity, 25e6, "wall conductivity"},
                      k_Tp,
                      k_TA,
                      k_mode,
                      {"n_ref", Dim::Int, 70, "reference principal quantum number"},
                      {"nef0_ref", Dim::Nef, 1.25e-6, "reference intrinsic NEF"},
                      {"L_ref", Dim::Meter, 70e-3, "reference cell length"},
                      {"w0_ref", Dim::Meter, 0.5e-3, "reference beam waist"},
                      {"model_grid", Dim::Int, 9, "Rabi grid per axis for the model source"}}});
        v.push_back({"lindblad", "four-level NEF0 landscape over probe and coupling Rabi frequencies",
                     {{"rabi_p_min", Dim::Hz, 0.3e6, "probe Rabi frequency lower bound (cyclic)"},
                      {"rabi_p_max", Dim::Hz, 30e6, "probe Rabi frequency upper bound (cyclic)"},
                      {"rabi_c_min", Dim::Hz, 0.3e6, "coupling Rabi frequency lower bound (cyclic)"},
                      {"rabi_c_max", Dim::Hz, 30e6, "coupling Rabi frequency upper bound (cyclic)"},
                      {"grid", Dim::Int, 41, "grid points per axis"},
                      {"starts", Dim::Int, 3, "Nelder-Mead starts from the best cells"},
                      {"length", Dim::Meter, 70e-3, "cell length"},
                      {"w0", Dim::Meter, 1e-3, "probe beam waist"},
                      {"temperature", Dim::Kelvin, 300.0, "vapour temperature"},
                      {"density", Dim::Density, 0.0, "atom density; 0 uses the Doppler-equivalent density"},
                      {"dephasing", Dim::Hz, 100e3, "added dephasing per state (cyclic)"},
                      {"mu_d", Dim::Dipole, 2933.9 * consts::e * consts::a0, "RF transition dipole"},
                      {"transit", Dim::Bool, false, "add transit-time dephasing"}}});
        v.push_back({"convert", "NEF <-> noise temperature",
                     {{"f", Dim::Hz, 10e9, "signal frequency"},
                      {"G", Dim::None, 1.5, "sensor gain"},
                      {"nef", Dim::Nef, json(), "NEF to convert (give nef or T)"},
                      {"T", Dim::Kelvin, json(), "noise temperature to convert (give nef or T)"}}});
        v.push_back({"gain", "effective gain of a finite atomic ensemble",
                     {{"f", Dim::Hz, 10e9, "signal frequency"},
                      {"L_min", Dim::Meter, 0.0, "shortest interaction length"},
                      {"L_max", Dim::Meter, 0.3, "longest interaction length"},
                      {"points", Dim::Int, 61, "lengths"},
                      {"beta", Dim::Radian, 0.0, "LO angle from the beam axis"}}});
        return v;
    }();
    return c;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double parse_quantity(const std::string& text, const Key& k) {
    const std::string s = trim(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw usage_error(k.name + ": not a number: '" + text + "'");
    const std::string suf = trim(std::string(end));
    if (suf.empty()) return v;
    const auto it = suffixes().find(k.dim);
    if (it != suffixes().end())
        for (const auto& x : it->second)
            if (suf == x.name) {
                // Divide by exact powers of ten so "1.25uV" parses to the same double as 1.25e-6.
                const double inv = std::round(1.0 / x.scale);
                if (x.scale < 1.0 && std::abs(inv * x.scale - 1.0) < 1e-12) return v / inv;
                return v * x.scale;
            }
    throw usage_error(k.name + ": unit '" + suf + "' not valid for " + unit_name(k.dim));
}

json normalise(const json& in, const Key& k) {
    if (in.is_null()) return in;
    if (in.is_array()) {
        json out = json::array();
        for (const auto& e : in) out.push_back(normalise(e, k));
        return out;
    }
    switch (k.dim) {
    case Dim::Text: {
        if (!in.is_string()) throw usage_error(k.name + ": expected text");
        const auto s = in.get<std::string>();
        if (!k.choices.empty() && std::find(k.choices.begin(), k.choices.end(), s) == k.choices.end())
            throw usage_error(k.name + ": '" + s + "' is not one of the allowed values");
        return s;
    }
    case Dim::Bool:
        if (in.is_boolean()) return in;
        if (in.is_string() && (in == "true" || in == "1")) return true;
        if (in.is_string() && (in == "false" || in == "0")) return false;
        throw usage_error(k.name + ": expected true or false");
    case Dim::Int: {
        const double v = in.is_number() ? in.get<double>() : in.is_string() ? parse_quantity(in.get<std::string>(), k)
                                                                             : NAN;
        if (!(std::isfinite(v) && v == std::floor(v))) throw usage_error(k.name + ": expected an integer");
        return static_cast<long long>(v);
    }
    default: {
        double v = NAN;
        if (in.is_number()) v = in.get<double>();
        else if (in.is_string()) v = parse_quantity(in.get<std::string>(), k);
        else throw usage_error(k.name + ": expected a number");
        if (!std::isfinite(v)) throw usage_error(k.name + ": value must be finite");
        return v;
    }
    }
}

// Resolved configuration: defaults, then the config file, then --set overrides.
json resolve(const Command& cmd, const json& file, const std::vector<std::string>& sets) {
    json out = json::object();
    for (const auto& k : cmd.keys) out[k.name] = k.def;
    auto find_key = [&](const std::string& n) -> const Key& {
        for (const auto& k : cmd.keys)
            if (k.name == n) return k;
        throw usage_error("unknown key '" + n + "' for " + cmd.name);
    };
    if (!file.is_null()) {
        if (!file.is_object()) throw usage_error("config must be a JSON object");
        for (const auto& [n, v] : file.items()) out[n] = normalise(v, find_key(n));
    }
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw usage_error("--set expects key=value, got '" + s + "'");
        const auto n = trim(s.substr(0, eq));
        const Key& k = find_key(n);
        const std::string val = s.substr(eq + 1);
        if (k.def.is_array()) {
            json arr = json::array();
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ',')) arr.push_back(normalise(item, k));
            out[n] = arr;
        } else {
            out[n] = normalise(val, k);
        }
    }
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string help_keys(const Command& c) {
    std::ostringstream os;
    os << "Config keys for '" << c.name << "' (SI units in files; strings may carry a unit suffix):\n";
    for (const auto& k : c.keys) {
        std::string def = k.def.is_null() ? "(unset)" : k.def.dump();
        char line[256];
        std::snprintf(line, sizeof line, "  %-14s [%s] default %s\n      %s", k.name.c_str(), unit_name(k.dim), def.c_str(),
                      k.help.c_str());
        os << line;
        if (!k.choices.empty()) {
            os << " (";
            for (std::size_t i = 0; i < k.choices.size(); ++i) os << (i ? "|" : "") << k.choices[i];
            os << ")";
        }
        if (const auto it = suffixes().find(k.dim); it != suffixes().end()) {
            os << "; suffixes:";
            for (const auto& x : it->second) os << ' ' << x.name;
        }
        os << '\n';
    }
    return os.str();
}

struct Params {
    const json& j;
    double num(const char* n) const { return j.at(n).get<double>(); }
    int integer(const char* n) const { return static_cast<int>(j.at(n).get<long long>()); }
    bool flag(const char* n) const { return j.at(n).get<bool>(); }
    std::string str(const char* n) const { return j.at(n).get<std::string>(); }
    bool has(const char* n) const { return !j.at(n).is_null(); }
    DetectionMode mode() const { return str("mode") == "homodyne" ? DetectionMode::Homodyne : DetectionMode::Heterodyne; }
};

void need(bool ok, const std::string& msg) {
    if (!ok) throw usage_error(msg);
}

std::string fmt(double v) { return format_number(v); }

void warn(const std::string& s) { std::cerr << "warning: " << s << '\n'; }

// --- subcommands --------------------------------------------------------------

void run_limits(const Params& p, std::ostream& os) {
    const double f0 = p.num("f_min"), f1 = p.num("f_max"), T = p.num("T"), G = p.num("G");
    const int n = p.integer("points");
    need(f0 > 0.0 && f1 > f0, "limits: need 0 < f_min < f_max");
    need(n >= 2, "limits: points must be >= 2");
    need(T >= 0.0 && G > 0.0, "limits: need T >= 0 and G > 0");
    os << "# crossover_homodyne_Hz=" << fmt(T > 0.0 ? quantum_thermal_crossover(T, DetectionMode::Homodyne) : 0.0) << '\n';
    os << "# crossover_heterodyne_Hz=" << fmt(T > 0.0 ? quantum_thermal_crossover(T, DetectionMode::Heterodyne) : 0.0)
       << '\n';
    os << "f_Hz,nef_thermal_hom,nef_quantum_hom,nef_total_hom,nef_thermal_het,nef_quantum_het,nef_total_het\n";
    const double scale = std::sqrt(dipole_gain / G);
    for (double f : num::logspace(f0, f1, n)) {
        os << fmt(f);
        for (auto m : {DetectionMode::Homodyne, DetectionMode::Heterodyne}) {
            const NoiseEnvironment env{f, T, m};
            os << ',' << fmt(scale * nef_extrinsic_thermal(env)) << ',' << fmt(scale * nef_extrinsic_vacuum(f, m)) << ','
               << fmt(scale * nef_extrinsic(env));
        }
        os << '\n';
    }
}

HOResonator ho_from(const Params& p) {
    const double f = p.num("f");
    const RectWaveguide wg{p.num("a"), p.num("b")};
    need(p.num("Q_i") > 0.0 && p.num("tau") > 0.0, "ho: Q_i and tau must be positive");
    double KU = p.num("K_U"), ratio = p.num("tau_ratio");
    if (KU <= 0.0 || ratio <= 0.0) {
        const auto t = te101_constants(wg, f);
        if (KU <= 0.0) KU = t.K_U;
        if (ratio <= 0.0) ratio = t.tau_ratio;
    }
    return HOResonator::from_q(f, p.num("Q_i"), p.num("Q_i"), p.num("tau"), p.num("tau") * ratio, KU);
}

void run_ho(const Params& p, bool ssb, std::ostream& os) {
    const auto base = ho_from(p);
    const HOEnvironment env{p.num("T_A"), p.num("T_p"), p.mode()};
    const double nef0 = p.num("nef0");
    const int n = p.integer("points");
    const Forms forms = p.str("forms") == "exact" ? Forms::Exact : Forms::Approximate;
    need(p.num("C_min") > 0.0 && p.num("C_max") > p.num("C_min") && n >= 2, "ho: need 0 < C_min < C_max, points >= 2");
    need(nef0 >= 0.0, "ho: nef0 must be >= 0");
    const double gopt = optimal_coupling(base, env, nef0, 0.0, forms);
    double first_bad = std::numeric_limits<double>::infinity();
    os << "kind,C,Q_c,K_sq_V2_m2_W,net_K,nef_equiv_V_m_rtHz\n";
    auto row = [&](const char* kind, double C) {
        const auto r = with_coupling(base, C * base.gamma_i);
        if (!r.high_q() && C < first_bad) first_bad = C;
        const double net = ho_net(r, env, nef0, 0.0, forms, ssb);
        os << kind << ',' << fmt(C) << ',' << fmt(HOResonator::q_from_rate(r.f0, r.gamma_c)) << ','
           << fmt(field_per_power_sq(r, 0.0, forms)) << ',' << fmt(net) << ',' << fmt(nef_from_temperature(net, r.f0))
           << '\n';
    };
    for (double C : num::logspace(p.num("C_min"), p.num("C_max"), n)) row("sweep", C);
    if (std::isfinite(gopt)) row("optimum", gopt / base.gamma_i);
    row("critical", 1.0);
    if (std::isfinite(first_bad))
        warn("gamma*tau exceeds 0.1 from C = " + fmt(first_bad) + "; single-mode rows beyond it are outside the model");
}

struct Line {
    WaveguideResonator w;
    double gamma_i_tau;
    std::function<double(double)> beta_of;
};

Line line_from(const Params& p, double C) {
    const double f = p.num("f"), om = consts::two_pi * f;
    const RectWaveguide g{p.num("a"), p.num("b")};
    need(p.num("L") > 0.0, "wg: L must be positive");
    need(std::abs(p.num("Gamma_L")) <= 1.0, "wg: |Gamma_L| must be <= 1");
    need(C > 0.0, "wg: coupling ratio must be positive");
    Line l{{}, 0.0, [g](double w) { return te10_beta(g, w); }};
    const double beta = te10_beta(g, om);
    double alpha = p.num("alpha");
    if (alpha <= 0.0) {
        need(p.num("Q_i") > 0.0, "wg: Q_i must be positive when alpha = 0");
        alpha = HOResonator::rate_from_q(f, p.num("Q_i")) * beta / om;
    }
    auto& w = l.w;
    w.kappa = {alpha, beta};
    w.L = p.num("L");
    w.Gamma_L = std::polar(std::abs(p.num("Gamma_L")), (p.num("Gamma_L") < 0.0 ? consts::pi : 0.0) + p.num("Gamma_L_phase"));
    w.K_W = p.num("K_W") > 0.0 ? p.num("K_W") : te10_KW(g, f);
    w.T_p = p.num("T_p");
    w.T_L = p.num("T_L");
    w.component = p.str("component") == "longitudinal" ? FieldComponent::Longitudinal : FieldComponent::Transverse;
    l.gamma_i_tau = 2.0 * alpha * w.L;
    w.S22 = resonant_S22(std::exp(-C * l.gamma_i_tau), w.kappa, w.L, w.Gamma_L);
    return l;
}

void run_wg(const Params& p, bool ssb, std::ostream& os) {
    const auto l = line_from(p, p.num("C"));
    const double f = p.num("f"), nef0 = p.num("nef0");
    const int n = p.integer("points");
    need(n >= 2 && nef0 >= 0.0, "wg: points >= 2 and nef0 >= 0 required");
    const auto mode = p.mode();
    const HOEnvironment env{p.num("T_A"), p.num("T_p"), mode};
    auto net = [&](double nep) { return net_from_nep(nep, mode, ssb); };
    {
        const auto r = ho_equivalent(l.w, f, l.w.L, l.beta_of);
        if (!r.high_q()) warn("gamma*tau = " + fmt(r.gamma() * r.tau) + "; the single-mode comparison column is invalid");
    }
    os << "kind,z_m,z_over_L,net_K,net_ho_K,K_sq_V2_m2_W\n";
    auto row = [&](const char* kind, double z) {
        const auto s = wg_nep(l.w, f, z, p.num("T_A"), mode, nef0);
        const auto r = ho_equivalent(l.w, f, z, l.beta_of);
        const double ho = ho_net(r, env, nef0, 0.0, Forms::Approximate, ssb);
        os << kind << ',' << fmt(z) << ',' << fmt(z / l.w.L) << ',' << fmt(net(s.nep)) << ',' << fmt(ho) << ','
           << fmt(s.K2) << '\n';
    };
    for (double z : num::linspace(0.0, l.w.L, n)) row("sweep", z);
    const auto o = optimal_position(l.w, f, p.num("T_A"), mode, nef0, 0.0, l.w.L);
    if (o.degenerate) warn("NET is flat along the line; reported optimum is arbitrary");
    row("optimum", o.z);
}

void run_optimize(const Params& p, bool ssb, std::ostream& os) {
    auto l = line_from(p, 1.0);
    const double f = p.num("f");
    const auto mode = p.mode();
    const HOEnvironment env{p.num("T_A"), p.num("T_p"), mode};
    need(p.num("C_min") > 0.0 && p.num("C_max") > p.num("C_min"), "optimize: need 0 < C_min < C_max");
    const WGFamily fam{l.w, f, p.num("C_min") * l.gamma_i_tau, p.num("C_max") * l.gamma_i_tau, 0.0, -1.0, 401};
    // Single-mode columns use the field maximum a quarter wave in from the load.
    const double z_anti = std::max(0.0, l.w.L - consts::pi / (2.0 * l.w.beta()));
    os << "nef0_V_m_rtHz,ho_C_opt,ho_net_opt_K,ho_net_critical_K,wg_C_opt,wg_z_opt_m,wg_z_opt_over_L,wg_net_opt_K\n";
    for (const auto& v : p.j.at("nef0_list")) {
        const double nef0 = v.get<double>();
        need(nef0 >= 0.0, "optimize: nef0 values must be >= 0");
        const auto r = ho_equivalent(l.w, f, z_anti, l.beta_of);
        const double g = optimal_coupling(r, env, nef0);
        const double ho_opt = ho_net(with_coupling(r, g), env, nef0, 0.0, Forms::Approximate, ssb);
        const double ho_crit = ho_net(with_coupling(r, r.gamma_i), env, nef0, 0.0, Forms::Approximate, ssb);
        const auto d = optimal_design(fam, p.num("T_A"), mode, nef0);
        os << fmt(nef0) << ',' << fmt(g / r.gamma_i) << ',' << fmt(ho_opt) << ',' << fmt(ho_crit) << ','
           << fmt(d.coupling / l.gamma_i_tau) << ',' << fmt(d.z) << ',' << fmt(d.z / l.w.L) << ','
           << fmt(net_from_nep(d.nep, mode, ssb)) << '\n';
    }
}

void run_sweep_cmd(const Params& p, std::ostream& os) {
    SweepConfig cfg;
    const auto d = load_dipole_csv(p.str("dipole_csv"));
    const auto l = load_lna_csv(p.str("lna_csv"));
    for (const auto& w : d.warnings) warn(w);
    for (const auto& w : l.warnings) warn(w);
    cfg.dipoles = d.rows;
    cfg.lnas = l.rows;
    cfg.source = p.str("source") == "model" ? Nef0Source::Model : Nef0Source::Extrapolated;
    cfg.sigma = p.num("sigma");
    cfg.T_p = p.num("T_p");
    cfg.T_A = p.num("T_A");
    cfg.mode = p.mode();
    cfg.reference = {p.integer("n_ref"), p.num("nef0_ref"), p.num("L_ref"), p.num("w0_ref")};
    cfg.model_grid = p.integer("model_grid");
    need(cfg.sigma > 0.0 && cfg.model_grid >= 2, "sweep: sigma > 0 and model_grid >= 2 required");
    need(cfg.reference.nef0 > 0.0 && cfg.reference.L > 0.0 && cfg.reference.w0 > 0.0, "sweep: reference must be positive");
    const auto rows = run_sweep(cfg);
    for (const auto& r : rows)
        if (!r.error.empty()) warn("n = " + std::to_string(r.n) + ": " + r.error);
    write_sweep_csv(os, rows, cfg.mode);
}

void run_lindblad(const Params& p, std::ostream& os) {
    FourLevelSystem s;
    s.length = p.num("length");
    s.w0 = p.num("w0");
    s.temperature = p.num("temperature");
    s.density = p.num("density") > 0.0 ? p.num("density") : rb85::doppler_equivalent_density(s.temperature);
    s.gamma_d = consts::two_pi * p.num("dephasing");
    s.mu_d = p.num("mu_d");
    s.transit_broadening = p.flag("transit");
    need(s.length > 0.0 && s.w0 > 0.0 && s.temperature > 0.0 && s.mu_d > 0.0, "lindblad: lengths, temperature, mu_d > 0");
    const RabiBounds bd{consts::two_pi * p.num("rabi_p_min"), consts::two_pi * p.num("rabi_p_max"),
                        consts::two_pi * p.num("rabi_c_min"), consts::two_pi * p.num("rabi_c_max")};
    const int n = p.integer("grid");
    need(n >= 3 && p.integer("starts") >= 0, "lindblad: grid >= 3 and starts >= 0");
    const auto o = optimize_rabi(s, bd, n, p.integer("starts"));
    const double h = 1.0 / consts::two_pi;
    os << "# optimum rabi_p_Hz=" << fmt(o.omega_p * h) << " rabi_c_Hz=" << fmt(o.omega_c * h)
       << " lo_Hz=" << fmt(o.omega_rf * h) << " nef0=" << fmt(o.nef0) << '\n';
    for (auto k : grid_local_minima(o.grid, o.n))
        os << "# grid_local_minimum rabi_p_Hz=" << fmt(o.grid[k].omega_p * h) << " rabi_c_Hz=" << fmt(o.grid[k].omega_c * h)
           << " nef0=" << fmt(o.grid[k].nef0) << '\n';
    os << "rabi_p_Hz,rabi_c_Hz,lo_Hz,nef0_V_m_rtHz\n";
    for (const auto& c : o.grid)
        os << fmt(c.omega_p * h) << ',' << fmt(c.omega_c * h) << ',' << fmt(c.omega_rf * h) << ',' << fmt(c.nef0) << '\n';
}

void run_convert(const Params& p, std::ostream& os) {
    const double f = p.num("f"), G = p.num("G");
    need(p.has("nef") != p.has("T"), "convert: give exactly one of nef or T");
    need(f > 0.0 && G > 0.0, "convert: f and G must be positive");
    os << "f_Hz,G,nef_V_m_rtHz,T_K\n";
    if (p.has("nef")) {
        need(p.num("nef") >= 0.0, "convert: nef must be >= 0");
        os << fmt(f) << ',' << fmt(G) << ',' << fmt(p.num("nef")) << ',' << fmt(temperature_from_nef(p.num("nef"), f, G))
           << '\n';
    } else {
        need(p.num("T") >= 0.0, "convert: T must be >= 0");
        os << fmt(f) << ',' << fmt(G) << ',' << fmt(nef_from_temperature(p.num("T"), f, G)) << ',' << fmt(p.num("T"))
           << '\n';
    }
}

void run_gain(const Params& p, std::ostream& os) {
    const double l0 = consts::c / p.num("f");
    const int n = p.integer("points");
    need(p.num("L_min") >= 0.0 && p.num("L_max") >= p.num("L_min") && n >= 1, "gain: need 0 <= L_min <= L_max, points >= 1");
    os << "L_m,L_over_lambda0,G,nef_scale\n";
    const auto Ls = n == 1 ? std::vector<double>{p.num("L_min")} : num::linspace(p.num("L_min"), p.num("L_max"), n);
    for (double L : Ls) {
        const double G = effective_gain(BeamGeometry::from_beta(L, l0, p.num("beta")));
        os << fmt(L) << ',' << fmt(L / l0) << ',' << fmt(G) << ',' << fmt(gain_correction(1.0, G)) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rydnoise: noise limits of Rydberg-atom receivers in free space and in resonant structures"};
    app.require_subcommand(1);
    std::string config_path, out_path, format = "csv";
    std::vector<std::string> sets;
    bool ssb = false;
    app.add_option("--config", config_path, "JSON config file (keys listed per subcommand)");
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--set", sets, "override a config key: key=value, unit suffixes allowed")->take_all();
    app.add_flag("--ssb", ssb, "ho, wg, optimize: report heterodyne NET single-sideband (halved) for LNA comparison");
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv"}));

    std::string all_keys;
    std::map<std::string, CLI::App*> subs;
    for (const auto& c : commands()) {
        auto* s = app.add_subcommand(c.name, c.summary);
        s->fallthrough();
        s->footer(help_keys(c));
        subs[c.name] = s;
        all_keys += help_keys(c) + "\n";
    }
    app.footer(all_keys);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    const Command* cmd = nullptr;
    for (const auto& c : commands())
        if (subs[c.name]->parsed()) cmd = &c;

    try {
        json file;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw usage_error("cannot open config " + config_path);
            try {
                file = json::parse(in);
            } catch (const json::parse_error& e) {
                throw usage_error(config_path + ": " + e.what());
            }
        }
        const json cfg = resolve(*cmd, file, sets);
        std::ostringstream body;
        const Params p{cfg};
        if (cmd->name == "limits") run_limits(p, body);
        else if (cmd->name == "ho") run_ho(p, ssb, body);
        else if (cmd->name == "wg") run_wg(p, ssb, body);
        else if (cmd->name == "optimize") run_optimize(p, ssb, body);
        else if (cmd->name == "sweep") run_sweep_cmd(p, body);
        else if (cmd->name == "lindblad") run_lindblad(p, body);
        else if (cmd->name == "convert") run_convert(p, body);
        else if (cmd->name == "gain") run_gain(p, body);

        const std::string canon = cmd->name + (ssb ? " --ssb " : " ") + cfg.dump();
        char hash[32];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
        std::ostringstream head;
        head << "# rydnoise " << version << " " << cmd->name << (ssb ? " --ssb" : "") << '\n'
             << "# config_hash fnv1a64:" << hash << '\n'
             << "# config " << cfg.dump() << '\n';
        if (out_path.empty()) {
            std::cout << head.str() << body.str();
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + out_path);
            out << head.str() << body.str();
        }
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
