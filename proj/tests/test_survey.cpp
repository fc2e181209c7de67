#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <rydnoise/survey.hpp>

using namespace rydnoise;

namespace {

const Table<DipoleRecord>& dipoles() {
    static const auto t = load_dipole_csv(std::string(RYDNOISE_DATA_DIR) + "/rb85_dipoles.csv");
    return t;
}

const std::vector<SweepRow>& sweep() {
    static const auto rows = [] {
        SweepConfig cfg;
        cfg.dipoles = dipoles().rows;
        cfg.lnas = load_lna_csv(std::string(RYDNOISE_DATA_DIR) + "/lna_survey.csv").rows;
        return run_sweep(cfg);
    }();
    return rows;
}

}  // namespace

TEST(Survey, LNALoaderCases) {
    std::istringstream empty("f_Hz,T_noise_K,technology,citation\n");
    const auto e = load_lna_csv(empty);
    EXPECT_TRUE(e.rows.empty());
    ASSERT_EQ(e.warnings.size(), 1u);

    std::istringstream dup("# note\nf_Hz,T_noise_K,technology,citation\n2e9,30,HEMT,x\n1e9,20,HEMT,y\n2e9,31,SiGe,z\n");
    const auto d = load_lna_csv(dup);
    ASSERT_EQ(d.rows.size(), 3u);
    EXPECT_EQ(d.rows[0].f, 1e9);
    EXPECT_EQ(d.rows[1].T_noise, 30.0);
    EXPECT_EQ(d.rows[2].T_noise, 31.0);
    ASSERT_EQ(d.warnings.size(), 1u);
    EXPECT_NE(d.warnings[0].find("duplicate"), std::string::npos);

    std::istringstream bad("f_Hz,T_noise_K,technology,citation\n1e9,20,HEMT,y\n\n3e9,abc,HEMT,y\n");
    try {
        load_lna_csv(bad);
        FAIL() << "expected parse error";
    } catch (const std::runtime_error& ex) {
        EXPECT_NE(std::string(ex.what()).find("line 4"), std::string::npos) << ex.what();
    }
    std::istringstream cols("f_Hz,T_noise_K,technology,citation\n1e9,20\n");
    EXPECT_THROW(load_lna_csv(cols), std::runtime_error);
    std::istringstream neg("f_Hz,T_noise_K,technology,citation\n1e9,-20,HEMT,y\n");
    EXPECT_THROW(load_lna_csv(neg), std::runtime_error);
    EXPECT_THROW(load_lna_csv(std::string("/nonexistent/lna.csv")), std::runtime_error);
}

TEST(Survey, ShippedTables) {
    const auto& t = dipoles();
    EXPECT_TRUE(t.warnings.empty());
    ASSERT_NE(find_state(t.rows, 70), nullptr);
    EXPECT_NEAR(find_state(t.rows, 70)->f / 1e9, 10.68, 0.05);
    const auto l = load_lna_csv(std::string(RYDNOISE_DATA_DIR) + "/lna_survey.csv");
    EXPECT_TRUE(l.warnings.empty());
    EXPECT_NEAR(l.rows.front().f, 0.6e9, 1.0);
    EXPECT_NEAR(l.rows.back().f, 330e9, 1.0);
    for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_GT(t.rows[i].f, t.rows[i - 1].f);
}

TEST(Survey, DipoleInterpolation) {
    const auto& t = dipoles().rows;
    for (std::size_t i = 0; i < t.size(); i += 7) EXPECT_NEAR(interpolate_dipole(t, t[i].f), t[i].mu_d, 1e-12 * t[i].mu_d);
    const double fm = std::sqrt(t[10].f * t[11].f);
    const double mu = interpolate_dipole(t, fm);
    EXPECT_GT(mu, std::min(t[10].mu_d, t[11].mu_d));
    EXPECT_LT(mu, std::max(t[10].mu_d, t[11].mu_d));
    EXPECT_THROW(interpolate_dipole(t, 1.0), std::domain_error);
}

TEST(Survey, Extrapolation) {
    const auto& t = dipoles().rows;
    const NEF0Reference ref;
    EXPECT_EQ(extrapolate_nef0(t, 70, ref, VolumeMode::FixedVolume), ref.nef0);
    for (int n : {30, 50, 90, 120})
        EXPECT_NEAR(extrapolate_nef0(t, n, ref, VolumeMode::FixedVolume) / ref.nef0,
                    find_state(t, 70)->mu_d / find_state(t, n)->mu_d, 1e-12);
    // A reference cell with the same L w0 product as the cavity leaves only the sine-average penalty.
    const auto cav = survey_sizing(find_state(t, 70)->f);
    NEF0Reference same = ref;
    same.L = cav.L;
    same.w0 = cav.w0;
    EXPECT_NEAR(extrapolate_nef0(t, 70, same, VolumeMode::CavityVolume), ref.nef0 * consts::pi / 2.0, 1e-12);
    try {
        extrapolate_nef0(t, 999, ref, VolumeMode::FixedVolume);
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("999"), std::string::npos);
    }
}

TEST(Survey, FixedVolumeTemperatureScaling) {
    // Thermal-equivalent NET tracks (nef0 / f)^2, so its log slope is -2 k_mu - 2.
    const auto& rows = sweep();
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto &a = rows[i - 1], &b = rows[i];
        const double ta = a.net_freespace - noise_quantum(a.f, 0.0, DetectionMode::Heterodyne) / consts::k_B;
        const double tb = b.net_freespace - noise_quantum(b.f, 0.0, DetectionMode::Heterodyne) / consts::k_B;
        const double lf = std::log(b.f / a.f);
        const double k = std::log(b.mu_d / a.mu_d) / lf;
        EXPECT_NEAR(std::log(tb / ta) / lf, -2.0 * k - 2.0, 1e-6);
    }
}

TEST(Survey, SweepProperties) {
    const auto& rows = sweep();
    ASSERT_EQ(rows.size(), dipoles().rows.size());
    for (const auto& r : rows) {
        ASSERT_TRUE(r.error.empty()) << r.f << ": " << r.error;
        const double floor = consts::h * r.f / consts::k_B;
        EXPECT_GE(r.net_freespace, floor);
        EXPECT_GE(r.net_freespace_scaled, floor);
        EXPECT_GE(r.net_cavity_optimal, floor);
        EXPECT_GE(r.net_cavity_critical, floor);
        EXPECT_LE(r.net_cavity_optimal, r.net_cavity_critical * (1.0 + 1e-9));
        EXPECT_GE(r.net_freespace_scaled, r.net_cavity_optimal) << r.f;
        EXPECT_GT(r.lna_T, 0.0);
    }
}

TEST(Survey, KneeFollowsBeamCap) {
    const auto& rows = sweep();
    std::vector<double> f, y;
    for (const auto& r : rows) {
        f.push_back(r.f);
        y.push_back(r.net_cavity_optimal);
    }
    const double knee = find_knee(f, y);
    EXPECT_GE(knee, 18e9);
    EXPECT_LE(knee, 28e9);
}

TEST(Survey, ReferenceRowNearLNA) {
    const auto& rows = sweep();
    const auto it = std::find_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.n == 70; });
    ASSERT_NE(it, rows.end());
    EXPECT_NEAR(0.5 * it->net_cavity_optimal, 43.0, 0.15 * 43.0);
}

TEST(Survey, DeterministicCsv) {
    std::ostringstream a, b;
    write_sweep_csv(a, sweep(), DetectionMode::Heterodyne);
    SweepConfig cfg;
    cfg.dipoles = dipoles().rows;
    cfg.lnas = load_lna_csv(std::string(RYDNOISE_DATA_DIR) + "/lna_survey.csv").rows;
    write_sweep_csv(b, run_sweep(cfg), DetectionMode::Heterodyne);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().substr(0, 2), "n,");
}

TEST(Survey, KneeOnSyntheticCurve) {
    std::vector<double> f, y;
    for (int i = 0; i < 40; ++i) {
        const double x = std::pow(10.0, 9.0 + 2.0 * i / 39.0);
        f.push_back(x);
        y.push_back(x < 23e9 ? std::pow(x, -0.7) : std::pow(23e9, -0.7) * std::pow(x / 23e9, 1.5));
    }
    EXPECT_NEAR(std::log(find_knee(f, y) / 23e9), 0.0, 2.0 * std::log(10.0) / 39.0);
}

TEST(Survey, ModelSourceRows) {
    SweepConfig cfg;
    cfg.dipoles = dipoles().rows;
    cfg.source = Nef0Source::Model;
    cfg.model_grid = 3;
    for (int n : {40, 70, 100}) {
        const auto r = sweep_row(cfg, *find_state(cfg.dipoles, n));
        ASSERT_TRUE(r.error.empty()) << r.error;
        EXPECT_TRUE(std::isfinite(r.nef0_cavity));
        EXPECT_GE(r.net_cavity_optimal, consts::h * r.f / consts::k_B);
        EXPECT_LE(r.net_cavity_optimal, r.net_cavity_critical * (1.0 + 1e-9));
    }
}
