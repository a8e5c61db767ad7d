#ifndef SMR_TESTS_SUPPORT_HPP
#define SMR_TESTS_SUPPORT_HPP

#include "smr/material.hpp"
#include "smr/mbvd.hpp"
#include "smr/stack.hpp"
#include "smr/touchstone.hpp"

#include <complex>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace smr::test {

inline constexpr double inf = std::numeric_limits<double>::infinity();

// Sample materials matching data/sample_smr.stack. q defaults to a
// representative mmWave thin-film damping; pass inf for lossless variants.
inline Material pt(double q = 50) { return {"Pt", 21450.0, 4000.0, q, std::nullopt}; }
inline Material scaln(double q = 50) {
    return {"ScAlN", 3500.0, 9000.0, q, PiezoConstants{2.9, 1.3281e-10}};
}
inline Material sio2(double q = 50) { return {"SiO2", 2199.0, 5640.0, q, std::nullopt}; }
inline Material ta2o5(double q = 50) { return {"Ta2O5", 6852.0, 4860.0, q, std::nullopt}; }
inline Material si(double q = 50) { return {"Si", 2329.0, 8433.0, q, std::nullopt}; }

/// The Pt/ScAlN/Pt on 8.5-pair SiO2/Ta2O5 stack (20 layers), top electrode
/// thickness adjustable.
inline Stack device_stack(double t_top = 40e-9, double q = 50) {
    Stack s;
    s.layers.push_back({pt(q), t_top});
    s.layers.push_back({scaln(q), 67.6e-9});
    s.layers.push_back({pt(q), 40e-9});
    s.layers.push_back({sio2(q), 28.2e-9}); // mirror termination, cavity side
    for (int i = 0; i < 8; ++i) {
        s.layers.push_back({ta2o5(q), 24.3e-9});
        s.layers.push_back({sio2(q), 28.2e-9});
    }
    s.piezo_index = 1;
    s.area = 36.125e-12;
    s.substrate = si(q);
    return s;
}

/// The fitted equivalent-circuit model used across the fitting tests.
inline MBVDModel reference_model() {
    MBVDModel m;
    m.rs = 52.0;
    m.ls = 0.06e-9;
    m.c0 = 45e-15;
    m.branches = {{11.72e9, 0.0557, 6.0}, {40.38e9, 0.0334, 15.0}, {62.59e9, 0.008, 125.0}};
    return m;
}

/// Random valid stack for property tests: 2..6 layers, one piezo.
inline Stack random_stack(std::mt19937& rng, bool lossless = false) {
    std::uniform_real_distribution<double> density(1000.0, 22000.0);
    std::uniform_real_distribution<double> velocity(2000.0, 12000.0);
    std::uniform_real_distribution<double> thickness(10e-9, 200e-9);
    std::uniform_real_distribution<double> qf(20.0, 2000.0);
    std::uniform_int_distribution<int> n_layers(2, 6);

    auto material = [&](int idx, bool piezo) {
        Material m{"M" + std::to_string(idx), density(rng), velocity(rng),
                   lossless ? inf : qf(rng), std::nullopt};
        if (piezo)
            m.piezo = PiezoConstants{1.5, 1e-10};
        return m;
    };

    Stack s;
    const int n = n_layers(rng);
    std::uniform_int_distribution<int> piezo_pick(0, n - 1);
    const int piezo_at = piezo_pick(rng);
    for (int i = 0; i < n; ++i)
        s.layers.push_back({material(i, i == piezo_at), thickness(rng)});
    s.piezo_index = static_cast<std::size_t>(piezo_at);
    s.area = 40e-12;
    s.substrate = material(100, false);
    return s;
}

/// Test-side S <- Y conversion (the library only ships Y <- S).
inline TwoPortMatrix y_to_s_point(const TwoPortMatrix& y, double z0) {
    using C = std::complex<double>;
    // S = (I - z0 Y)(I + z0 Y)^-1
    const C a11 = 1.0 - z0 * y[0], a12 = -z0 * y[1];
    const C a21 = -z0 * y[2], a22 = 1.0 - z0 * y[3];
    const C b11 = 1.0 + z0 * y[0], b12 = z0 * y[1];
    const C b21 = z0 * y[2], b22 = 1.0 + z0 * y[3];
    const C det = b11 * b22 - b12 * b21;
    const C i11 = b22 / det, i12 = -b12 / det, i21 = -b21 / det, i22 = b11 / det;
    return {a11 * i11 + a12 * i21, a11 * i12 + a12 * i22,
            a21 * i11 + a22 * i21, a21 * i12 + a22 * i22};
}

/// Embed a one-port admittance as a series element between matched ports.
inline TwoPortSpectrum embed_series(const Spectrum& y, double z0) {
    TwoPortSpectrum tp;
    tp.frequency = y.frequency;
    tp.reference_impedance = z0;
    for (const auto v : y.value) {
        const std::complex<double> zs = 1.0 / v;
        const std::complex<double> den = zs + 2.0 * z0;
        const std::complex<double> s11 = zs / den;
        const std::complex<double> s21 = 2.0 * z0 / den;
        tp.s.push_back({s11, s21, s21, s11});
    }
    return tp;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string data_path(const std::string& name) {
    return std::string(SMR_DATA_DIR) + "/" + name;
}

} // namespace smr::test

#endif // SMR_TESTS_SUPPORT_HPP
