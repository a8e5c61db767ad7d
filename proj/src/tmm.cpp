#include "smr/tmm.hpp"

#include "smr/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace smr {

namespace {

constexpr double two_pi = 2.0 * M_PI;

bool finite(std::complex<double> z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

} // namespace

std::complex<double> transform_impedance(const Layer& layer,
                                         std::complex<double> load,
                                         double frequency) {
    if (!(frequency > 0.0))
        throw std::invalid_argument("transform_impedance: frequency must be > 0");
    if (layer.thickness == 0.0)
        return load;

    const std::complex<double> v_c = complex_velocity(layer.material);
    const std::complex<double> z = layer.material.density * v_c;
    const std::complex<double> gamma = std::complex<double>(0.0, two_pi * frequency) / v_c;
    const std::complex<double> t = std::tanh(gamma * layer.thickness);

    const std::complex<double> z_in = z * (load + z * t) / (z + load * t);
    if (!finite(z_in))
        throw NumericError("singular impedance transform through '" +
                           layer.material.name + "'", frequency);
    return z_in;
}

std::complex<double> stack_load_impedance(const Stack& s, Side side, double frequency) {
    std::complex<double> z;
    if (side == Side::above_piezo) {
        // Outer termination: free surface or a semi-infinite top load.
        z = (s.top_boundary == TopBoundary::loaded && s.top_load)
                ? complex_impedance(*s.top_load)
                : std::complex<double>(0.0, 0.0);
        // Fold downward, outermost layer first.
        for (std::size_t i = 0; i < s.piezo_index; ++i)
            z = transform_impedance(s.layers[i], z, frequency);
    } else {
        z = complex_impedance(s.substrate);
        for (std::size_t i = s.layers.size(); i-- > s.piezo_index + 1;)
            z = transform_impedance(s.layers[i], z, frequency);
    }
    return z;
}

namespace {

std::complex<double> mason_admittance_raw(const Stack& s, double frequency) {
    const Layer& p = s.piezo();
    if (!p.material.piezo)
        throw std::invalid_argument("mason_admittance: piezo layer lacks constants");
    const double e33 = p.material.piezo->e33;
    const double eps33 = p.material.piezo->eps33;
    const double omega = two_pi * frequency;

    const double c0 = eps33 * s.area / p.thickness;
    const std::complex<double> y_static(0.0, omega * c0);
    if (e33 == 0.0)
        return y_static;

    const std::complex<double> v_c = complex_velocity(p.material);
    const std::complex<double> z_p = p.material.density * v_c;
    const std::complex<double> kt2 =
        (e33 * e33) / (eps33 * p.material.density * v_c * v_c);
    const std::complex<double> phi = omega * p.thickness / v_c;

    const std::complex<double> z_t = stack_load_impedance(s, Side::above_piezo, frequency) / z_p;
    const std::complex<double> z_b = stack_load_impedance(s, Side::below_piezo, frequency) / z_p;

    const std::complex<double> sin_phi = std::sin(phi);
    const std::complex<double> cos_phi = std::cos(phi);
    const std::complex<double> j(0.0, 1.0);

    const std::complex<double> num = (z_t + z_b) * sin_phi + j * 2.0 * (1.0 - cos_phi);
    const std::complex<double> den = (z_t + z_b) * cos_phi + j * (1.0 + z_t * z_b) * sin_phi;

    const std::complex<double> z_e =
        (1.0 / y_static) * (1.0 - (kt2 / phi) * (num / den));
    return 1.0 / z_e;
}

} // namespace

std::complex<double> mason_admittance(const Stack& s, double frequency, bool* shifted) {
    if (!(frequency > 0.0))
        throw std::invalid_argument("mason_admittance: frequency must be > 0");
    if (shifted)
        *shifted = false;
    std::complex<double> y = mason_admittance_raw(s, frequency);
    if (finite(y))
        return y;
    // Exact analytic pole on the grid: evaluate at a minutely shifted point.
    y = mason_admittance_raw(s, frequency * (1.0 + 1e-9));
    if (!finite(y))
        throw NumericError("admittance pole not resolvable by grid shift", frequency);
    if (shifted)
        *shifted = true;
    return y;
}

Spectrum admittance_spectrum(const Stack& s, std::span<const double> grid,
                             std::vector<std::size_t>* shifted_points) {
    Spectrum sp;
    sp.frequency.assign(grid.begin(), grid.end());
    sp.value.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            bool shifted = false;
            sp.value.push_back(mason_admittance(s, grid[i], &shifted));
            if (shifted && shifted_points)
                shifted_points->push_back(i);
        } catch (const NumericError& e) {
            throw NumericError("grid point " + std::to_string(i) + ": " + e.what(),
                               grid[i]);
        }
    }
    check_spectrum(sp);
    return sp;
}

Spectrum apply_parasitics(const Spectrum& sp, double rs_ohm, double ls_henry,
                          double c_feed_farad) {
    if (rs_ohm < 0.0 || ls_henry < 0.0 || c_feed_farad < 0.0)
        throw std::invalid_argument("apply_parasitics: rs, ls, c_feed must be >= 0");
    if (rs_ohm == 0.0 && ls_henry == 0.0 && c_feed_farad == 0.0)
        return sp;
    Spectrum out;
    out.frequency = sp.frequency;
    out.value.reserve(sp.size());
    for (std::size_t i = 0; i < sp.size(); ++i) {
        const double omega = two_pi * sp.frequency[i];
        const std::complex<double> y_core =
            sp.value[i] + std::complex<double>(0.0, omega * c_feed_farad);
        const std::complex<double> z_total =
            std::complex<double>(rs_ohm, omega * ls_henry) + 1.0 / y_core;
        out.value.push_back(1.0 / z_total);
    }
    return out;
}

} // namespace smr
