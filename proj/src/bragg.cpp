#include "smr/bragg.hpp"

#include "smr/tmm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smr {

double quarter_wave_thickness(const Material& m, double f0) {
    if (!(f0 > 0.0))
        throw std::invalid_argument("quarter_wave_thickness: f0 must be > 0");
    return m.velocity / (4.0 * f0);
}

double fractional_stopband(double z1, double z2, bool* clamped) {
    if (clamped)
        *clamped = false;
    if (!(z1 > 0.0))
        throw std::invalid_argument("fractional_stopband: z1 must be > 0");
    if (z1 > z2)
        throw std::invalid_argument(
            "fractional_stopband: arguments are (low, high); z1 > z2 given");
    const double fbw = (4.0 / M_PI) * std::asin((z2 - z1) / (z2 + z1));
    if (fbw >= 1.0) {
        if (clamped)
            *clamped = true;
        return 1.0;
    }
    return fbw;
}

namespace {

bool is_half_integer(double pairs) {
    const double doubled = 2.0 * pairs;
    return pairs > 0.0 && std::abs(doubled - std::round(doubled)) < 1e-9;
}

} // namespace

MirrorSpec design_mirror(const Material& low, const Material& high, double f0,
                         double pairs) {
    const double z_low = acoustic_impedance(low);
    const double z_high = acoustic_impedance(high);
    if (!(z_high > z_low))
        throw std::invalid_argument("design_mirror: no impedance contrast ('" + low.name +
                                    "' vs '" + high.name + "')");
    if (!is_half_integer(pairs))
        throw std::invalid_argument("design_mirror: pairs must be 0.5, 1, 1.5, ...");

    MirrorSpec spec;
    spec.low = low;
    spec.high = high;
    spec.t_low = quarter_wave_thickness(low, f0);
    spec.t_high = quarter_wave_thickness(high, f0);
    spec.pairs = pairs;
    spec.center_frequency = f0;
    return spec;
}

std::vector<Layer> mirror_layers(const MirrorSpec& spec) {
    const std::size_t n = static_cast<std::size_t>(std::llround(2.0 * spec.pairs));
    std::vector<Layer> layers;
    layers.reserve(n);
    // Cavity side first, low-Z termination facing the cavity.
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 2 == 0)
            layers.push_back({spec.low, spec.t_low});
        else
            layers.push_back({spec.high, spec.t_high});
    }
    return layers;
}

Spectrum mirror_reflectance(const MirrorSpec& spec, const Material& substrate,
                            const Material& cavity_side,
                            std::span<const double> grid) {
    const auto layers = mirror_layers(spec);
    Spectrum out;
    out.frequency.assign(grid.begin(), grid.end());
    out.value.reserve(grid.size());
    for (const double f : grid) {
        std::complex<double> z = complex_impedance(substrate);
        for (std::size_t i = layers.size(); i-- > 0;)
            z = transform_impedance(layers[i], z, f);
        const std::complex<double> z_c = complex_impedance(cavity_side);
        out.value.push_back((z - z_c) / (z + z_c));
    }
    return out;
}

std::optional<StopbandEdges> measure_stopband(const MirrorSpec& spec,
                                              const Material& substrate,
                                              const Material& cavity_side,
                                              std::span<const double> grid,
                                              double threshold) {
    const Spectrum gamma = mirror_reflectance(spec, substrate, cavity_side, grid);
    const double f0 = spec.center_frequency;

    // Index of the grid point closest to f0.
    std::size_t center = 0;
    double best = std::abs(grid[0] - f0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double d = std::abs(grid[i] - f0);
        if (d < best) {
            best = d;
            center = i;
        }
    }
    if (std::abs(gamma.value[center]) < threshold)
        return std::nullopt;

    std::size_t lo = center;
    while (lo > 0 && std::abs(gamma.value[lo - 1]) >= threshold)
        --lo;
    std::size_t hi = center;
    while (hi + 1 < gamma.size() && std::abs(gamma.value[hi + 1]) >= threshold)
        ++hi;

    StopbandEdges edges;
    edges.f_low = gamma.frequency[lo];
    edges.f_high = gamma.frequency[hi];
    edges.fractional_width = (edges.f_high - edges.f_low) / f0;
    return edges;
}

} // namespace smr
