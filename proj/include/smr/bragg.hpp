#ifndef SMR_BRAGG_HPP
#define SMR_BRAGG_HPP

#include "smr/material.hpp"
#include "smr/spectrum.hpp"
#include "smr/stack.hpp"

#include <optional>
#include <span>
#include <vector>

namespace smr {

/// Quarter-wave acoustic Bragg mirror. Pair counts move in half steps; the
/// extra half pair is always the low-impedance layer on the cavity side.
struct MirrorSpec {
    Material low;            // low acoustic impedance layer
    Material high;           // high acoustic impedance layer
    double t_low = 0.0;      // m
    double t_high = 0.0;     // m
    double pairs = 0.0;      // 0.5, 1, 1.5, ...
    double center_frequency = 0.0; // Hz

    /// Termination: the material facing the cavity (always the low-Z layer).
    const Material& cavity_termination() const { return low; }
};

/// t = v / (4 f0).
double quarter_wave_thickness(const Material& m, double f0);

/// Fractional stopband bandwidth (4/pi) asin((z2-z1)/(z2+z1)) of a
/// two-material quarter-wave mirror. Requires z2 >= z1 > 0; passing the
/// arguments swapped is an error, not silently fixed. Results above 1 are
/// clamped to 1 (full band); `clamped` reports when that happened.
double fractional_stopband(double z1, double z2, bool* clamped = nullptr);

/// Quarter-wave mirror at f0. Throws std::invalid_argument on zero
/// impedance contrast or a pair count off the half-integer ladder.
MirrorSpec design_mirror(const Material& low, const Material& high, double f0,
                         double pairs);

/// Expand a mirror spec into layers, cavity side first (top to bottom).
std::vector<Layer> mirror_layers(const MirrorSpec& spec);

/// Complex reflectance Gamma(f) = (Z_in - Z_c)/(Z_in + Z_c) looking from the
/// cavity-side material into the mirror stacked on a semi-infinite substrate.
Spectrum mirror_reflectance(const MirrorSpec& spec, const Material& substrate,
                            const Material& cavity_side,
                            std::span<const double> grid);

/// Contiguous band around f0 where |Gamma| stays at or above `threshold`
/// (default 0.9, the documented stopband edge). Returns nullopt when
/// |Gamma(f0)| is already below the threshold.
struct StopbandEdges {
    double f_low;
    double f_high;
    double fractional_width; // (f_high - f_low) / f0
};
std::optional<StopbandEdges> measure_stopband(const MirrorSpec& spec,
                                              const Material& substrate,
                                              const Material& cavity_side,
                                              std::span<const double> grid,
                                              double threshold = 0.9);

} // namespace smr

#endif // SMR_BRAGG_HPP
