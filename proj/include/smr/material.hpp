#ifndef SMR_MATERIAL_HPP
#define SMR_MATERIAL_HPP

#include <complex>
#include <optional>
#include <string>

namespace smr {

/// Piezoelectric constants for thickness-field excitation.
struct PiezoConstants {
    double e33;   // piezoelectric stress constant, C/m^2
    double eps33; // clamped permittivity, F/m
};

/// Acoustic material for one-dimensional longitudinal propagation.
/// Immutable value object; thread-safe to share.
struct Material {
    std::string name;
    double density = 0.0;   // kg/m^3
    double velocity = 0.0;  // longitudinal phase velocity, m/s
    double q_mech = 0.0;    // mechanical quality factor; +inf = lossless
    std::optional<PiezoConstants> piezo;

    bool is_piezo() const { return piezo.has_value(); }
};

/// Throws std::invalid_argument if any Material invariant is violated.
void check_material(const Material& m);

/// Specific acoustic impedance Z = rho * v, kg m^-2 s^-1.
double acoustic_impedance(const Material& m);

/// Lossy phase velocity v_c = v * (1 + i / (2 q_mech)).
/// An infinite q_mech gives a purely real velocity.
std::complex<double> complex_velocity(const Material& m);

/// Lossy specific impedance rho * v_c.
std::complex<double> complex_impedance(const Material& m);

} // namespace smr

#endif // SMR_MATERIAL_HPP
