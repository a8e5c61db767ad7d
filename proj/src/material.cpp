#include "smr/material.hpp"

#include <cmath>
#include <stdexcept>

namespace smr {

void check_material(const Material& m) {
    if (m.name.empty())
        throw std::invalid_argument("material needs a name");
    if (!(m.density > 0.0) || !std::isfinite(m.density))
        throw std::invalid_argument("material '" + m.name + "': density must be > 0");
    if (!(m.velocity > 0.0) || !std::isfinite(m.velocity))
        throw std::invalid_argument("material '" + m.name + "': velocity must be > 0");
    if (!(m.q_mech > 0.0))
        throw std::invalid_argument("material '" + m.name + "': q_mech must be > 0");
    if (m.piezo) {
        if (!(m.piezo->eps33 > 0.0) || !std::isfinite(m.piezo->eps33))
            throw std::invalid_argument("material '" + m.name + "': eps33 must be > 0");
        if (!std::isfinite(m.piezo->e33))
            throw std::invalid_argument("material '" + m.name + "': e33 must be finite");
    }
}

double acoustic_impedance(const Material& m) {
    return m.density * m.velocity;
}

std::complex<double> complex_velocity(const Material& m) {
    if (std::isinf(m.q_mech))
        return {m.velocity, 0.0};
    return m.velocity * std::complex<double>(1.0, 1.0 / (2.0 * m.q_mech));
}

std::complex<double> complex_impedance(const Material& m) {
    return m.density * complex_velocity(m);
}

} // namespace smr
