#ifndef SMR_TMM_HPP
#define SMR_TMM_HPP

#include "smr/spectrum.hpp"
#include "smr/stack.hpp"

#include <complex>
#include <span>

namespace smr {

// One-dimensional acoustic transfer-matrix solver and Mason-model
// electrical admittance of a full resonator stack.
//
// Loss model: complex velocity v_c = v (1 + i/(2Q)) per material, so a
// layer's propagation constant is gamma = i omega / v_c (Re gamma > 0 for
// finite Q) and its specific impedance is rho v_c. Electrode resistivity is
// not acoustic; routing loss enters through apply_parasitics only.
//
// Everything here is pure and thread-safe; per-frequency evaluation order
// never changes results.

/// Which face of the piezo layer a load impedance is folded onto.
enum class Side {
    above_piezo,
    below_piezo
};

/// Transmission-line impedance transformation through one layer:
/// Z_in = Z (Z_L + Z tanh(gamma t)) / (Z + Z_L tanh(gamma t)).
/// Throws NumericError when the result is not finite (pathological load).
std::complex<double> transform_impedance(const Layer& layer,
                                         std::complex<double> load,
                                         double frequency);

/// Fold the termination (free top -> 0, substrate -> rho v_c) through every
/// layer on the given side onto the piezo face.
std::complex<double> stack_load_impedance(const Stack& s, Side side, double frequency);

/// Mason-model electrical admittance of the stack at one frequency, S.
/// Exact analytic poles are evaluated on a minutely shifted frequency so
/// grids containing a pole still produce finite output; `shifted` (when
/// given) reports that this happened. The grid itself is never refined.
std::complex<double> mason_admittance(const Stack& s, double frequency,
                                      bool* shifted = nullptr);

/// mason_admittance on every grid point. NumericErrors are annotated with
/// the failing frequency; indices of pole-shifted points are appended to
/// `shifted_points` when given.
Spectrum admittance_spectrum(const Stack& s, std::span<const double> grid,
                             std::vector<std::size_t>* shifted_points = nullptr);

/// Embed a device admittance behind series parasitics and a parallel
/// feedthrough capacitance: Y' = 1 / (rs + i omega ls + 1/(Y + i omega c_feed)).
Spectrum apply_parasitics(const Spectrum& sp, double rs_ohm, double ls_henry,
                          double c_feed_farad);

} // namespace smr

#endif // SMR_TMM_HPP
