#ifndef SMR_RESONANCE_HPP
#define SMR_RESONANCE_HPP

#include "smr/spectrum.hpp"

#include <optional>
#include <vector>

namespace smr {

/// A series resonance (|Y| local maximum) paired with the parallel
/// antiresonance (the following |Y| local minimum) when one exists before
/// the grid ends.
struct ResonancePair {
    double fs = 0.0;             // Hz, sub-grid refined
    std::optional<double> fp;    // Hz, sub-grid refined; fp > fs
    double prominence_db = 0.0;  // peak prominence on 20 log10 |Y|
};

/// Local maxima of |Y| with prominence >= min_prominence_db, ordered by
/// frequency. Positions are refined by parabolic interpolation on log|Y|.
/// A spectrum with no qualifying peak returns an empty list.
std::vector<ResonancePair> find_resonances(const Spectrum& sp,
                                           double min_prominence_db);

/// k^2 = (pi^2/8) (fp^2 - fs^2) / fp^2. Convenience estimator; the mBVD fit
/// is authoritative when parasitics matter.
double coupling_from_fsfp(double fs, double fp);
double coupling_from_fsfp(const ResonancePair& pair);

/// Phase-derived (Bode) quality factor of a one-port admittance re-referenced
/// to z0: S11 = (Z - z0)/(Z + z0), tau = -d arg(S11)/d omega (central
/// differences, unwrapped), Q = omega tau |S11| / (1 - |S11|^2).
struct BodeQResult {
    Spectrum q_of_f;          // Q(f); flagged points carry NaN
    std::vector<char> valid;  // 0 = flagged (|S11| >= 1 or non-finite)
    bool has_peak = false;
    double f_peak = 0.0;
    double q_peak = 0.0;
};
BodeQResult bode_q(const Spectrum& y_series, double z0);

} // namespace smr

#endif // SMR_RESONANCE_HPP
