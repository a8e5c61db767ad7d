#ifndef SMR_TOUCHSTONE_HPP
#define SMR_TOUCHSTONE_HPP

#include "smr/spectrum.hpp"

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace smr {

/// 2x2 complex matrix per grid point, row-major: [0]=11 [1]=12 [2]=21 [3]=22.
using TwoPortMatrix = std::array<std::complex<double>, 4>;

/// Measured two-port S-parameters on a frequency grid.
struct TwoPortSpectrum {
    std::vector<double> frequency;     // Hz, strictly increasing
    std::vector<TwoPortMatrix> s;      // per-point S matrix
    double reference_impedance = 50.0; // Ohm

    std::size_t size() const { return frequency.size(); }
};

/// Per-point two-port admittance matrices, S.
struct TwoPortY {
    std::vector<double> frequency;
    std::vector<TwoPortMatrix> y;

    std::size_t size() const { return frequency.size(); }
};

/// Number format of Touchstone data entries.
enum class TouchstoneFormat { ri, ma, db };

/// Parse Touchstone v1 two-port text. Option line
/// `# <Hz|kHz|MHz|GHz> S <MA|RI|DB> R <z0>` (case-insensitive), `!`
/// comments, 9-column rows `f S11 S21 S12 S22`. Touchstone v2 documents are
/// rejected with a clear message. Errors carry line numbers.
TwoPortSpectrum parse_touchstone(const std::string& text);

/// Write Touchstone v1 text (GHz frequency unit) in the requested format.
std::string serialize_touchstone(const TwoPortSpectrum& tp,
                                 TouchstoneFormat format = TouchstoneFormat::ri);

/// Standard two-port S -> Y conversion at the spectrum's reference
/// impedance. Throws NumericError (with frequency) when I + S is singular.
TwoPortY s_to_y(const TwoPortSpectrum& tp);

/// Series-element reduction of a two-port Y spectrum.
struct SeriesReduction {
    Spectrum y_series;     // -(Y12 + Y21)/2 per point
    double max_asymmetry;  // max |Y12 - Y21|, reciprocity quality metric
};
SeriesReduction series_element_admittance(const TwoPortY& y);

} // namespace smr

#endif // SMR_TOUCHSTONE_HPP
