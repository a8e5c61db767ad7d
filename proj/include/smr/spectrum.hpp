#ifndef SMR_SPECTRUM_HPP
#define SMR_SPECTRUM_HPP

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace smr {

/// Complex values on a strictly increasing frequency grid. The values are
/// one-port admittances in S unless a caller says otherwise (reflection
/// coefficients, Q curves, ... reuse the container).
struct Spectrum {
    std::vector<double> frequency;             // Hz
    std::vector<std::complex<double>> value;

    std::size_t size() const { return frequency.size(); }
    bool empty() const { return frequency.empty(); }
};

/// Throws std::invalid_argument unless sizes match, the grid is strictly
/// increasing, and all frequencies are positive.
void check_spectrum(const Spectrum& sp);

/// CSV with header `freq_hz,re_y,im_y,mag_y,phase_deg`, 17 significant
/// digits (full double round-trip). An empty spectrum gives a header-only
/// file.
std::string spectrum_to_csv(const Spectrum& sp);

/// Parse CSV produced by spectrum_to_csv (mag/phase columns are ignored;
/// re/im are authoritative). Throws ParseError with line numbers.
Spectrum spectrum_from_csv(const std::string& text);

} // namespace smr

#endif // SMR_SPECTRUM_HPP
