#ifndef SMR_UNITS_HPP
#define SMR_UNITS_HPP

#include <string>
#include <string_view>
#include <vector>

namespace smr::units {

// Quantities in input files and on the command line are SI values with an
// optional unit suffix ("28.2nm", "50 GHz", "0.06nH", "36.125um^2").
// Internally everything is strict SI; suffixes exist only at the text
// boundary so mixed nm/GHz inputs cannot be silently misread.

/// Parse a number with an optional unit suffix into SI.
/// Throws std::invalid_argument on malformed numbers or unknown suffixes.
double parse_quantity(std::string_view text);

/// Parse a frequency grid spec "start:stop:points" (unit suffixes allowed
/// on start/stop). Linear spacing, points >= 2, start < stop.
std::vector<double> parse_grid(std::string_view text);

/// Linearly spaced grid [start, stop] with `points` samples.
std::vector<double> linear_grid(double start, double stop, std::size_t points);

} // namespace smr::units

#endif // SMR_UNITS_HPP
