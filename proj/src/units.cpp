#include "smr/units.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <stdexcept>

namespace smr::units {

namespace {

const std::map<std::string, double, std::less<>>& suffix_table() {
    static const std::map<std::string, double, std::less<>> table = {
        // length
        {"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3},
        {"um", 1e-6}, {"µm", 1e-6}, {"nm", 1e-9}, {"pm", 1e-12},
        // frequency
        {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}, {"THz", 1e12},
        // area
        {"m2", 1.0}, {"m^2", 1.0},
        {"mm2", 1e-6}, {"mm^2", 1e-6},
        {"um2", 1e-12}, {"um^2", 1e-12}, {"µm2", 1e-12}, {"µm^2", 1e-12},
        // velocity
        {"m/s", 1.0}, {"km/s", 1e3},
        // capacitance
        {"F", 1.0}, {"uF", 1e-6}, {"nF", 1e-9}, {"pF", 1e-12}, {"fF", 1e-15},
        // inductance
        {"H", 1.0}, {"uH", 1e-6}, {"nH", 1e-9}, {"pH", 1e-12},
        // resistance
        {"ohm", 1.0}, {"Ohm", 1.0},
        // dimensionless helpers
        {"%", 1e-2}, {"percent", 1e-2},
    };
    return table;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

} // namespace

double parse_quantity(std::string_view text) {
    const std::string_view trimmed = trim(text);
    if (trimmed.empty())
        throw std::invalid_argument("empty quantity");

    const std::string buf(trimmed);
    char* end = nullptr;
    const double value = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str())
        throw std::invalid_argument("not a number: '" + buf + "'");

    std::string_view suffix = trim(std::string_view(end));
    if (suffix.empty())
        return value;

    const auto& table = suffix_table();
    const auto it = table.find(suffix);
    if (it == table.end())
        throw std::invalid_argument("unknown unit suffix '" + std::string(suffix) +
                                    "' in '" + buf + "'");
    return value * it->second;
}

std::vector<double> parse_grid(std::string_view text) {
    const std::string buf(trim(text));
    const auto first = buf.find(':');
    const auto second = buf.find(':', first == std::string::npos ? first : first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw std::invalid_argument("grid spec must be start:stop:points, got '" + buf + "'");

    const double start = parse_quantity(buf.substr(0, first));
    const double stop = parse_quantity(buf.substr(first + 1, second - first - 1));
    const double points_raw = parse_quantity(buf.substr(second + 1));
    if (points_raw < 2.0 || points_raw != static_cast<double>(static_cast<std::size_t>(points_raw)))
        throw std::invalid_argument("grid points must be an integer >= 2");
    if (!(start > 0.0) || !(start < stop))
        throw std::invalid_argument("grid requires 0 < start < stop");

    return linear_grid(start, stop, static_cast<std::size_t>(points_raw));
}

std::vector<double> linear_grid(double start, double stop, std::size_t points) {
    if (points < 2)
        throw std::invalid_argument("grid needs at least 2 points");
    std::vector<double> grid(points);
    const double step = (stop - start) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = start + static_cast<double>(i) * step;
    grid.back() = stop;
    return grid;
}

} // namespace smr::units
