#include "smr/spectrum.hpp"

#include "smr/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace smr {

void check_spectrum(const Spectrum& sp) {
    if (sp.frequency.size() != sp.value.size())
        throw std::invalid_argument("spectrum: frequency/value size mismatch");
    for (std::size_t i = 0; i < sp.frequency.size(); ++i) {
        if (!(sp.frequency[i] > 0.0))
            throw std::invalid_argument("spectrum: frequencies must be > 0");
        if (i > 0 && !(sp.frequency[i] > sp.frequency[i - 1]))
            throw std::invalid_argument("spectrum: grid must be strictly increasing");
    }
}

std::string spectrum_to_csv(const Spectrum& sp) {
    std::string out = "freq_hz,re_y,im_y,mag_y,phase_deg\n";
    char buf[200];
    for (std::size_t i = 0; i < sp.size(); ++i) {
        const auto v = sp.value[i];
        const double mag = std::abs(v);
        const double phase_deg = std::arg(v) * 180.0 / M_PI;
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      sp.frequency[i], v.real(), v.imag(), mag, phase_deg);
        out += buf;
    }
    return out;
}

Spectrum spectrum_from_csv(const std::string& text) {
    Spectrum sp;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line_no == 1) {
            if (line.rfind("freq_hz", 0) != 0)
                throw ParseError("expected header 'freq_hz,re_y,im_y,mag_y,phase_deg'", 1);
            continue;
        }
        double f = 0, re = 0, im = 0, mag = 0, ph = 0;
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg,%lg", &f, &re, &im, &mag, &ph) != 5)
            throw ParseError("expected 5 comma-separated numbers", line_no);
        sp.frequency.push_back(f);
        sp.value.emplace_back(re, im);
    }
    check_spectrum(sp);
    return sp;
}

} // namespace smr
