#include "smr/touchstone.hpp"

#include "smr/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace smr {

namespace {

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok)
        out.push_back(tok);
    return out;
}

double to_number(const std::string& tok, int line_no) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
        throw ParseError("not a number: '" + tok + "'", line_no);
    return v;
}

std::complex<double> decode(double a, double b, TouchstoneFormat fmt) {
    switch (fmt) {
    case TouchstoneFormat::ri:
        return {a, b};
    case TouchstoneFormat::ma:
        return std::polar(a, b * M_PI / 180.0);
    case TouchstoneFormat::db:
        return std::polar(std::pow(10.0, a / 20.0), b * M_PI / 180.0);
    }
    return {};
}

} // namespace

TwoPortSpectrum parse_touchstone(const std::string& text) {
    TwoPortSpectrum tp;
    double unit_scale = 1e9; // Touchstone v1 default frequency unit is GHz
    TouchstoneFormat fmt = TouchstoneFormat::ma;
    bool saw_option_line = false;

    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        // strip ! comments
        const auto bang = raw.find('!');
        if (bang != std::string::npos)
            raw.erase(bang);
        const auto tokens = split_ws(raw);
        if (tokens.empty())
            continue;

        if (tokens[0][0] == '[')
            throw ParseError("Touchstone v2 keyword '" + tokens[0] +
                                 "' not supported; this reader handles v1 only",
                             line_no);

        if (tokens[0] == "#") {
            if (saw_option_line)
                throw ParseError("second option line", line_no);
            // # <unit> S <MA|RI|DB> R <z0>
            if (tokens.size() != 6)
                throw ParseError("option line must be '# <unit> S <MA|RI|DB> R <z0>'",
                                 line_no);
            const std::string unit = upper(tokens[1]);
            if (unit == "HZ")
                unit_scale = 1.0;
            else if (unit == "KHZ")
                unit_scale = 1e3;
            else if (unit == "MHZ")
                unit_scale = 1e6;
            else if (unit == "GHZ")
                unit_scale = 1e9;
            else
                throw ParseError("unknown frequency unit '" + tokens[1] + "'", line_no);
            if (upper(tokens[2]) != "S")
                throw ParseError("only S-parameter files are supported", line_no);
            const std::string f = upper(tokens[3]);
            if (f == "MA")
                fmt = TouchstoneFormat::ma;
            else if (f == "RI")
                fmt = TouchstoneFormat::ri;
            else if (f == "DB")
                fmt = TouchstoneFormat::db;
            else
                throw ParseError("unknown format '" + tokens[3] + "'", line_no);
            if (upper(tokens[4]) != "R")
                throw ParseError("expected 'R <z0>' in option line", line_no);
            tp.reference_impedance = to_number(tokens[5], line_no);
            if (!(tp.reference_impedance > 0.0))
                throw ParseError("reference impedance must be > 0", line_no);
            saw_option_line = true;
            continue;
        }

        // data row: f S11 S21 S12 S22 (two numbers each)
        if (tokens.size() != 9)
            throw ParseError("expected 9 columns (f S11 S21 S12 S22), got " +
                                 std::to_string(tokens.size()),
                             line_no);
        double nums[9];
        for (int i = 0; i < 9; ++i)
            nums[i] = to_number(tokens[static_cast<std::size_t>(i)], line_no);

        const double f_hz = nums[0] * unit_scale;
        if (!tp.frequency.empty() && !(f_hz > tp.frequency.back()))
            throw ParseError("frequencies must be strictly increasing", line_no);
        tp.frequency.push_back(f_hz);

        TwoPortMatrix m;
        m[0] = decode(nums[1], nums[2], fmt); // S11
        m[2] = decode(nums[3], nums[4], fmt); // S21
        m[1] = decode(nums[5], nums[6], fmt); // S12
        m[3] = decode(nums[7], nums[8], fmt); // S22
        tp.s.push_back(m);
    }

    if (tp.frequency.empty())
        throw ParseError("no data rows", line_no > 0 ? line_no : 1);
    return tp;
}

std::string serialize_touchstone(const TwoPortSpectrum& tp, TouchstoneFormat format) {
    const char* fmt_name = format == TouchstoneFormat::ri   ? "RI"
                           : format == TouchstoneFormat::ma ? "MA"
                                                            : "DB";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "# GHz S %s R %.17g\n", fmt_name,
                  tp.reference_impedance);
    std::string out = buf;

    auto encode = [&](std::complex<double> v, double& a, double& b) {
        switch (format) {
        case TouchstoneFormat::ri:
            a = v.real();
            b = v.imag();
            break;
        case TouchstoneFormat::ma:
            a = std::abs(v);
            b = std::arg(v) * 180.0 / M_PI;
            break;
        case TouchstoneFormat::db:
            a = 20.0 * std::log10(std::abs(v));
            b = std::arg(v) * 180.0 / M_PI;
            break;
        }
    };

    for (std::size_t i = 0; i < tp.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", tp.frequency[i] / 1e9);
        out += buf;
        // file order: S11 S21 S12 S22
        for (const int idx : {0, 2, 1, 3}) {
            double a = 0, b = 0;
            encode(tp.s[i][static_cast<std::size_t>(idx)], a, b);
            std::snprintf(buf, sizeof(buf), " %.17g %.17g", a, b);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

TwoPortY s_to_y(const TwoPortSpectrum& tp) {
    TwoPortY out;
    out.frequency = tp.frequency;
    out.y.reserve(tp.size());
    const double z0 = tp.reference_impedance;
    for (std::size_t i = 0; i < tp.size(); ++i) {
        const auto& s = tp.s[i];
        const std::complex<double> s11 = s[0], s12 = s[1], s21 = s[2], s22 = s[3];
        const std::complex<double> det = (1.0 + s11) * (1.0 + s22) - s12 * s21;
        if (std::abs(det) < 1e-300)
            throw NumericError("S->Y conversion singular (det(I+S) = 0)",
                               tp.frequency[i]);
        TwoPortMatrix y;
        y[0] = ((1.0 - s11) * (1.0 + s22) + s12 * s21) / (det * z0);
        y[1] = -2.0 * s12 / (det * z0);
        y[2] = -2.0 * s21 / (det * z0);
        y[3] = ((1.0 + s11) * (1.0 - s22) + s12 * s21) / (det * z0);
        out.y.push_back(y);
    }
    return out;
}

SeriesReduction series_element_admittance(const TwoPortY& y) {
    SeriesReduction out;
    out.y_series.frequency = y.frequency;
    out.y_series.value.reserve(y.size());
    out.max_asymmetry = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        out.y_series.value.push_back(-(y.y[i][1] + y.y[i][2]) / 2.0);
        out.max_asymmetry = std::max(out.max_asymmetry, std::abs(y.y[i][1] - y.y[i][2]));
    }
    return out;
}

} // namespace smr
