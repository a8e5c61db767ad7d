#include "smr/resonance.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace smr {

namespace {

constexpr double two_pi = 2.0 * M_PI;

// Vertex of the parabola through (x0,y0) (x1,y1) (x2,y2); falls back to x1
// when the points are collinear or the vertex escapes the bracket.
double parabolic_vertex(double x0, double y0, double x1, double y1, double x2,
                        double y2) {
    const double d0 = (y1 - y0) / (x1 - x0);
    const double d1 = (y2 - y1) / (x2 - x1);
    const double curvature = (d1 - d0) / (x2 - x0);
    if (curvature == 0.0 || !std::isfinite(curvature))
        return x1;
    const double vertex = 0.5 * (x0 + x1 - d0 / curvature);
    if (vertex < x0 || vertex > x2)
        return x1;
    return vertex;
}

// Peak prominence on a scalar curve: height above the higher of the two
// valley minima reached before a taller sample (or the grid edge).
double prominence_at(const std::vector<double>& y, std::size_t i) {
    double left_base = y[i];
    for (std::size_t j = i; j-- > 0;) {
        if (y[j] > y[i])
            break;
        left_base = std::min(left_base, y[j]);
    }
    double right_base = y[i];
    for (std::size_t j = i + 1; j < y.size(); ++j) {
        if (y[j] > y[i])
            break;
        right_base = std::min(right_base, y[j]);
    }
    return y[i] - std::max(left_base, right_base);
}

} // namespace

std::vector<ResonancePair> find_resonances(const Spectrum& sp,
                                           double min_prominence_db) {
    check_spectrum(sp);
    const std::size_t n = sp.size();
    std::vector<ResonancePair> pairs;
    if (n < 3)
        return pairs;

    std::vector<double> db(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::abs(sp.value[i]);
        db[i] = 20.0 * std::log10(std::max(mag, 1e-300));
    }

    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(db[i] > db[i - 1] && db[i] >= db[i + 1]))
            continue;
        const double prom = prominence_at(db, i);
        if (prom < min_prominence_db)
            continue;

        ResonancePair pair;
        pair.prominence_db = prom;
        pair.fs = parabolic_vertex(sp.frequency[i - 1], db[i - 1], sp.frequency[i],
                                   db[i], sp.frequency[i + 1], db[i + 1]);

        // First local minimum after the peak becomes the antiresonance.
        for (std::size_t m = i + 1; m + 1 < n; ++m) {
            if (db[m] < db[m - 1] && db[m] <= db[m + 1]) {
                const double fp =
                    parabolic_vertex(sp.frequency[m - 1], db[m - 1], sp.frequency[m],
                                     db[m], sp.frequency[m + 1], db[m + 1]);
                if (fp > pair.fs)
                    pair.fp = fp;
                break;
            }
        }
        pairs.push_back(pair);
    }
    return pairs;
}

double coupling_from_fsfp(double fs, double fp) {
    if (!(fs > 0.0) || !(fp >= fs))
        throw std::invalid_argument("coupling_from_fsfp: need fp >= fs > 0");
    const double ratio = (fp * fp - fs * fs) / (fp * fp);
    return (M_PI * M_PI / 8.0) * ratio;
}

double coupling_from_fsfp(const ResonancePair& pair) {
    if (!pair.fp)
        throw std::invalid_argument("coupling_from_fsfp: pair has no antiresonance");
    return coupling_from_fsfp(pair.fs, *pair.fp);
}

BodeQResult bode_q(const Spectrum& y_series, double z0) {
    check_spectrum(y_series);
    if (!(z0 > 0.0))
        throw std::invalid_argument("bode_q: z0 must be > 0");
    const std::size_t n = y_series.size();
    if (n < 3)
        throw std::invalid_argument("bode_q: need at least 3 grid points");

    std::vector<double> mag(n), phase(n);
    std::vector<char> finite_pt(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> y = y_series.value[i];
        const std::complex<double> z = 1.0 / y;
        const std::complex<double> s11 = (z - z0) / (z + z0);
        mag[i] = std::abs(s11);
        phase[i] = std::arg(s11);
        if (!std::isfinite(mag[i]) || !std::isfinite(phase[i]))
            finite_pt[i] = 0;
    }

    // Unwrap the reflection phase before differentiating.
    for (std::size_t i = 1; i < n; ++i) {
        double d = phase[i] - phase[i - 1];
        while (d > M_PI) {
            phase[i] -= two_pi;
            d = phase[i] - phase[i - 1];
        }
        while (d < -M_PI) {
            phase[i] += two_pi;
            d = phase[i] - phase[i - 1];
        }
    }

    BodeQResult out;
    out.q_of_f.frequency = y_series.frequency;
    out.q_of_f.value.resize(n);
    out.valid.assign(n, 1);

    // Numerical guard: |S11| within 1e-12 of unity means the denominator is
    // pure rounding noise, so the point is treated as lossless and flagged.
    const double flag_threshold = 1.0 - 1e-12;

    // d phase / d omega: central differences inside, second-order one-sided
    // (3-point) at the edges.
    auto d_phase = [&](std::size_t i) {
        const auto w = [&](std::size_t k) { return two_pi * y_series.frequency[k]; };
        if (i == 0 || i + 1 == n) {
            const std::size_t i0 = (i == 0) ? 0 : n - 1;
            const std::size_t i1 = (i == 0) ? 1 : n - 2;
            const std::size_t i2 = (i == 0) ? 2 : n - 3;
            const double x0 = w(i0), x1 = w(i1), x2 = w(i2);
            return phase[i0] * (2 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
                   phase[i1] * (x0 - x2) / ((x1 - x0) * (x1 - x2)) +
                   phase[i2] * (x0 - x1) / ((x2 - x0) * (x2 - x1));
        }
        return (phase[i + 1] - phase[i - 1]) / (w(i + 1) - w(i - 1));
    };

    for (std::size_t i = 0; i < n; ++i) {
        const double tau = -d_phase(i);
        const double omega = two_pi * y_series.frequency[i];
        const double q = omega * tau * mag[i] / (1.0 - mag[i] * mag[i]);

        const bool flagged = !finite_pt[i] || mag[i] >= flag_threshold ||
                             !std::isfinite(q);
        if (flagged) {
            out.valid[i] = 0;
            out.q_of_f.value[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        out.q_of_f.value[i] = q;
        if (!out.has_peak || q > out.q_peak) {
            out.has_peak = true;
            out.q_peak = q;
            out.f_peak = y_series.frequency[i];
        }
    }
    return out;
}

} // namespace smr
