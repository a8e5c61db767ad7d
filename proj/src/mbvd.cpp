#include "smr/mbvd.hpp"

#include "smr/lm.hpp"
#include "smr/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace smr {

namespace {

constexpr double two_pi = 2.0 * M_PI;
constexpr double eight_over_pi2 = 8.0 / (M_PI * M_PI);

} // namespace

void check_model(const MBVDModel& m) {
    if (m.rs < 0.0 || m.ls < 0.0)
        throw std::invalid_argument("mbvd: rs and ls must be >= 0");
    if (!(m.c0 > 0.0))
        throw std::invalid_argument("mbvd: c0 must be > 0");
    double prev_fs = 0.0;
    for (const auto& b : m.branches) {
        if (!(b.fs > 0.0))
            throw std::invalid_argument("mbvd: branch fs must be > 0");
        if (!(b.k2 > 0.0 && b.k2 < 1.0))
            throw std::invalid_argument("mbvd: branch k2 must be in (0, 1)");
        if (!(b.q > 0.0))
            throw std::invalid_argument("mbvd: branch q must be > 0");
        if (b.fs < prev_fs)
            throw std::invalid_argument("mbvd: branches must be ordered by fs");
        prev_fs = b.fs;
    }
}

BranchRLC branch_rlc(double c0, const MotionalBranch& b) {
    const double g = b.k2 * eight_over_pi2;
    const double cm = c0 * g / (1.0 - g);
    const double ws = two_pi * b.fs;
    const double l = 1.0 / (ws * ws * cm);
    return {ws * l / b.q, l, cm};
}

MotionalBranch branch_from_rlc(double c0, const BranchRLC& rlc) {
    MotionalBranch b;
    const double ratio = rlc.c / (c0 + rlc.c);
    b.k2 = ratio / eight_over_pi2;
    b.fs = 1.0 / (two_pi * std::sqrt(rlc.l * rlc.c));
    b.q = two_pi * b.fs * rlc.l / rlc.r;
    return b;
}

std::complex<double> mbvd_admittance_at(const MBVDModel& m, double frequency) {
    const double omega = two_pi * frequency;
    std::complex<double> y_core(0.0, omega * m.c0);
    for (const auto& b : m.branches) {
        const BranchRLC rlc = branch_rlc(m.c0, b);
        const std::complex<double> z_branch(rlc.r,
                                            omega * rlc.l - 1.0 / (omega * rlc.c));
        y_core += 1.0 / z_branch;
    }
    if (m.rs == 0.0 && m.ls == 0.0)
        return y_core;
    const std::complex<double> z_total =
        std::complex<double>(m.rs, omega * m.ls) + 1.0 / y_core;
    return 1.0 / z_total;
}

Spectrum mbvd_admittance(const MBVDModel& m, std::span<const double> grid) {
    check_model(m);
    Spectrum sp;
    sp.frequency.assign(grid.begin(), grid.end());
    sp.value.reserve(grid.size());
    for (const double f : grid)
        sp.value.push_back(mbvd_admittance_at(m, f));
    check_spectrum(sp);
    return sp;
}

namespace {

// -3 dB full width around peak index i on |Y|; falls back to two grid steps.
double width_3db(const Spectrum& sp, std::size_t i) {
    const double target = std::abs(sp.value[i]) / std::sqrt(2.0);
    double f_lo = sp.frequency.front();
    for (std::size_t j = i; j-- > 0;) {
        if (std::abs(sp.value[j]) <= target) {
            f_lo = sp.frequency[j];
            break;
        }
    }
    double f_hi = sp.frequency.back();
    for (std::size_t j = i + 1; j < sp.size(); ++j) {
        if (std::abs(sp.value[j]) <= target) {
            f_hi = sp.frequency[j];
            break;
        }
    }
    const double step = sp.frequency[std::min(i + 1, sp.size() - 1)] -
                        sp.frequency[i > 0 ? i - 1 : 0];
    return std::max(f_hi - f_lo, std::abs(step));
}

std::size_t nearest_index(const Spectrum& sp, double f) {
    std::size_t best = 0;
    double dist = std::abs(sp.frequency[0] - f);
    for (std::size_t i = 1; i < sp.size(); ++i) {
        const double d = std::abs(sp.frequency[i] - f);
        if (d < dist) {
            dist = d;
            best = i;
        }
    }
    return best;
}

} // namespace

MBVDModel init_mbvd(const Spectrum& sp, std::size_t n_branches) {
    check_spectrum(sp);
    if (sp.size() < 3)
        throw std::invalid_argument("init_mbvd: spectrum too short");

    MBVDModel m;
    const std::size_t n = sp.size();

    // rs from the high-frequency real part of Z.
    double rs_acc = 0.0;
    const std::size_t n_hf = std::min<std::size_t>(5, n);
    for (std::size_t i = n - n_hf; i < n; ++i)
        rs_acc += (1.0 / sp.value[i]).real();
    m.rs = std::max(rs_acc / static_cast<double>(n_hf), 0.0);

    // ls and a capacitance estimate from the high-frequency reactance:
    // above the last resonance Im(Z) ~ omega ls - 1/(omega c0), which is
    // linear in (omega, 1/omega). Plain 2x2 normal equations.
    double c0_hf = 0.0;
    {
        const std::size_t n_fit = std::max<std::size_t>(4, n / 8);
        double s_aa = 0, s_ab = 0, s_bb = 0, s_ay = 0, s_by = 0;
        for (std::size_t i = n - std::min(n_fit, n); i < n; ++i) {
            const double omega = two_pi * sp.frequency[i];
            const double a = omega, b = -1.0 / omega;
            const double yv = (1.0 / sp.value[i]).imag();
            s_aa += a * a;
            s_ab += a * b;
            s_bb += b * b;
            s_ay += a * yv;
            s_by += b * yv;
        }
        const double det = s_aa * s_bb - s_ab * s_ab;
        if (std::abs(det) > 0.0) {
            const double ls_fit = (s_ay * s_bb - s_by * s_ab) / det;
            const double inv_c0 = (s_aa * s_by - s_ab * s_ay) / det;
            m.ls = std::max(ls_fit, 0.0);
            if (inv_c0 > 0.0)
                c0_hf = 1.0 / inv_c0;
        }
    }

    // De-embed the series parasitics estimate so branch seeds see the
    // unwidened fs/fp separation.
    Spectrum core;
    core.frequency = sp.frequency;
    core.value.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double omega = two_pi * sp.frequency[i];
        const std::complex<double> z_core =
            1.0 / sp.value[i] - std::complex<double>(m.rs, omega * m.ls);
        core.value.push_back(1.0 / z_core);
    }

    // c0 from the low-frequency slope of Im(Y_core) against omega. The
    // motional statics bias it a few percent high; the fit absorbs that.
    const std::size_t n_lf = std::max<std::size_t>(3, n / 20);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n_lf && i < n; ++i) {
        const double omega = two_pi * core.frequency[i];
        num += omega * core.value[i].imag();
        den += omega * omega;
    }
    m.c0 = num / den;
    if (!(m.c0 > 0.0))
        m.c0 = c0_hf;
    if (!(m.c0 > 0.0))
        m.c0 = std::abs(sp.value.front()) / (two_pi * sp.frequency.front());

    if (n_branches == 0)
        return m;

    auto peaks = find_resonances(core, 0.5);
    if (peaks.size() < n_branches)
        throw std::runtime_error("init_mbvd: found " + std::to_string(peaks.size()) +
                                 " peaks, need " + std::to_string(n_branches));
    std::sort(peaks.begin(), peaks.end(),
              [](const ResonancePair& a, const ResonancePair& b) {
                  return a.prominence_db > b.prominence_db;
              });
    peaks.resize(n_branches);
    std::sort(peaks.begin(), peaks.end(),
              [](const ResonancePair& a, const ResonancePair& b) { return a.fs < b.fs; });

    for (const auto& peak : peaks) {
        MotionalBranch b;
        b.fs = peak.fs;
        b.k2 = peak.fp ? std::clamp(coupling_from_fsfp(peak), 1e-4, 0.3) : 0.01;
        const double width = width_3db(core, nearest_index(core, peak.fs));
        b.q = std::clamp(peak.fs / width, 0.5, 1e4);
        m.branches.push_back(b);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

namespace {

// Parameter layout: [rs, ls, c0, (fs, k2, q) per branch].
std::vector<double> pack(const MBVDModel& m) {
    std::vector<double> p = {m.rs, m.ls, m.c0};
    for (const auto& b : m.branches) {
        p.push_back(b.fs);
        p.push_back(b.k2);
        p.push_back(b.q);
    }
    return p;
}

MBVDModel unpack(const std::vector<double>& p, std::size_t n_branches) {
    MBVDModel m;
    m.rs = p[0];
    m.ls = p[1];
    m.c0 = p[2];
    for (std::size_t i = 0; i < n_branches; ++i)
        m.branches.push_back({p[3 + 3 * i], p[4 + 3 * i], p[5 + 3 * i]});
    return m;
}

// Y and dY/dp (all parameters) at one frequency.
void admittance_with_gradient(const std::vector<double>& p, std::size_t n_branches,
                              double frequency, std::complex<double>& y,
                              std::vector<std::complex<double>>& dy) {
    const double omega = two_pi * frequency;
    const std::complex<double> j(0.0, 1.0);
    const double rs = p[0], ls = p[1], c0 = p[2];

    std::complex<double> y_core = j * omega * c0;
    // dZb/d{fs,k2,q,c0} per branch feeds through dYb = -Yb^2 dZb.
    std::vector<std::complex<double>> dy_core(3 + 3 * n_branches, 0.0);
    dy_core[2] = j * omega; // static part of dY_core/dc0

    for (std::size_t i = 0; i < n_branches; ++i) {
        const double fs = p[3 + 3 * i], k2 = p[4 + 3 * i], q = p[5 + 3 * i];
        const double g = k2 * eight_over_pi2;
        const double cm = c0 * g / (1.0 - g);
        const double ws = two_pi * fs;
        const double l = 1.0 / (ws * ws * cm);
        const double r = ws * l / q;

        const std::complex<double> zb(r, omega * l - 1.0 / (omega * cm));
        const std::complex<double> yb = 1.0 / zb;
        y_core += yb;

        const double dcm_dk2 = c0 * eight_over_pi2 / ((1.0 - g) * (1.0 - g));
        const std::complex<double> dzb_dcm =
            std::complex<double>(-r / cm, -omega * l / cm) + j / (omega * cm * cm);

        const std::complex<double> dzb_dfs(-r / fs, -2.0 * omega * l / fs);
        const std::complex<double> dzb_dk2 = dzb_dcm * dcm_dk2;
        const std::complex<double> dzb_dq(-r / q, 0.0);
        const std::complex<double> dzb_dc0 = -zb / c0;

        const std::complex<double> factor = -yb * yb;
        dy_core[2] += factor * dzb_dc0;
        dy_core[3 + 3 * i] = factor * dzb_dfs;
        dy_core[4 + 3 * i] = factor * dzb_dk2;
        dy_core[5 + 3 * i] = factor * dzb_dq;
    }

    const std::complex<double> z_total =
        std::complex<double>(rs, omega * ls) + 1.0 / y_core;
    y = 1.0 / z_total;

    // dY/dp = -Y^2 dZtot/dp ; dZtot/d(core param) = -(1/Ycore^2) dYcore/dp.
    const std::complex<double> my2 = -y * y;
    const std::complex<double> core_chain = -1.0 / (y_core * y_core);
    dy.assign(3 + 3 * n_branches, 0.0);
    dy[0] = my2;
    dy[1] = my2 * j * omega;
    for (std::size_t k = 2; k < dy.size(); ++k)
        dy[k] = my2 * core_chain * dy_core[k];
}

} // namespace

FitObjective fit_objective(const MBVDModel& m, const Spectrum& sp,
                           FitWeighting weighting) {
    check_spectrum(sp);
    const std::size_t n_branches = m.branches.size();
    const std::size_t n_params = 3 + 3 * n_branches;
    const std::size_t n_points = sp.size();
    const std::vector<double> p = pack(m);

    FitObjective obj;
    obj.residuals.resize(2 * n_points);
    obj.jacobian.resize(2 * n_points * n_params);
    std::vector<std::complex<double>> dy;
    for (std::size_t k = 0; k < n_points; ++k) {
        std::complex<double> y;
        admittance_with_gradient(p, n_branches, sp.frequency[k], y, dy);
        const std::complex<double> yd = sp.value[k];
        if (weighting == FitWeighting::log_mag_phase) {
            obj.residuals[2 * k] = std::log(std::abs(y)) - std::log(std::abs(yd));
            obj.residuals[2 * k + 1] = std::arg(y * std::conj(yd));
        } else {
            obj.residuals[2 * k] = y.real() - yd.real();
            obj.residuals[2 * k + 1] = y.imag() - yd.imag();
        }
        for (std::size_t i = 0; i < n_params; ++i) {
            double d_mag, d_ph;
            if (weighting == FitWeighting::log_mag_phase) {
                const std::complex<double> rel = dy[i] / y;
                d_mag = rel.real();
                d_ph = rel.imag();
            } else {
                d_mag = dy[i].real();
                d_ph = dy[i].imag();
            }
            obj.jacobian[(2 * k) * n_params + i] = d_mag;
            obj.jacobian[(2 * k + 1) * n_params + i] = d_ph;
        }
    }
    return obj;
}

FitReport fit_mbvd(const Spectrum& sp, std::size_t n_branches, FitWeighting weighting) {
    check_spectrum(sp);
    const MBVDModel seed = init_mbvd(sp, n_branches);
    const std::size_t n_params = 3 + 3 * n_branches;
    const std::vector<double> seed_p = pack(seed);

    // Internal optimizer coordinates: rs and ls stay linear (either may be
    // exactly zero), everything strictly positive moves in log space so
    // steps are multiplicative and cannot cross zero.
    const double rs_scale = std::max(seed_p[0], 1.0);
    const double ls_scale = std::max(seed_p[1], 1e-11);
    auto to_model_value = [&](std::size_t i, double u) {
        if (i == 0)
            return u * rs_scale;
        if (i == 1)
            return u * ls_scale;
        return std::exp(u);
    };
    auto to_internal = [&](std::size_t i, double p) {
        if (i == 0)
            return p / rs_scale;
        if (i == 1)
            return p / ls_scale;
        return std::log(p);
    };
    auto chain = [&](std::size_t i, double p) {
        // d p / d u
        if (i == 0)
            return rs_scale;
        if (i == 1)
            return ls_scale;
        return p;
    };

    std::vector<double> lower(n_params), upper(n_params), x0(n_params);
    lower[0] = 0.0;
    upper[0] = to_internal(0, 1e6);
    lower[1] = 0.0;
    upper[1] = to_internal(1, 1e-5);
    lower[2] = to_internal(2, 1e-20);
    upper[2] = to_internal(2, 1e-6);
    for (std::size_t i = 0; i < n_branches; ++i) {
        lower[3 + 3 * i] = std::log(0.2 * sp.frequency.front());
        upper[3 + 3 * i] = std::log(2.0 * sp.frequency.back());
        lower[4 + 3 * i] = std::log(1e-6);
        upper[4 + 3 * i] = std::log(0.9);
        lower[5 + 3 * i] = std::log(0.05);
        upper[5 + 3 * i] = std::log(1e6);
    }
    for (std::size_t i = 0; i < n_params; ++i)
        x0[i] = to_internal(i, seed_p[i]);

    const std::size_t n_points = sp.size();
    auto to_model = [&](const std::vector<double>& x) {
        std::vector<double> p(n_params);
        for (std::size_t i = 0; i < n_params; ++i)
            p[i] = to_model_value(i, x[i]);
        return unpack(p, n_branches);
    };

    ResidualFn residual = [&, weighting](const std::vector<double>& x) {
        return fit_objective(to_model(x), sp, weighting).residuals;
    };

    JacobianFn jacobian = [&, weighting](const std::vector<double>& x) {
        const MBVDModel m = to_model(x);
        const std::vector<double> p = pack(m);
        FitObjective obj = fit_objective(m, sp, weighting);
        for (std::size_t row = 0; row < 2 * n_points; ++row)
            for (std::size_t i = 0; i < n_params; ++i)
                obj.jacobian[row * n_params + i] *= chain(i, p[i]);
        return std::move(obj.jacobian);
    };

    LMOptions options;
    options.max_iterations = 500;
    options.gradient_tol = 1e-10;
    options.lambda_init = 1e-2;
    const LMResult lm = levenberg_marquardt(residual, jacobian, x0, lower, upper, options);

    FitReport report;
    report.model = to_model(lm.x);
    report.residual_rms =
        std::sqrt(lm.cost / static_cast<double>(2 * n_points));
    report.iterations = lm.iterations;
    report.converged = lm.converged;
    report.gradient_norm = lm.gradient_norm;

    const char* base_names[3] = {"rs", "ls", "c0"};
    const std::vector<double> fitted = pack(report.model);
    for (std::size_t i = 0; i < n_params; ++i) {
        FitParam fp;
        if (i < 3) {
            fp.name = base_names[i];
        } else {
            const std::size_t branch = (i - 3) / 3;
            const char* field[3] = {"fs", "k2", "q"};
            fp.name = "branch" + std::to_string(branch + 1) + "." + field[(i - 3) % 3];
        }
        fp.value = fitted[i];
        fp.at_lower = lm.at_lower[i] != 0;
        fp.at_upper = lm.at_upper[i] != 0;
        report.params.push_back(fp);
    }
    std::sort(report.model.branches.begin(), report.model.branches.end(),
              [](const MotionalBranch& a, const MotionalBranch& b) { return a.fs < b.fs; });
    return report;
}

std::string fit_report_text(const FitReport& report) {
    char buf[128];
    std::string out;
    out += std::string("converged = ") + (report.converged ? "true" : "false") + "\n";
    std::snprintf(buf, sizeof(buf), "iterations = %d\n", report.iterations);
    out += buf;
    std::snprintf(buf, sizeof(buf), "residual_rms = %.17g\n", report.residual_rms);
    out += buf;
    std::snprintf(buf, sizeof(buf), "gradient_norm = %.17g\n", report.gradient_norm);
    out += buf;
    for (const auto& p : report.params) {
        std::snprintf(buf, sizeof(buf), "%s = %.17g", p.name.c_str(), p.value);
        out += buf;
        if (p.at_lower)
            out += "  # at lower bound";
        else if (p.at_upper)
            out += "  # at upper bound";
        out += "\n";
    }
    return out;
}

} // namespace smr
