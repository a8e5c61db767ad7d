#ifndef SMR_MBVD_HPP
#define SMR_MBVD_HPP

#include "smr/spectrum.hpp"

#include <span>
#include <string>
#include <vector>

namespace smr {

// Multi-motional modified Butterworth-Van Dyke model. Branches are
// parameterized by (fs, k2, Q) instead of (R, L, C): the ranges are physical
// and the conditioning is far better. The exact bijection to RLC is
// branch_rlc / branch_from_rlc below, with
//   Cm = c0 k2 (8/pi^2) / (1 - k2 (8/pi^2)),
//   L  = 1 / ((2 pi fs)^2 Cm),
//   R  = 2 pi fs L / Q.

struct MotionalBranch {
    double fs = 0.0; // series resonance, Hz
    double k2 = 0.0; // coupling, dimensionless in (0, 1)
    double q = 0.0;  // branch quality factor
};

struct MBVDModel {
    double rs = 0.0; // series routing resistance, Ohm
    double ls = 0.0; // series routing inductance, H
    double c0 = 0.0; // static capacitance, F
    std::vector<MotionalBranch> branches; // ordered by fs
};

/// Throws std::invalid_argument when a model invariant is violated.
void check_model(const MBVDModel& m);

struct BranchRLC {
    double r; // Ohm
    double l; // H
    double c; // F
};

BranchRLC branch_rlc(double c0, const MotionalBranch& b);
MotionalBranch branch_from_rlc(double c0, const BranchRLC& rlc);

/// Y(f) of the full model:
/// Y_core = i w c0 + sum 1/(R + i w L + 1/(i w Cm)),
/// Y      = 1/(rs + i w ls + 1/Y_core).
Spectrum mbvd_admittance(const MBVDModel& m, std::span<const double> grid);
std::complex<double> mbvd_admittance_at(const MBVDModel& m, double frequency);

/// Deterministic seed model from a spectrum: c0 from the low-frequency
/// Im(Y)/w slope, branches at the n strongest resonance peaks, k2 from the
/// fs/fp estimator, Q from the -3 dB width, rs from high-frequency Re(Z).
/// Throws std::runtime_error when fewer than n peaks qualify.
MBVDModel init_mbvd(const Spectrum& sp, std::size_t n_branches);

enum class FitWeighting {
    uniform,       // plain complex residuals Re/Im(Y_model - Y_data)
    log_mag_phase  // (ln|Ym| - ln|Yd|) and principal arg(Ym/Yd) residuals
};

struct FitParam {
    std::string name;
    double value = 0.0;
    bool at_lower = false;
    bool at_upper = false;
};

struct FitReport {
    MBVDModel model;
    double residual_rms = 0.0; // weighted RMS over all residual rows
    int iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
    std::vector<FitParam> params;
};

/// Residuals and analytic Jacobian of the fit objective at a model point.
/// Rows alternate (magnitude, phase) per grid point; columns follow the
/// parameter order [rs, ls, c0, (fs, k2, q) per branch].
struct FitObjective {
    std::vector<double> residuals;  // 2 * n_points
    std::vector<double> jacobian;   // row-major (2 * n_points) x n_params
};
FitObjective fit_objective(const MBVDModel& m, const Spectrum& sp,
                           FitWeighting weighting);

/// Damped least squares from the init_mbvd seed, analytic Jacobian,
/// iteration cap 500, gradient tolerance 1e-10, box bounds from the model
/// invariants. Non-convergence is reported, not thrown.
FitReport fit_mbvd(const Spectrum& sp, std::size_t n_branches,
                   FitWeighting weighting = FitWeighting::log_mag_phase);

/// Key-value serialization of a fit report.
std::string fit_report_text(const FitReport& report);

} // namespace smr

#endif // SMR_MBVD_HPP
