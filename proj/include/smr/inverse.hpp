#ifndef SMR_INVERSE_HPP
#define SMR_INVERSE_HPP

#include "smr/spectrum.hpp"
#include "smr/stack.hpp"

#include <span>
#include <string>
#include <vector>

namespace smr {

// Back-extraction of unknown layer thicknesses (or velocities) from measured
// mode frequencies using the forward stack model. Modes are matched to
// targets by frequency order of the detected peaks above a prominence floor;
// a target without a detected mode contributes a fixed penalty
// (missing_mode_penalty) so the residual stays finite and continuous across
// mode birth/death.

enum class UnknownKind { thickness, velocity };

struct Unknown {
    std::size_t layer_index = 0;
    UnknownKind kind = UnknownKind::thickness;
    double lower = 0.0;
    double upper = 0.0;
};

struct ModeTarget {
    int mode_order = 1;    // 1 = lowest detected mode
    double fs = 0.0;       // measured series resonance, Hz
    double weight = 1.0;
};

struct InverseProblem {
    Stack template_stack;
    std::vector<Unknown> unknowns;
    std::vector<ModeTarget> targets;
    std::vector<double> grid;      // forward-model evaluation grid
    double prominence_db = 3.0;    // detection floor for mode counting
};

/// Worst-case squared relative error charged per missing target mode.
constexpr double missing_mode_penalty = 0.25;

/// Throws std::invalid_argument when the problem is ill-formed.
void check_problem(const InverseProblem& p);

/// Template stack with the unknowns substituted by x.
Stack instantiate(const InverseProblem& p, std::span<const double> x);

/// Sum over targets of w ((fs_model - fs_meas)/fs_meas)^2, with the missing
/// mode penalty where the ordered peak list is too short.
double resonance_residual(const InverseProblem& p, std::span<const double> x);

struct TargetDiagnostic {
    int mode_order = 0;
    double measured = 0.0; // Hz
    double modeled = 0.0;  // Hz; NaN when the mode was not detected
    double term = 0.0;     // weighted residual contribution
};

struct ExtractResult {
    std::vector<double> estimate;
    double residual = 0.0;
    bool boundary_warning = false; // an estimate finished on its bound
    std::vector<TargetDiagnostic> table;
    int evaluations = 0;
};

/// Deterministic bounded minimization: a 32-point grid per axis seeds a
/// golden-section refinement (single unknown) or cyclic coordinate descent
/// (several unknowns). Ties prefer the lowest parameter value.
ExtractResult extract_parameters(const InverseProblem& p);

/// Parse an inverse-problem document: a stack file plus an [inverse] section.
///
///   [inverse]
///   unknown = layer <index> thickness <lo> <hi>
///   unknown = layer <index> velocity <lo> <hi>
///   target  = <order> <fs> [weight]
///   grid    = start:stop:points      (optional)
///   prominence = <dB>                (optional)
InverseProblem parse_inverse_file(const std::string& text);

/// CSV table of the per-target diagnostics.
std::string diagnostics_csv(const ExtractResult& r);

} // namespace smr

#endif // SMR_INVERSE_HPP
