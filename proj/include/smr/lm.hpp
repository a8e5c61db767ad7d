#ifndef SMR_LM_HPP
#define SMR_LM_HPP

#include <functional>
#include <vector>

namespace smr {

/// Residual vector r(x), length m.
using ResidualFn = std::function<std::vector<double>(const std::vector<double>&)>;

/// Jacobian J(x), row-major m x n (row i = d r_i / d x).
using JacobianFn = std::function<std::vector<double>(const std::vector<double>&)>;

struct LMOptions {
    int max_iterations = 500;
    double gradient_tol = 1e-10; // on max|J^T r| of free parameters
    double step_tol = 1e-14;     // relative step size giving up
    double lambda_init = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 10.0;
    double lambda_max = 1e12;
};

struct LMResult {
    std::vector<double> x;
    double cost = 0.0; // sum of squared residuals
    int iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
    std::vector<char> at_lower; // per parameter: finished on its lower bound
    std::vector<char> at_upper;
};

/// Deterministic box-constrained damped least squares (Levenberg-Marquardt
/// with multiplicative damping of diag(J^T J) and bound projection of trial
/// steps). No randomness anywhere: identical inputs give identical results.
LMResult levenberg_marquardt(const ResidualFn& residual, const JacobianFn& jacobian,
                             std::vector<double> x0,
                             const std::vector<double>& lower,
                             const std::vector<double>& upper,
                             const LMOptions& options = {});

/// Central-difference Jacobian helper for callers without an analytic one.
JacobianFn numeric_jacobian(const ResidualFn& residual, double rel_step = 1e-6);

} // namespace smr

#endif // SMR_LM_HPP
