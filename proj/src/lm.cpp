#include "smr/lm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smr {

namespace {

double sum_sq(const std::vector<double>& r) {
    double s = 0.0;
    for (const double v : r)
        s += v * v;
    return s;
}

// Solve A x = b for symmetric positive definite A (in-place Cholesky).
// Returns false when A is not positive definite.
bool solve_spd(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k)
                s -= a[i * n + k] * a[j * n + k];
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s))
                    return false;
                a[i * n + i] = std::sqrt(s);
            } else {
                a[i * n + j] = s / a[j * n + j];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k)
            s -= a[i * n + k] * b[k];
        b[i] = s / a[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k)
            s -= a[k * n + i] * b[k];
        b[i] = s / a[i * n + i];
    }
    return true;
}

} // namespace

LMResult levenberg_marquardt(const ResidualFn& residual, const JacobianFn& jacobian,
                             std::vector<double> x0,
                             const std::vector<double>& lower,
                             const std::vector<double>& upper,
                             const LMOptions& options) {
    const std::size_t n = x0.size();
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("levenberg_marquardt: bound size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (lower[i] > upper[i])
            throw std::invalid_argument("levenberg_marquardt: lower > upper");
        x0[i] = std::clamp(x0[i], lower[i], upper[i]);
    }

    LMResult res;
    res.x = std::move(x0);
    res.at_lower.assign(n, 0);
    res.at_upper.assign(n, 0);

    std::vector<double> r = residual(res.x);
    const std::size_t m = r.size();
    res.cost = sum_sq(r);
    double lambda = options.lambda_init;

    auto gradient_free_norm = [&](const std::vector<double>& grad,
                                  const std::vector<double>& x) {
        // Gradient components pushing into an active bound do not count.
        double g = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool at_lo = x[i] <= lower[i] && grad[i] > 0.0;
            const bool at_hi = x[i] >= upper[i] && grad[i] < 0.0;
            if (!at_lo && !at_hi)
                g = std::max(g, std::abs(grad[i]));
        }
        return g;
    };

    for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
        const std::vector<double> jac = jacobian(res.x);
        if (jac.size() != m * n)
            throw std::invalid_argument("levenberg_marquardt: jacobian size mismatch");

        // grad = J^T r ; jtj = J^T J
        std::vector<double> grad(n, 0.0), jtj(n * n, 0.0);
        for (std::size_t row = 0; row < m; ++row) {
            for (std::size_t i = 0; i < n; ++i) {
                const double jri = jac[row * n + i];
                grad[i] += jri * r[row];
                for (std::size_t j = 0; j <= i; ++j)
                    jtj[i * n + j] += jri * jac[row * n + j];
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                jtj[i * n + j] = jtj[j * n + i];

        res.gradient_norm = gradient_free_norm(grad, res.x);
        if (res.gradient_norm < options.gradient_tol) {
            res.converged = true;
            break;
        }

        bool stepped = false;
        while (lambda <= options.lambda_max) {
            // (J^T J + lambda diag(J^T J)) delta = -J^T r
            std::vector<double> a = jtj;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = std::max(jtj[i * n + i], 1e-30);
                a[i * n + i] = d * (1.0 + lambda);
            }
            std::vector<double> delta(n);
            for (std::size_t i = 0; i < n; ++i)
                delta[i] = -grad[i];
            if (!solve_spd(a, delta, n)) {
                lambda *= options.lambda_up;
                continue;
            }

            std::vector<double> x_try(n);
            double step = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                x_try[i] = std::clamp(res.x[i] + delta[i], lower[i], upper[i]);
                step = std::max(step,
                                std::abs(x_try[i] - res.x[i]) /
                                    std::max(std::abs(res.x[i]), 1e-30));
            }
            if (step < options.step_tol) {
                res.converged = true;
                break;
            }

            const std::vector<double> r_try = residual(x_try);
            const double cost_try = sum_sq(r_try);
            if (std::isfinite(cost_try) && cost_try < res.cost) {
                res.x = std::move(x_try);
                r = r_try;
                res.cost = cost_try;
                lambda = std::max(lambda / options.lambda_down, 1e-12);
                stepped = true;
                break;
            }
            lambda *= options.lambda_up;
        }

        if (res.converged || !stepped)
            break;
    }

    for (std::size_t i = 0; i < n; ++i) {
        res.at_lower[i] = res.x[i] <= lower[i] ? 1 : 0;
        res.at_upper[i] = res.x[i] >= upper[i] ? 1 : 0;
    }
    return res;
}

JacobianFn numeric_jacobian(const ResidualFn& residual, double rel_step) {
    return [residual, rel_step](const std::vector<double>& x) {
        const std::size_t n = x.size();
        const std::vector<double> r0 = residual(x);
        const std::size_t m = r0.size();
        std::vector<double> jac(m * n);
        for (std::size_t j = 0; j < n; ++j) {
            const double h = rel_step * std::max(std::abs(x[j]), 1e-12);
            std::vector<double> xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const std::vector<double> rp = residual(xp);
            const std::vector<double> rm = residual(xm);
            for (std::size_t i = 0; i < m; ++i)
                jac[i * n + j] = (rp[i] - rm[i]) / (2.0 * h);
        }
        return jac;
    };
}

} // namespace smr
