#include "smr/inverse.hpp"

#include "smr/errors.hpp"
#include "smr/resonance.hpp"
#include "smr/stack_io.hpp"
#include "smr/tmm.hpp"
#include "smr/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace smr {

void check_problem(const InverseProblem& p) {
    require_valid(p.template_stack);
    if (p.unknowns.empty())
        throw std::invalid_argument("inverse: at least one unknown required");
    if (p.targets.size() < p.unknowns.size())
        throw std::invalid_argument("inverse: need at least as many targets as unknowns");
    for (const auto& u : p.unknowns) {
        if (u.layer_index >= p.template_stack.layers.size())
            throw std::invalid_argument("inverse: unknown layer index out of range");
        if (!(u.lower > 0.0) || !(u.upper > u.lower) || !std::isfinite(u.upper))
            throw std::invalid_argument("inverse: bounds must satisfy 0 < lo < hi < inf");
    }
    for (const auto& t : p.targets) {
        if (t.mode_order < 1)
            throw std::invalid_argument("inverse: mode orders are 1-based");
        if (!(t.fs > 0.0))
            throw std::invalid_argument("inverse: target fs must be > 0");
        if (t.weight < 0.0)
            throw std::invalid_argument("inverse: weights must be >= 0");
    }
    if (p.grid.size() < 8)
        throw std::invalid_argument("inverse: evaluation grid too coarse");
}

Stack instantiate(const InverseProblem& p, std::span<const double> x) {
    if (x.size() != p.unknowns.size())
        throw std::invalid_argument("inverse: parameter vector size mismatch");
    Stack s = p.template_stack;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Unknown& u = p.unknowns[i];
        Layer& layer = s.layers[u.layer_index];
        if (u.kind == UnknownKind::thickness)
            layer.thickness = x[i];
        else
            layer.material.velocity = x[i];
    }
    return s;
}

double resonance_residual(const InverseProblem& p, std::span<const double> x) {
    std::vector<double> xc(x.begin(), x.end());
    for (std::size_t i = 0; i < xc.size(); ++i) {
        const Unknown& u = p.unknowns[i];
        const double slack = 1e-9 * (u.upper - u.lower);
        if (xc[i] < u.lower - slack || xc[i] > u.upper + slack)
            throw std::invalid_argument("inverse: candidate outside bounds");
        xc[i] = std::clamp(xc[i], u.lower, u.upper);
    }

    const Stack s = instantiate(p, xc);
    const Spectrum sp = admittance_spectrum(s, p.grid);
    const auto peaks = find_resonances(sp, p.prominence_db);

    double residual = 0.0;
    for (const auto& t : p.targets) {
        const std::size_t idx = static_cast<std::size_t>(t.mode_order - 1);
        if (idx < peaks.size()) {
            const double rel = (peaks[idx].fs - t.fs) / t.fs;
            residual += t.weight * rel * rel;
        } else {
            residual += t.weight * missing_mode_penalty;
        }
    }
    return residual;
}

namespace {

struct Evaluator {
    const InverseProblem& p;
    int count = 0;

    double operator()(std::span<const double> x) {
        ++count;
        return resonance_residual(p, x);
    }
};

constexpr int grid_points_per_axis = 32;
constexpr double golden = 0.6180339887498949; // (sqrt(5)-1)/2

// Golden-section minimization of f along axis `axis` with the other
// coordinates held at `x`. Ties and plateaus resolve toward the lower bound.
double golden_section(Evaluator& eval, std::vector<double> x, std::size_t axis,
                      double lo, double hi, double tol_rel) {
    double a = lo, b = hi;
    auto at = [&](double v) {
        x[axis] = v;
        return eval(x);
    };
    double c = b - golden * (b - a);
    double d = a + golden * (b - a);
    double fc = at(c), fd = at(d);
    const double tol = tol_rel * (hi - lo);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = at(d);
        }
    }
    return 0.5 * (a + b);
}

// 32-point scan along one axis; returns the bracketing interval around the
// best sample (lowest value wins ties at the lowest parameter).
void grid_bracket(Evaluator& eval, std::vector<double> x, std::size_t axis,
                  double lo, double hi, double& bracket_lo, double& bracket_hi) {
    double best_value = std::numeric_limits<double>::infinity();
    int best_i = 0;
    const double step = (hi - lo) / (grid_points_per_axis - 1);
    for (int i = 0; i < grid_points_per_axis; ++i) {
        x[axis] = lo + i * step;
        const double v = eval(x);
        if (v < best_value) {
            best_value = v;
            best_i = i;
        }
    }
    bracket_lo = lo + std::max(best_i - 1, 0) * step;
    bracket_hi = lo + std::min(best_i + 1, grid_points_per_axis - 1) * step;
}

} // namespace

ExtractResult extract_parameters(const InverseProblem& p) {
    check_problem(p);
    Evaluator eval{p};

    const std::size_t n = p.unknowns.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = 0.5 * (p.unknowns[i].lower + p.unknowns[i].upper);

    const int sweeps = (n == 1) ? 1 : 4;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t axis = 0; axis < n; ++axis) {
            double blo, bhi;
            grid_bracket(eval, x, axis, p.unknowns[axis].lower, p.unknowns[axis].upper,
                         blo, bhi);
            x[axis] = golden_section(eval, x, axis, blo, bhi, 1e-4);
        }
    }

    ExtractResult result;
    result.estimate = x;
    result.evaluations = eval.count;

    // Diagnostics from the final forward run.
    const Stack s = instantiate(p, x);
    const Spectrum sp = admittance_spectrum(s, p.grid);
    const auto peaks = find_resonances(sp, p.prominence_db);
    result.residual = 0.0;
    for (const auto& t : p.targets) {
        TargetDiagnostic d;
        d.mode_order = t.mode_order;
        d.measured = t.fs;
        const std::size_t idx = static_cast<std::size_t>(t.mode_order - 1);
        if (idx < peaks.size()) {
            d.modeled = peaks[idx].fs;
            const double rel = (d.modeled - t.fs) / t.fs;
            d.term = t.weight * rel * rel;
        } else {
            d.modeled = std::numeric_limits<double>::quiet_NaN();
            d.term = t.weight * missing_mode_penalty;
        }
        result.residual += d.term;
        result.table.push_back(d);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double span = p.unknowns[i].upper - p.unknowns[i].lower;
        if (x[i] - p.unknowns[i].lower < 1e-3 * span ||
            p.unknowns[i].upper - x[i] < 1e-3 * span)
            result.boundary_warning = true;
    }
    return result;
}

InverseProblem parse_inverse_file(const std::string& text) {
    const std::string sections[] = {"inverse"};
    const StackDocument doc = parse_stack_document(text, sections);
    const auto it = doc.extra_sections.find("inverse");
    if (it == doc.extra_sections.end())
        throw ParseError("missing [inverse] section", 1);

    InverseProblem p;
    p.template_stack = doc.stack;
    p.grid = units::linear_grid(1e9, 70e9, 1400); // default; overridable below

    for (const RawLine& raw : it->second) {
        std::istringstream ss(raw.text);
        std::string key, eq;
        ss >> key >> eq;
        if (eq != "=")
            throw ParseError("expected '<key> = <value>'", raw.line_no);
        if (key == "unknown") {
            std::string kw, kind_name;
            std::size_t index = 0;
            std::string lo_s, hi_s;
            ss >> kw >> index >> kind_name >> lo_s >> hi_s;
            if (kw != "layer" || lo_s.empty() || hi_s.empty())
                throw ParseError("unknown must be 'layer <index> thickness|velocity <lo> <hi>'",
                                 raw.line_no);
            Unknown u;
            u.layer_index = index;
            if (kind_name == "thickness")
                u.kind = UnknownKind::thickness;
            else if (kind_name == "velocity")
                u.kind = UnknownKind::velocity;
            else
                throw ParseError("unknown parameter kind '" + kind_name + "'", raw.line_no);
            try {
                u.lower = units::parse_quantity(lo_s);
                u.upper = units::parse_quantity(hi_s);
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), raw.line_no);
            }
            p.unknowns.push_back(u);
        } else if (key == "target") {
            int order = 0;
            std::string fs_s, w_s;
            ss >> order >> fs_s >> w_s;
            if (order < 1 || fs_s.empty())
                throw ParseError("target must be '<order> <fs> [weight]'", raw.line_no);
            ModeTarget t;
            t.mode_order = order;
            try {
                t.fs = units::parse_quantity(fs_s);
                t.weight = w_s.empty() ? 1.0 : units::parse_quantity(w_s);
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), raw.line_no);
            }
            p.targets.push_back(t);
        } else if (key == "grid") {
            std::string spec;
            ss >> spec;
            try {
                p.grid = units::parse_grid(spec);
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), raw.line_no);
            }
        } else if (key == "prominence") {
            std::string v;
            ss >> v;
            try {
                p.prominence_db = units::parse_quantity(v);
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), raw.line_no);
            }
        } else {
            throw ParseError("unknown inverse key '" + key + "'", raw.line_no);
        }
        std::string trailing;
        if (ss >> trailing)
            throw ParseError("unexpected token '" + trailing + "'", raw.line_no);
    }

    check_problem(p);
    return p;
}

std::string diagnostics_csv(const ExtractResult& r) {
    std::string out = "mode_order,measured_hz,modeled_hz,residual_term\n";
    char buf[160];
    for (const auto& d : r.table) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", d.mode_order,
                      d.measured, d.modeled, d.term);
        out += buf;
    }
    return out;
}

} // namespace smr
