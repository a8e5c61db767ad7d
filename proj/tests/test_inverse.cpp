#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "smr/errors.hpp"
#include "smr/inverse.hpp"
#include "smr/resonance.hpp"
#include "smr/tmm.hpp"
#include "smr/units.hpp"
#include "support.hpp"

#include <cmath>

using namespace smr;
using doctest::Approx;

namespace {

InverseProblem top_electrode_problem(std::vector<ModeTarget> targets,
                                     double lo = 15e-9, double hi = 45e-9) {
    InverseProblem p;
    p.template_stack = test::device_stack();
    p.unknowns = {{0, UnknownKind::thickness, lo, hi}};
    p.targets = std::move(targets);
    p.grid = units::linear_grid(2e9, 75e9, 1500);
    p.prominence_db = 1.0;
    return p;
}

std::vector<ModeTarget> targets_from_model(double t_top, std::size_t n_modes) {
    const Stack s = test::device_stack(t_top);
    const auto grid = units::linear_grid(2e9, 75e9, 1500);
    const auto peaks = find_resonances(admittance_spectrum(s, grid), 1.0);
    REQUIRE(peaks.size() >= n_modes);
    std::vector<ModeTarget> targets;
    for (std::size_t i = 0; i < n_modes; ++i)
        targets.push_back({static_cast<int>(i) + 1, peaks[i].fs, 1.0});
    return targets;
}

} // namespace

TEST_CASE("residual at the true parameters is numerically zero") {
    const auto p = top_electrode_problem(targets_from_model(33e-9, 3));
    const double x[] = {33e-9};
    CHECK(resonance_residual(p, x) < 1e-6);
}

TEST_CASE("all-zero weights give a zero residual") {
    auto targets = targets_from_model(33e-9, 3);
    for (auto& t : targets)
        t.weight = 0.0;
    const auto p = top_electrode_problem(std::move(targets));
    const double x[] = {22e-9};
    CHECK(resonance_residual(p, x) == 0.0);
}

TEST_CASE("symmetric electrodes with a TE2 target activate the penalty") {
    // At 40 nm the stack is symmetric: the even mode is cancelled and only
    // two peaks exist, so the third-order target pays the missing-mode fee.
    const auto p = top_electrode_problem({{1, 11.72e9, 1.0},
                                          {2, 40.38e9, 1.0},
                                          {3, 62.59e9, 1.0}});
    const double x[] = {40e-9};
    const auto peaks = find_resonances(
        admittance_spectrum(instantiate(p, x), p.grid), p.prominence_db);
    REQUIRE(peaks.size() == 2);
    CHECK(resonance_residual(p, x) >= missing_mode_penalty);
}

TEST_CASE("candidates outside the bounds are rejected") {
    const auto p = top_electrode_problem(targets_from_model(33e-9, 3));
    const double x[] = {50e-9};
    CHECK_THROWS_AS(resonance_residual(p, x), std::invalid_argument);
}

TEST_CASE("synthetic round-trip recovers the thickness to half a nanometer") {
    const auto p = top_electrode_problem(targets_from_model(33e-9, 3));
    const ExtractResult r = extract_parameters(p);
    CHECK(r.estimate[0] == Approx(33e-9).epsilon(0.5 / 33.0));
    CHECK(r.residual < 1e-6);
    CHECK(!r.boundary_warning);
    REQUIRE(r.table.size() == 3);
    for (const auto& d : r.table)
        CHECK(std::isfinite(d.modeled));
}

TEST_CASE("residual scan across the bounds never throws") {
    // Mode birth/death along the sweep is penalty-handled, not an exception.
    auto p = top_electrode_problem({{1, 11.72e9, 1.0},
                                    {2, 40.38e9, 1.0},
                                    {3, 62.59e9, 1.0}});
    p.grid = units::linear_grid(2e9, 75e9, 500);
    for (int t_nm = 15; t_nm <= 45; t_nm += 2) {
        const double x[] = {t_nm * 1e-9};
        const double r = resonance_residual(p, x);
        CHECK(std::isfinite(r));
        CHECK(r >= 0.0);
    }
}

TEST_CASE("extraction is deterministic") {
    const auto p = top_electrode_problem(targets_from_model(30e-9, 3));
    const ExtractResult a = extract_parameters(p);
    const ExtractResult b = extract_parameters(p);
    CHECK(a.estimate[0] == b.estimate[0]);
    CHECK(a.residual == b.residual);
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("a target matching the model at the lower bound warns") {
    // One unknown, one target pinned at the model value at the bound.
    const auto targets = targets_from_model(20e-9, 1);
    const auto p = top_electrode_problem(targets, 20e-9, 40e-9);
    const ExtractResult r = extract_parameters(p);
    CHECK(r.boundary_warning);
    CHECK(r.estimate[0] == Approx(20e-9).epsilon(1e-2));
}

TEST_CASE("problem validation") {
    InverseProblem p;
    p.template_stack = test::device_stack();
    p.grid = units::linear_grid(2e9, 75e9, 100);
    SUBCASE("no unknowns") {
        p.targets = {{1, 1e9, 1.0}};
        CHECK_THROWS_AS(check_problem(p), std::invalid_argument);
    }
    SUBCASE("fewer targets than unknowns") {
        p.unknowns = {{0, UnknownKind::thickness, 1e-9, 2e-9}};
        CHECK_THROWS_AS(check_problem(p), std::invalid_argument);
    }
    SUBCASE("bad bounds") {
        p.unknowns = {{0, UnknownKind::thickness, 2e-9, 1e-9}};
        p.targets = {{1, 1e9, 1.0}};
        CHECK_THROWS_AS(check_problem(p), std::invalid_argument);
    }
    SUBCASE("layer index out of range") {
        p.unknowns = {{99, UnknownKind::thickness, 1e-9, 2e-9}};
        p.targets = {{1, 1e9, 1.0}};
        CHECK_THROWS_AS(check_problem(p), std::invalid_argument);
    }
}

TEST_CASE("velocity unknowns substitute into the template") {
    InverseProblem p;
    p.template_stack = test::device_stack();
    p.unknowns = {{1, UnknownKind::velocity, 8000.0, 10000.0}};
    p.targets = {{1, 11.72e9, 1.0}};
    p.grid = units::linear_grid(2e9, 75e9, 200);
    const double x[] = {8500.0};
    const Stack s = instantiate(p, x);
    CHECK(s.layers[1].material.velocity == 8500.0);
    CHECK(s.layers[1].thickness == p.template_stack.layers[1].thickness);
}

TEST_CASE("inverse problem file parses and extracts") {
    const InverseProblem p =
        parse_inverse_file(test::read_file(test::data_path("extract_top_pt.inverse")));
    REQUIRE(p.unknowns.size() == 1);
    CHECK(p.unknowns[0].layer_index == 0);
    CHECK(p.unknowns[0].kind == UnknownKind::thickness);
    CHECK(p.unknowns[0].lower == Approx(15e-9));
    CHECK(p.unknowns[0].upper == Approx(45e-9));
    REQUIRE(p.targets.size() == 3);
    CHECK(p.targets[2].fs == Approx(62.59e9));
    CHECK(p.grid.size() == 1500);
    CHECK(p.prominence_db == Approx(1.0));
}

TEST_CASE("inverse file errors carry line numbers") {
    const std::string good = test::read_file(test::data_path("extract_top_pt.inverse"));
    SUBCASE("missing inverse section") {
        std::string text = good;
        const auto pos = text.find("[inverse]");
        text = text.substr(0, pos);
        CHECK_THROWS_AS(parse_inverse_file(text), ParseError);
    }
    SUBCASE("bad unknown kind") {
        std::string text = good;
        const auto pos = text.find("thickness 15nm");
        text.replace(pos, 9, "wobbliness");
        CHECK_THROWS_WITH_AS(parse_inverse_file(text),
                             doctest::Contains("unknown parameter kind"), ParseError);
    }
    SUBCASE("unknown inverse key") {
        CHECK_THROWS_WITH_AS(parse_inverse_file(good + "fudge = 12\n"),
                             doctest::Contains("unknown inverse key"), ParseError);
    }
    SUBCASE("trailing comments are fine, trailing junk is not") {
        CHECK_NOTHROW(parse_inverse_file(good + "prominence = 2  # floor in dB\n"));
        CHECK_THROWS_WITH_AS(parse_inverse_file(good + "prominence = 2 stray\n"),
                             doctest::Contains("unexpected token"), ParseError);
    }
}
