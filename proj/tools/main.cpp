// smr - design, simulate and characterize solidly mounted BAW resonators.
//
// Subcommands: design-mirror, simulate, analyze, fit-bvd, extract.
// Every run writes its outputs plus a manifest.json (inputs, flags, tool
// version) into one run directory; outputs carry no timestamps, so repeated
// runs on identical inputs are byte-identical.

#include "smr/bragg.hpp"
#include "smr/errors.hpp"
#include "smr/inverse.hpp"
#include "smr/mbvd.hpp"
#include "smr/resonance.hpp"
#include "smr/spectrum.hpp"
#include "smr/stack_io.hpp"
#include "smr/tmm.hpp"
#include "smr/touchstone.hpp"
#include "smr/units.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* tool_version = "0.1.0";

constexpr int exit_ok = 0;
constexpr int exit_input_error = 1;
constexpr int exit_numeric_error = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

struct RunDir {
    fs::path dir;
    json manifest;
    std::vector<std::string> outputs;

    RunDir(const std::string& out_dir, const std::string& subcommand,
           const std::vector<std::string>& argv_tail) {
        dir = out_dir;
        fs::create_directories(dir);
        manifest["tool"] = "smr";
        manifest["version"] = tool_version;
        manifest["subcommand"] = subcommand;
        manifest["arguments"] = argv_tail;
        manifest["inputs"] = json::array();
    }

    void input(const std::string& path) { manifest["inputs"].push_back(path); }

    void write(const std::string& name, const std::string& content) {
        write_file(dir / name, content);
        outputs.push_back(name);
    }

    void finish() {
        manifest["outputs"] = outputs;
        write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    }
};

const smr::Material& find_material(const std::map<std::string, smr::Material>& table,
                                   const std::string& name, const char* what) {
    const auto it = table.find(name);
    if (it == table.end())
        throw std::runtime_error(std::string(what) + ": material '" + name +
                                 "' is not defined in the materials file");
    return it->second;
}

std::string resonance_table(const std::vector<smr::ResonancePair>& pairs) {
    std::string out;
    char buf[160];
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        if (p.fp)
            std::snprintf(buf, sizeof(buf),
                          "mode %zu: fs = %.6g GHz  fp = %.6g GHz  prominence = %.3g dB\n",
                          i + 1, p.fs / 1e9, *p.fp / 1e9, p.prominence_db);
        else
            std::snprintf(buf, sizeof(buf),
                          "mode %zu: fs = %.6g GHz  fp = -          prominence = %.3g dB\n",
                          i + 1, p.fs / 1e9, p.prominence_db);
        out += buf;
    }
    if (pairs.empty())
        out = "no resonances above the prominence floor\n";
    return out;
}

// ---------------------------------------------------------------------------

int run_design_mirror(const std::string& materials_path, const std::string& low_name,
                      const std::string& high_name, const std::string& f0_text,
                      double pairs, const std::string& substrate_name,
                      const std::string& cavity_name, const std::string& grid_text,
                      double gamma_threshold, const std::string& out_dir,
                      const std::vector<std::string>& argv_tail) {
    const double f0 = smr::units::parse_quantity(f0_text);
    const auto materials = smr::parse_materials_file(read_file(materials_path));
    const smr::Material& low = find_material(materials, low_name, "design-mirror");
    const smr::Material& high = find_material(materials, high_name, "design-mirror");
    const smr::Material& substrate = find_material(materials, substrate_name, "design-mirror");
    const smr::Material& cavity = find_material(materials, cavity_name, "design-mirror");

    const smr::MirrorSpec spec = smr::design_mirror(low, high, f0, pairs);
    bool clamped = false;
    const double fbw = smr::fractional_stopband(smr::acoustic_impedance(low),
                                                smr::acoustic_impedance(high), &clamped);

    std::vector<double> grid;
    if (grid_text.empty())
        grid = smr::units::linear_grid(0.4 * f0, 1.6 * f0, 1201);
    else
        grid = smr::units::parse_grid(grid_text);

    const smr::Spectrum gamma = smr::mirror_reflectance(spec, substrate, cavity, grid);
    const auto edges = smr::measure_stopband(spec, substrate, cavity, grid, gamma_threshold);

    char buf[256];
    std::snprintf(buf, sizeof(buf), "t_low_nm = %.10g\n", spec.t_low * 1e9);
    std::cout << buf;
    std::snprintf(buf, sizeof(buf), "t_high_nm = %.10g\n", spec.t_high * 1e9);
    std::cout << buf;
    std::snprintf(buf, sizeof(buf), "fbw_formula = %.10g%s\n", fbw,
                  clamped ? "  # clamped to full band" : "");
    std::cout << buf;
    if (edges) {
        std::snprintf(buf, sizeof(buf), "stopband_low_ghz = %.6g\n", edges->f_low / 1e9);
        std::cout << buf;
        std::snprintf(buf, sizeof(buf), "stopband_high_ghz = %.6g\n", edges->f_high / 1e9);
        std::cout << buf;
        std::snprintf(buf, sizeof(buf), "fbw_numeric = %.6g\n", edges->fractional_width);
        std::cout << buf;
    }

    // Mirror fragment in the stack-definition dialect, mergeable into a
    // stack file (cavity side first).
    std::string fragment = "[materials]\n";
    fragment += smr::material_line(low) + "\n";
    fragment += smr::material_line(high) + "\n";
    fragment += "\n[stack]\n";
    const auto layers = smr::mirror_layers(spec);
    std::size_t i = 0;
    if (layers.size() % 2 == 1) {
        std::snprintf(buf, sizeof(buf), "%s  %.10gnm\n", layers[0].material.name.c_str(),
                      layers[0].thickness * 1e9);
        fragment += buf;
        i = 1;
    }
    if (i < layers.size()) {
        std::snprintf(buf, sizeof(buf), "repeat %zu\n", (layers.size() - i) / 2);
        fragment += buf;
        std::snprintf(buf, sizeof(buf), "%s  %.10gnm\n", layers[i].material.name.c_str(),
                      layers[i].thickness * 1e9);
        fragment += buf;
        std::snprintf(buf, sizeof(buf), "%s  %.10gnm\n", layers[i + 1].material.name.c_str(),
                      layers[i + 1].thickness * 1e9);
        fragment += buf;
        fragment += "end\n";
    }

    RunDir run(out_dir, "design-mirror", argv_tail);
    run.input(materials_path);
    run.write("mirror.stackfrag", fragment);
    run.write("reflectance.csv", smr::spectrum_to_csv(gamma));
    run.finish();
    std::cout << "wrote " << (run.dir / "mirror.stackfrag").string() << ", "
              << (run.dir / "reflectance.csv").string() << "\n";
    return exit_ok;
}

int run_simulate(const std::string& stack_path, const std::string& grid_text,
                 double prominence_db, double rs, double ls, double c_feed,
                 const std::string& out_dir, const std::vector<std::string>& argv_tail) {
    const smr::Stack stack = smr::parse_stack_file(read_file(stack_path));
    const std::vector<double> grid = smr::units::parse_grid(grid_text);

    std::vector<std::size_t> shifted;
    smr::Spectrum sp = smr::admittance_spectrum(stack, grid, &shifted);
    for (const std::size_t i : shifted)
        std::cout << "note: analytic pole at grid point " << i
                  << " evaluated on a shifted frequency\n";
    if (rs != 0.0 || ls != 0.0 || c_feed != 0.0)
        sp = smr::apply_parasitics(sp, rs, ls, c_feed);

    const auto pairs = smr::find_resonances(sp, prominence_db);
    std::cout << resonance_table(pairs);

    RunDir run(out_dir, "simulate", argv_tail);
    run.input(stack_path);
    run.write("admittance.csv", smr::spectrum_to_csv(sp));
    run.finish();
    std::cout << "wrote " << (run.dir / "admittance.csv").string() << "\n";
    return exit_ok;
}

int run_analyze(const std::string& s2p_path, double z0, double prominence_db,
                const std::string& out_dir, const std::vector<std::string>& argv_tail) {
    const smr::TwoPortSpectrum tp = smr::parse_touchstone(read_file(s2p_path));
    const smr::TwoPortY y = smr::s_to_y(tp);
    const smr::SeriesReduction series = smr::series_element_admittance(y);

    char buf[160];
    std::snprintf(buf, sizeof(buf), "max_asymmetry_s = %.6g\n", series.max_asymmetry);
    std::cout << buf;

    const auto pairs = smr::find_resonances(series.y_series, prominence_db);
    std::cout << resonance_table(pairs);

    const smr::BodeQResult bq = smr::bode_q(series.y_series, z0);
    if (bq.has_peak) {
        std::snprintf(buf, sizeof(buf), "bode_q_peak = %.6g\n", bq.q_peak);
        std::cout << buf;
        std::snprintf(buf, sizeof(buf), "bode_q_peak_ghz = %.6g\n", bq.f_peak / 1e9);
        std::cout << buf;
        std::snprintf(buf, sizeof(buf), "fq_product = %.6g\n", bq.f_peak * bq.q_peak);
        std::cout << buf;
    } else {
        std::cout << "bode_q_peak = none (all points flagged)\n";
    }

    RunDir run(out_dir, "analyze", argv_tail);
    run.input(s2p_path);
    run.write("y_series.csv", smr::spectrum_to_csv(series.y_series));
    run.write("bode_q.csv", smr::spectrum_to_csv(bq.q_of_f));
    run.finish();
    std::cout << "wrote " << (run.dir / "y_series.csv").string() << ", "
              << (run.dir / "bode_q.csv").string() << "\n";
    return exit_ok;
}

int run_fit_bvd(const std::string& s2p_path, const std::string& csv_path,
                std::size_t branches, const std::string& weights,
                const std::string& out_dir, const std::vector<std::string>& argv_tail) {
    smr::Spectrum sp;
    std::string input_path;
    if (!s2p_path.empty()) {
        input_path = s2p_path;
        const smr::TwoPortSpectrum tp = smr::parse_touchstone(read_file(s2p_path));
        sp = smr::series_element_admittance(smr::s_to_y(tp)).y_series;
    } else {
        input_path = csv_path;
        sp = smr::spectrum_from_csv(read_file(csv_path));
    }

    const smr::FitWeighting weighting = (weights == "uniform")
                                            ? smr::FitWeighting::uniform
                                            : smr::FitWeighting::log_mag_phase;
    const smr::FitReport report = smr::fit_mbvd(sp, branches, weighting);
    std::cout << smr::fit_report_text(report);

    const smr::Spectrum model = smr::mbvd_admittance(report.model, sp.frequency);
    std::string overlay = "freq_hz,re_y_data,im_y_data,re_y_model,im_y_model\n";
    char buf[240];
    for (std::size_t i = 0; i < sp.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      sp.frequency[i], sp.value[i].real(), sp.value[i].imag(),
                      model.value[i].real(), model.value[i].imag());
        overlay += buf;
    }

    RunDir run(out_dir, "fit-bvd", argv_tail);
    run.input(input_path);
    run.write("fit_report.txt", smr::fit_report_text(report));
    run.write("overlay.csv", overlay);
    run.finish();
    std::cout << "wrote " << (run.dir / "fit_report.txt").string() << ", "
              << (run.dir / "overlay.csv").string() << "\n";
    return exit_ok;
}

int run_extract(const std::string& problem_path, const std::string& out_dir,
                const std::vector<std::string>& argv_tail) {
    const smr::InverseProblem problem = smr::parse_inverse_file(read_file(problem_path));
    const smr::ExtractResult result = smr::extract_parameters(problem);

    char buf[200];
    std::string estimate_text;
    for (std::size_t i = 0; i < result.estimate.size(); ++i) {
        const smr::Unknown& u = problem.unknowns[i];
        const char* kind = (u.kind == smr::UnknownKind::thickness) ? "thickness" : "velocity";
        std::snprintf(buf, sizeof(buf), "layer %zu %s = %.10g%s\n", u.layer_index, kind,
                      result.estimate[i],
                      (u.kind == smr::UnknownKind::thickness) ? " m" : " m/s");
        estimate_text += buf;
    }
    std::snprintf(buf, sizeof(buf), "residual = %.10g\n", result.residual);
    estimate_text += buf;
    std::snprintf(buf, sizeof(buf), "evaluations = %d\n", result.evaluations);
    estimate_text += buf;
    if (result.boundary_warning)
        estimate_text += "warning = estimate at a search bound\n";
    std::cout << estimate_text;

    std::cout << "mode  measured_GHz  modeled_GHz\n";
    for (const auto& d : result.table) {
        std::snprintf(buf, sizeof(buf), "%4d  %12.6g  %11.6g\n", d.mode_order,
                      d.measured / 1e9, d.modeled / 1e9);
        std::cout << buf;
    }

    RunDir run(out_dir, "extract", argv_tail);
    run.input(problem_path);
    run.write("estimate.txt", estimate_text);
    run.write("diagnostics.csv", smr::diagnostics_csv(result));
    run.finish();
    std::cout << "wrote " << (run.dir / "estimate.txt").string() << ", "
              << (run.dir / "diagnostics.csv").string() << "\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"smr - solidly mounted BAW resonator design and extraction toolkit"};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    std::vector<std::string> argv_tail;
    for (int i = 1; i < argc; ++i)
        argv_tail.push_back(argv[i]);

    // design-mirror
    auto* dm = app.add_subcommand("design-mirror",
                                  "Quarter-wave mirror synthesis and reflectance");
    std::string dm_materials, dm_low, dm_high, dm_f0, dm_substrate = "Si",
                dm_cavity = "Pt", dm_grid, dm_out = "smr-run";
    double dm_pairs = 0.0, dm_threshold = 0.9;
    dm->add_option("--materials", dm_materials, "Materials file (stack dialect)")
        ->required();
    dm->add_option("--low", dm_low, "Low-impedance material name")->required();
    dm->add_option("--high", dm_high, "High-impedance material name")->required();
    dm->add_option("--f0", dm_f0, "Center frequency, e.g. 50GHz")->required();
    dm->add_option("--pairs", dm_pairs, "Pair count, half steps (e.g. 8.5)")->required();
    dm->add_option("--substrate", dm_substrate, "Substrate material name");
    dm->add_option("--cavity", dm_cavity, "Cavity-side material name");
    dm->add_option("--grid", dm_grid, "Reflectance grid start:stop:points");
    dm->add_option("--gamma-threshold", dm_threshold, "|Gamma| stopband edge threshold");
    dm->add_option("--out", dm_out, "Run output directory");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Mason-model admittance of a stack file");
    std::string sim_stack, sim_grid = "1GHz:67GHz:2000", sim_out = "smr-run";
    double sim_prom = 3.0, sim_rs = 0.0, sim_ls = 0.0, sim_cfeed = 0.0;
    sim->add_option("--stack", sim_stack, "Stack-definition file")->required();
    sim->add_option("--grid", sim_grid, "Frequency grid start:stop:points");
    sim->add_option("--prominence-db", sim_prom, "Resonance detection floor, dB");
    sim->add_option("--rs", sim_rs, "Series parasitic resistance, Ohm");
    sim->add_option("--ls", sim_ls, "Series parasitic inductance, H");
    sim->add_option("--cfeed", sim_cfeed, "Parallel feedthrough capacitance, F");
    sim->add_option("--out", sim_out, "Run output directory");

    // analyze
    auto* an = app.add_subcommand("analyze",
                                  "Touchstone ingestion, resonances and Bode Q");
    std::string an_s2p, an_out = "smr-run";
    double an_z0 = 50.0, an_prom = 3.0;
    an->add_option("s2p", an_s2p, "Two-port Touchstone v1 file")->required();
    an->add_option("--z0", an_z0, "Bode-Q reference impedance, Ohm");
    an->add_option("--prominence-db", an_prom, "Resonance detection floor, dB");
    an->add_option("--out", an_out, "Run output directory");

    // fit-bvd
    auto* fit = app.add_subcommand("fit-bvd", "Multi-motional BVD fit");
    std::string fit_s2p, fit_csv, fit_weights = "logmag-phase", fit_out = "smr-run";
    std::size_t fit_branches = 0;
    fit->add_option("--s2p", fit_s2p, "Two-port Touchstone v1 input");
    fit->add_option("--csv", fit_csv, "Admittance CSV input (spectrum schema)");
    fit->add_option("--branches", fit_branches, "Number of motional branches")->required();
    fit->add_option("--weights", fit_weights, "Residual weighting: logmag-phase | uniform");
    fit->add_option("--out", fit_out, "Run output directory");

    // extract
    auto* ex = app.add_subcommand("extract", "Inverse layer-parameter extraction");
    std::string ex_problem, ex_out = "smr-run";
    ex->add_option("--problem", ex_problem, "Inverse problem file ([inverse] section)")
        ->required();
    ex->add_option("--out", ex_out, "Run output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input_error;
    }

    try {
        if (dm->parsed())
            return run_design_mirror(dm_materials, dm_low, dm_high, dm_f0, dm_pairs,
                                     dm_substrate, dm_cavity, dm_grid, dm_threshold,
                                     dm_out, argv_tail);
        if (sim->parsed())
            return run_simulate(sim_stack, sim_grid, sim_prom, sim_rs, sim_ls, sim_cfeed,
                                sim_out, argv_tail);
        if (an->parsed())
            return run_analyze(an_s2p, an_z0, an_prom, an_out, argv_tail);
        if (fit->parsed()) {
            if (fit_s2p.empty() == fit_csv.empty()) {
                std::cerr << "fit-bvd: give exactly one of --s2p or --csv\n";
                return exit_input_error;
            }
            if (fit_weights != "logmag-phase" && fit_weights != "uniform") {
                std::cerr << "fit-bvd: --weights must be logmag-phase or uniform\n";
                return exit_input_error;
            }
            return run_fit_bvd(fit_s2p, fit_csv, fit_branches, fit_weights, fit_out,
                               argv_tail);
        }
        if (ex->parsed())
            return run_extract(ex_problem, ex_out, argv_tail);
    } catch (const smr::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return exit_numeric_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_error;
    }
    return exit_input_error;
}
