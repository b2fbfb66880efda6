// Copyright 2026 The roughslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <omp.h>

#include "roughslab/ensemble.hpp"
#include "roughslab/fdtd.hpp"
#include "roughslab/io.hpp"
#include "roughslab/ntff.hpp"
#include "roughslab/sbr.hpp"
#include "roughslab/scatmodel.hpp"
#include "roughslab/surface.hpp"
#include "run_config.hpp"
#include "validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace roughslab;
using cli::ConfigReader;
using cli::SchemaError;

namespace {

struct Common {
    std::string config;
    int jobs = 1;
};

json read_or_empty(const std::string& path) { return path.empty() ? json::object() : cli::load_config(path); }

MaterialLibrary materials_from(ConfigReader& r) {
    const std::string path = r.text("materials", "");
    if (path.empty()) return MaterialLibrary::builtin();
    std::ifstream is(path);
    if (!is) throw SchemaError(r.field("materials") + ": cannot read " + path);
    return MaterialLibrary::load(is);
}

// A medium is a material name or { "eps_real": .., "conductivity": .. }.
Medium read_medium(const json& cfg, ConfigReader& r, const std::string& key, const std::string& fallback,
                   const MaterialLibrary& lib, double f_hz) {
    if (!r.has(key)) return medium_at(lib.get(fallback), f_hz / 1e9);
    if (cfg.at(key).is_string()) {
        const std::string name = r.text(key);
        if (!lib.contains(name)) throw SchemaError(r.field(key) + ": unknown material '" + name + "'");
        return medium_at(lib.get(name), f_hz / 1e9);
    }
    ConfigReader m = r.child(key);
    const double eps = m.positive("eps_real", 1.0);
    const double sigma = m.number("conductivity", 0.0);
    m.finish();
    return medium_from(eps, sigma, f_hz);
}

Provenance provenance_of(const json& effective, std::uint64_t seed) { return {cli::config_digest(effective), seed}; }

int cmd_gen_surface(const Common& c, const std::string& out_flag, std::optional<std::uint64_t> seed_flag) {
    json cfg = read_or_empty(c.config);
    if (!out_flag.empty()) cfg["output"] = out_flag;
    if (seed_flag) cfg["seed"] = *seed_flag;
    ConfigReader r(cfg, "");
    SurfaceSpec spec;
    spec.n_points = static_cast<int>(r.integer("n_points", 700));
    spec.spacing = r.number("spacing_m", wavelength(28e9) / 35.0);
    spec.rms_height = r.number("rms_height_m", 0.0);
    spec.corr_length = r.number("corr_length_m", 0.5 * wavelength(28e9));
    spec.kind = spectrum_kind_from_string(r.text("spectrum", "gaussian"));
    spec.seed = r.seed("seed", 1);
    const std::string out = r.text("output");
    r.finish();
    if (spec.rms_height < 0.0) throw SchemaError("rms_height_m: must be >= 0");
    if (spec.corr_length <= 0.0) throw SchemaError("corr_length_m: must be > 0");
    if (spec.spacing <= 0.0) throw SchemaError("spacing_m: must be > 0");
    try {
        spec.validate();
    } catch (const InvalidArgument& e) {
        throw SchemaError(e.what());
    }
    const auto prof = generate_surface(spec);
    const auto prov = provenance_of(cfg, spec.seed);
    write_atomic(out, [&](std::ostream& os) {
        os << provenance_line(prov) << '\n';
        write_profile(os, prof);
    });
    return 0;
}

int cmd_fdtd(const Common& c, std::optional<int> ensemble_flag, const std::string& prefix_flag) {
    json cfg = read_or_empty(c.config);
    if (ensemble_flag) cfg["ensemble"]["n"] = *ensemble_flag;
    if (!prefix_flag.empty()) cfg["output"]["prefix"] = prefix_flag;
    ConfigReader r(cfg, "");
    const MaterialLibrary lib = materials_from(r);
    SlabScene scene;
    scene.frequency = r.positive("frequency_ghz", 28.0) * 1e9;
    const double theta = r.non_negative("theta_i_deg", 30.0);
    if (theta >= 90.0) throw SchemaError("theta_i_deg: must be < 90");
    scene.theta_i = deg2rad(theta);
    scene.cover = read_medium(cfg, r, "cover", "vacuum", lib, scene.frequency);
    scene.slab = read_medium(cfg, r, "slab", "plasterboard", lib, scene.frequency);
    scene.substrate = read_medium(cfg, r, "substrate", "vacuum", lib, scene.frequency);
    const std::string label = cfg.contains("slab") && cfg["slab"].is_string() ? cfg["slab"].get<std::string>() : "custom";
    scene.thickness = r.positive("thickness_m", 0.1);
    scene.aperture_cells = static_cast<int>(r.integer("aperture_cells", 700));

    ConfigReader rough = r.child("roughness");
    const double sh_u = rough.non_negative("upper_sigma_h_m", 0.0);
    const double sh_l = rough.non_negative("lower_sigma_h_m", 0.0);
    const double lc = rough.positive("corr_length_m", 0.5 * wavelength(scene.frequency));
    const SpectrumKind spectrum = spectrum_kind_from_string(rough.text("spectrum", "gaussian"));
    rough.finish();

    ConfigReader ens = r.child("ensemble");
    const long n = ens.integer("n", 1);
    if (n < 1) throw SchemaError("ensemble.n: must be >= 1");
    const Sampling sampling = sampling_from_string(ens.text("sampling", "lhs"));
    ens.finish();
    const std::uint64_t seed = r.seed("seed", 1);

    SimulationOptions opts;
    ConfigReader sim = r.child("simulation");
    opts.cells_per_wavelength = sim.positive("cells_per_wavelength", opts.cells_per_wavelength);
    opts.courant = sim.positive("courant", opts.courant);
    opts.allow_unstable = sim.flag("allow_unstable", false);
    opts.pml_cells = static_cast<int>(sim.integer("pml_cells", opts.pml_cells));
    opts.dft_periods = static_cast<int>(sim.integer("dft_periods", opts.dft_periods));
    opts.interp_order = static_cast<int>(sim.integer("interp_order", opts.interp_order));
    opts.extra_steps = static_cast<int>(sim.integer("extra_steps", opts.extra_steps));
    sim.finish();
    if (opts.interp_order != 1 && opts.interp_order != 3) throw SchemaError("simulation.interp_order: must be 1 or 3");

    ConfigReader out = r.child("output");
    const std::string prefix = out.text("prefix", "fdtd");
    const bool want_rcs = out.flag("rcs", false);
    out.finish();
    r.finish();

    const auto prov = provenance_of(cfg, seed);
    auto write_pat = [&](const std::string& path, const AngularPattern& p, std::optional<double> se) {
        write_atomic(path, [&](std::ostream& os) {
            os << provenance_line(prov) << '\n';
            if (se) write_ensemble_pattern(os, p, *se);
            else write_pattern(os, p);
        });
    };

    if (n == 1 && sh_u == 0.0 && sh_l == 0.0) {
        scene.corr_length = lc;
        SlabSimulator sim_run(scene, opts);
        const ProbeRecord rec = sim_run.run();
        auto co = extract_coefficients(rec);
        co.reflection.material = co.transmission.material = label;
        write_pat(prefix + "_r.pat", co.reflection, std::nullopt);
        write_pat(prefix + "_t.pat", co.transmission, std::nullopt);
        if (want_rcs) {
            auto rcs = bistatic_rcs(rec, Taper::Blackman);
            rcs.material = label;
            write_pat(prefix + "_rcs.pat", rcs, std::nullopt);
        }
        return 0;
    }

    EnsembleSpec spec;
    spec.scene = scene;
    spec.options = opts;
    spec.material = label;
    spec.n_realizations = static_cast<int>(n);
    spec.master_seed = seed;
    spec.sigma_h_upper = sh_u;
    spec.sigma_h_lower = sh_l;
    spec.corr_length = lc;
    spec.spectrum = spectrum;
    spec.sampling = sampling;
    spec.jobs = c.jobs;
    spec.validate();
    auto res = run_ensemble(spec, [](int done, int total) { std::fprintf(stderr, "\rrealizations %d/%d", done, total); });
    std::fprintf(stderr, "\n");
    const double se = rms_error_infnorm(res);
    write_pat(prefix + "_r.pat", res.mean_r, se);
    write_pat(prefix + "_t.pat", res.mean_t, se);
    write_atomic(prefix + "_manifest.txt", [&](std::ostream& os) {
        os << provenance_line(prov) << '\n';
        write_manifest(os, spec, res);
    });
    std::printf("n %d stderr_db_max %.4f\n", res.n_realizations, se);
    return 0;
}

int cmd_fit(const Common& c, const std::string& in_flag, const std::string& out_flag) {
    json cfg = read_or_empty(c.config);
    if (!in_flag.empty()) cfg["input"] = in_flag;
    if (!out_flag.empty()) cfg["output"] = out_flag;
    ConfigReader r(cfg, "");
    const std::string in = r.text("input");
    const std::string out = r.text("output");
    SelectionOptions so;
    so.tie_tolerance = r.non_negative("tie_tolerance", so.tie_tolerance);
    so.fit.a_min = r.positive("a_min", so.fit.a_min);
    so.fit.a_max = r.positive("a_max", so.fit.a_max);
    so.fit.specular_window = r.positive("specular_window_deg", so.fit.specular_window);
    r.finish();
    if (so.fit.a_max <= so.fit.a_min) throw SchemaError("a_max: must exceed a_min");

    std::ifstream is(in);
    if (!is) throw SchemaError("input: cannot read " + in);
    const AngularPattern p = read_pattern(is);
    const Selection sel = select_model(p, so);
    for (const auto& m : sel.candidates)
        std::printf("%-3s mse %.6g%s\n", to_string(m.family).c_str(), m.mse, m.family == sel.chosen.family ? "  *" : "");
    write_atomic(out, [&](std::ostream& os) {
        os << provenance_line(provenance_of(cfg, 0)) << '\n';
        write_model(os, sel.chosen);
    });
    return 0;
}

int cmd_raytrace(const Common& c, const std::string& scene_flag, const std::string& mode_flag,
                 const std::string& out_flag) {
    json cfg = read_or_empty(c.config);
    if (!scene_flag.empty()) cfg["scene"] = scene_flag;
    if (!mode_flag.empty()) cfg["mode"] = mode_flag;
    if (!out_flag.empty()) cfg["output"] = out_flag;
    ConfigReader r(cfg, "");
    const MaterialLibrary lib = materials_from(r);
    const std::string scene_path = r.text("scene");
    const std::string out = r.text("output");
    TraceOptions opts;
    try {
        opts.mode = trace_mode_from_string(r.text("mode", "flat"));
    } catch (const InvalidArgument& e) {
        throw SchemaError(std::string("mode: ") + e.what());
    }
    opts.subdivision = static_cast<int>(r.integer("subdivision", opts.subdivision));
    opts.fan_step_deg = r.positive("fan_step_deg", opts.fan_step_deg);
    opts.launch_cull = r.non_negative("launch_cull", opts.launch_cull);
    opts.child_cull = r.non_negative("child_cull", opts.child_cull);
    opts.specular_fwhm_deg = r.non_negative("specular_fwhm_deg", opts.specular_fwhm_deg);
    r.finish();
    if (opts.subdivision < 0 || opts.subdivision > 9) throw SchemaError("subdivision: must lie in [0, 9]");
    opts.jobs = c.jobs;

    const RayScene scene = load_scene(scene_path, lib);
    const RssGrid g = rss_map(scene, opts);
    write_atomic(out, [&](std::ostream& os) {
        os << provenance_line(provenance_of(cfg, 0)) << '\n';
        write_rss(os, g);
    });
    std::printf("tubes %ld segments %ld children %ld dropped %ld\n", g.stats.tubes_launched, g.stats.segments,
                g.stats.children, g.stats.dropped_degenerate);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"roughslab: rough-slab FDTD, scattering-model fitting and indoor ray tracing"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config, "JSON run configuration");
    app.add_option("--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber);

    auto* gen = app.add_subcommand("gen-surface", "draw one rough profile");
    std::string gen_out;
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("-o,--output", gen_out);
    gen->add_option("--seed", gen_seed);

    auto* fdtd = app.add_subcommand("fdtd", "flat or ensemble slab run, writes R and T patterns");
    std::optional<int> ens_n;
    std::string fdtd_prefix;
    fdtd->add_option("--ensemble", ens_n, "realization count")->check(CLI::PositiveNumber);
    fdtd->add_option("-o,--prefix", fdtd_prefix, "output prefix");

    auto* fit = app.add_subcommand("fit", "fit and select a scattering model");
    std::string fit_in, fit_out;
    fit->add_option("input", fit_in, "pattern file");
    fit->add_option("-o,--output", fit_out);

    auto* ray = app.add_subcommand("raytrace", "RSS map of a scene");
    std::string ray_scene, ray_mode, ray_out;
    ray->add_option("scene", ray_scene, "scene file");
    ray->add_option("--mode", ray_mode, "flat | attenuation_only | with_diffuse");
    ray->add_option("-o,--output", ray_out);

    auto* val = app.add_subcommand("validate", "built-in oracle suite");
    cli::ValidateOptions vo;
    val->add_option("--cells-per-wavelength", vo.cells_per_wavelength);
    val->add_option("--flat-tol-db", vo.flat_tol_db);
    val->add_option("--ntff-tol-db", vo.ntff_tol_db);
    val->add_option("--friis-tol-db", vo.friis_tol_db);
    val->add_option("--sidelobe-db", vo.sidelobe_db);
    val->add_flag("--quick", vo.quick, "skip the FDTD checks");

    CLI11_PARSE(app, argc, argv);
    // Sole OpenMP knob: every parallel region runs at most --jobs threads.
    omp_set_num_threads(common.jobs);

    try {
        if (*gen) return cmd_gen_surface(common, gen_out, gen_seed);
        if (*fdtd) return cmd_fdtd(common, ens_n, fdtd_prefix);
        if (*fit) return cmd_fit(common, fit_in, fit_out);
        if (*ray) return cmd_raytrace(common, ray_scene, ray_mode, ray_out);
        if (*val) {
            if (!common.config.empty()) {
                json cfg = cli::load_config(common.config);
                ConfigReader r(cfg, "");
                vo.cells_per_wavelength = r.positive("cells_per_wavelength", vo.cells_per_wavelength);
                vo.flat_tol_db = r.positive("flat_tol_db", vo.flat_tol_db);
                vo.ntff_tol_db = r.positive("ntff_tol_db", vo.ntff_tol_db);
                vo.friis_tol_db = r.positive("friis_tol_db", vo.friis_tol_db);
                vo.sidelobe_db = r.positive("sidelobe_db", vo.sidelobe_db);
                vo.quick = r.flag("quick", vo.quick);
                r.finish();
            }
            return cli::run_validation(vo, std::cout) ? 0 : 1;
        }
    } catch (const SchemaError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const StabilityError& e) {
        std::cerr << "unstable: " << e.what() << " at step " << e.step() << '\n';
        return 3;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
