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

#include "validate.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include <boost/math/special_functions/hankel.hpp>

#include "roughslab/ensemble.hpp"
#include "roughslab/fdtd.hpp"
#include "roughslab/ntff.hpp"
#include "roughslab/sbr.hpp"
#include "roughslab/surface.hpp"

namespace roughslab::cli {

namespace {

double db20(double a, double b) { return 20.0 * std::log10(a / b); }

struct Report {
    std::ostream& os;
    bool all = true;

    void line(bool ok, const std::string& name, double measured, const std::string& limit) {
        all = all && ok;
        os << (ok ? "PASS " : "FAIL ") << std::left << std::setw(22) << name << " measured " << std::setprecision(4)
           << measured << "  limit " << limit << '\n';
    }
};

void flat_slab(const ValidateOptions& o, Report& rep) {
    SlabScene s;
    s.theta_i = deg2rad(30.0);
    s.slab = medium_at(MaterialLibrary::builtin().get("plasterboard"), 28.0);
    SimulationOptions opts;
    opts.cells_per_wavelength = o.cells_per_wavelength;
    const auto co = extract_coefficients(simulate_slab(s, opts));
    const auto ref = slab_coefficients(s.slab, s.thickness, s.theta_i, s.frequency);
    const double dr = db20(std::abs(co.reflection.values[nearest_index(co.reflection, 150.0)]), std::abs(ref.reflection));
    const double dt =
        db20(std::abs(co.transmission.values[nearest_index(co.transmission, 30.0)]), std::abs(ref.transmission));
    const double worst = std::max(std::abs(dr), std::abs(dt));
    rep.line(worst <= o.flat_tol_db, "flat_slab_30deg", worst, "dB " + std::to_string(o.flat_tol_db));
}

void ntff_line_source(const ValidateOptions& o, Report& rep) {
    const double f = 28e9, k = 2.0 * kPi * f / kC0, lam = kC0 / f, h = 3.0 * lam;
    const double w = 2.0 * kPi * f;
    ProbeLine line;
    const double dx = lam / 40.0;
    const int n = static_cast<int>(400.0 * lam / dx);
    for (int i = 0; i < n; ++i) {
        const double x = (i - n / 2) * dx, r = std::hypot(x, h);
        const Complex e = boost::math::cyl_hankel_2(0, k * r);
        const Complex de = -k * boost::math::cyl_hankel_2(1, k * r);
        line.x.push_back(x);
        line.ey.push_back(e);
        line.hx.push_back(de * (h / r) / Complex(0.0, w * kMu0));
        line.hz.push_back(-de * (x / r) / Complex(0.0, w * kMu0));
    }
    std::vector<double> angles;
    for (int a = -60; a <= 60; a += 5) angles.push_back(a);
    const auto ff = far_field(line, ProbeSide::Lower, f, angles);
    const double exact = std::sqrt(2.0 / (kPi * k));
    double worst = 0.0;
    for (const auto& v : ff) worst = std::max(worst, std::abs(db20(std::abs(v), exact)));
    rep.line(worst <= o.ntff_tol_db, "ntff_line_source", worst, "dB " + std::to_string(o.ntff_tol_db));
}

void friis(const ValidateOptions& o, Report& rep) {
    RayScene s;
    s.tx.position = {0.0, 0.0, 1.5};
    s.grid = {-10.0, 10.0, -10.0, 10.0, 0.5, 1.5};
    TraceOptions opts;
    opts.subdivision = 5;
    opts.launch_cull = 0.0;
    const auto g = rss_map(s, opts);
    const auto pts = s.grid.points();
    const double lam = s.wavelength();
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec3 d = pts[i] - s.tx.position;
        const double gt = antenna_gain(std::acos(d.normalized().dot(s.tx.boresight.normalized())), s.tx.exponent);
        if (!(gt > 0.0)) continue;
        const double pr = 0.1 * gt * 1.64 * std::pow(lam / (4.0 * kPi * d.norm()), 2);
        const double err = std::isfinite(g.rss_dbm[i]) ? std::abs(g.rss_dbm[i] - 10.0 * std::log10(pr * 1e3)) : 1e9;
        worst = std::max(worst, err);
    }
    rep.line(worst <= o.friis_tol_db, "friis_los", worst, "dB " + std::to_string(o.friis_tol_db));
}

void passivity(const ValidateOptions& o, Report& rep) {
    EnsembleSpec e;
    e.scene.theta_i = deg2rad(30.0);
    e.scene.slab = medium_from(2.94, 0.0, 28e9);
    e.options.cells_per_wavelength = o.cells_per_wavelength;
    e.n_realizations = 1;
    e.sigma_h_upper = e.sigma_h_lower = 0.002;
    e.corr_length = 0.5 * wavelength(28e9);
    const auto r = run_ensemble(e);
    rep.line(r.power_ratio[0] <= o.passivity_limit, "passivity_lossless", r.power_ratio[0],
             "ratio " + std::to_string(o.passivity_limit));
}

void sidelobe(const ValidateOptions& o, Report& rep) {
    const double lam = wavelength(28e9), k = 2.0 * kPi / lam;
    SlabScene s;
    s.slab = s.substrate = medium_from(4.0, kEps0 * 2.0 * kPi * 28e9, 28e9);
    s.thickness = 0.05;
    SimulationOptions opts;
    opts.cells_per_wavelength = o.cells_per_wavelength;
    const double dx = lam / opts.cells_per_wavelength;
    s.aperture_cells = static_cast<int>(std::round(20.0 * lam / dx));
    SurfaceSpec sp;
    sp.n_points = s.aperture_cells;
    sp.spacing = dx;
    sp.rms_height = 0.1 / k;
    sp.corr_length = lam;
    sp.kind = SpectrumKind::Exponential;
    sp.seed = 7;
    s.corr_length = lam;
    s.upper_heights = generate_surface(sp).heights;
    s.roughness_margin = 6.0 * sp.rms_height;
    const auto rcs = bistatic_rcs(simulate_slab(s, opts), Taper::Blackman);
    const std::size_t ip = nearest_index(rcs, 180.0);
    const double peak = rcs.values[ip].real();
    double side = -1e300;
    for (std::size_t i = 0; i < rcs.size(); ++i)
        if (std::abs(rcs.angles[i] - 180.0) > 15.0) side = std::max(side, rcs.values[i].real());
    const double below = 10.0 * std::log10(peak / side);
    rep.line(below >= o.sidelobe_db, "rcs_sidelobe_level", below, "dB >= " + std::to_string(o.sidelobe_db));
}

}  // namespace

bool run_validation(const ValidateOptions& o, std::ostream& os) {
    Report rep{os};
    ntff_line_source(o, rep);
    friis(o, rep);
    if (!o.quick) {
        flat_slab(o, rep);
        passivity(o, rep);
        sidelobe(o, rep);
    }
    return rep.all;
}

}  // namespace roughslab::cli
