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

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdtd_internal.hpp"
#include "roughslab/fdtd.hpp"

namespace roughslab {

double GridSpec::max_stable_dt() const {
    return courant / (kC0 * std::sqrt(1.0 / (dx * dx) + 1.0 / (dz * dz)));
}

void GridSpec::validate() const {
    if (!(dx > 0.0) || !(dz > 0.0)) throw InvalidArgument("grid: dx and dz must be > 0");
    if (nx < 3 || nz < 3) throw InvalidArgument("grid: nx and nz must be >= 3");
    if (!(courant > 0.0) || (courant >= 1.0 && !allow_unstable)) throw InvalidArgument("grid: courant must lie in (0, 1)");
    if (!(dt > 0.0)) throw InvalidArgument("grid: dt must be > 0");
    if (!allow_unstable && dt > max_stable_dt() * (1.0 + 1e-12) / courant)
        throw InvalidArgument("grid: dt exceeds the 2-D Courant limit");
    if (n_steps < 1) throw InvalidArgument("grid: n_steps must be >= 1");
    if (pml_cells < 0) throw InvalidArgument("grid: pml_cells must be >= 0");
}

void SlabScene::validate() const {
    if (!(frequency > 0.0) || !std::isfinite(frequency)) throw InvalidArgument("scene: frequency must be > 0");
    if (!(theta_i >= 0.0) || theta_i >= kPi / 2) throw InvalidArgument("scene: theta_i must lie in [0, 90) degrees");
    if (!(thickness > 0.0)) throw InvalidArgument("scene: thickness must be > 0");
    if (aperture_cells < 16) throw InvalidArgument("scene: aperture_cells must be >= 16");
    if (roughness_margin < 0.0) throw InvalidArgument("scene: roughness_margin must be >= 0");
    if (corr_length < 0.0) throw InvalidArgument("scene: corr_length must be >= 0");
    for (const Medium* m : {&cover, &slab, &substrate}) {
        if (m->eps_real() < 1.0 || m->conductivity < 0.0)
            throw InvalidArgument("scene: media need eps_real >= 1 and conductivity >= 0");
    }
    if (cover.conductivity != 0.0) throw InvalidArgument("scene: the cover medium must be lossless");
    if (2.0 * roughness_margin >= thickness)
        throw InvalidArgument("scene: roughness margin leaves the two interfaces overlapping");
    auto check = [&](const std::vector<double>& h, const char* which) {
        if (h.empty()) return;
        if (static_cast<int>(h.size()) != aperture_cells)
            throw InvalidArgument(std::string("scene: ") + which + " profile length must equal aperture_cells");
        for (double v : h) {
            if (!std::isfinite(v)) throw InvalidArgument(std::string("scene: ") + which + " profile is not finite");
            if (std::abs(v) > roughness_margin * (1.0 + 1e-9) + 1e-15)
                throw InvalidArgument(std::string("scene: ") + which + " profile exceeds roughness_margin");
        }
    };
    check(upper_heights, "upper");
    check(lower_heights, "lower");
}

double clamped_linear_integral(double h0, double h1, double a, double b, double w) {
    auto clamp = [&](double h) { return std::min(std::max(h, a), b); };
    // G(h) = integral of clamp(u) du from a to h.
    auto G = [&](double h) {
        if (h < a) return a * (h - a);
        if (h <= b) return 0.5 * (h * h - a * a);
        return 0.5 * (b * b - a * a) + b * (h - b);
    };
    const double dh = h1 - h0;
    if (std::abs(dh) <= 1e-12 * std::max({std::abs(h0), std::abs(h1), b - a})) return clamp(0.5 * (h0 + h1)) * w;
    return w * (G(h1) - G(h0)) / dh;
}

Complex effective_permittivity(const InterfaceCell& cell, Complex eps1, Complex eps2) {
    if (!(cell.dx > 0.0) || !(cell.dz > 0.0)) throw InvalidArgument("effective_permittivity: cell size must be > 0");
    if (cell.dx_part < 0.0 || cell.dz_part < 0.0 || cell.dx_part > cell.dx || cell.dz_part > cell.dz)
        throw InvalidArgument("effective_permittivity: partial extents must lie within the cell");
    const double frac = cell.dx_part * cell.dz_part / (cell.dx * cell.dz);
    return eps1 * (1.0 - frac) + eps2 * frac;
}

namespace detail {

double transit_time(double eps_real, double sin_theta, double depth) {
    const double kz = std::sqrt(std::max(eps_real - sin_theta * sin_theta, 1e-6));
    return depth * eps_real / (kC0 * kz);
}

int slab_bounces(const SlabScene& scene) {
    const double s = std::sin(scene.theta_i);
    const double k0 = 2.0 * kPi * scene.frequency / kC0;
    auto kz = [&](const Medium& m) {
        Complex r = std::sqrt(m.eps_r - s * s);
        if (r.imag() > 0.0) r = -r;
        return r;
    };
    const Complex k1 = kz(scene.cover), k2 = kz(scene.slab), k3 = kz(scene.substrate);
    const Complex r21 = (k2 - k1) / (k2 + k1);
    const Complex r23 = (k2 - k3) / (k2 + k3);
    const double atten = std::exp(2.0 * k0 * k2.imag() * scene.thickness);
    const double rt = std::abs(r21 * r23) * atten;
    if (!(rt > 0.0)) return 1;
    if (rt >= 1.0) return 10;
    const int n = static_cast<int>(std::ceil(std::log(1e-3) / std::log(rt)));
    return std::clamp(n, 1, 10);
}

CellMedium cell_medium(const Medium& cover, const Medium& slab, const Medium& substrate, double za,
                       double zb, const double (&zu)[3], const double (&zl)[3], double width) {
    const double w = 0.5 * width;
    const double total = width * (zb - za);
    auto above = [&](const double (&z)[3]) {
        const double area = clamped_linear_integral(z[0], z[1], za, zb, w) +
                            clamped_linear_integral(z[1], z[2], za, zb, w) - 2.0 * za * w;
        return std::clamp(area / total, 0.0, 1.0);
    };
    const double f_cover = above(zu);
    const double f_above_lower = std::max(above(zl), f_cover);
    const double f_slab = f_above_lower - f_cover;
    const double f_sub = 1.0 - f_above_lower;
    return {f_cover * cover.eps_real() + f_slab * slab.eps_real() + f_sub * substrate.eps_real(),
            f_cover * cover.conductivity + f_slab * slab.conductivity + f_sub * substrate.conductivity};
}

CellMedium flat_row_medium(const Medium& cover, const Medium& slab, const Medium& substrate,
                           const GridLayout& layout, int k) {
    const double dz = layout.grid.dz;
    const double zu[3] = {layout.z_upper, layout.z_upper, layout.z_upper};
    const double zl[3] = {layout.z_lower, layout.z_lower, layout.z_lower};
    return cell_medium(cover, slab, substrate, (k - 0.5) * dz, (k + 0.5) * dz, zu, zl, layout.grid.dx);
}

}  // namespace detail

GridLayout plan_layout(const SlabScene& scene, const SimulationOptions& options) {
    scene.validate();
    if (!(options.cells_per_wavelength >= 10.0))
        throw InvalidArgument("options: cells_per_wavelength must be >= 10");
    if (options.pml_cells < 4) throw InvalidArgument("options: pml_cells must be >= 4");
    if (options.pml_gap < 2) throw InvalidArgument("options: pml_gap must be >= 2");
    if (options.dft_periods < 1) throw InvalidArgument("options: dft_periods must be >= 1");
    if (options.interp_order != 1 && options.interp_order != 3)
        throw InvalidArgument("options: interp_order must be 1 or 3");

    GridLayout L;
    const double lambda = scene.wavelength();
    GridSpec& g = L.grid;
    g.dx = lambda / options.cells_per_wavelength;
    g.dz = g.dx;
    g.courant = options.courant;
    g.allow_unstable = options.allow_unstable;
    g.pml_cells = options.pml_cells;
    const double dt_max = g.max_stable_dt();
    L.steps_per_period = static_cast<int>(std::ceil(1.0 / (scene.frequency * dt_max)));
    g.dt = 1.0 / (scene.frequency * L.steps_per_period);

    const int pml = options.pml_cells;
    const int gap = options.pml_gap;
    const int margin_cells = static_cast<int>(std::ceil(scene.roughness_margin / g.dz));

    L.reflect_row = pml + gap;
    L.box_top = L.reflect_row + 2;
    const int k1 = L.box_top + margin_cells + 3;
    L.z_upper = (k1 - 0.5) * g.dz;
    L.z_lower = L.z_upper + scene.thickness;
    L.transmit_row = static_cast<int>(std::ceil((L.z_lower + scene.roughness_margin) / g.dz + 0.5)) + 3;
    L.box_bottom = L.transmit_row + 2;
    g.nz = L.box_bottom + gap + pml + 2;

    L.box_left = pml + gap;
    L.profile_first = L.box_left + 1;
    L.box_right = L.profile_first + scene.aperture_cells;
    g.nx = L.box_right + gap + pml + 2;

    double inset = options.probe_inset;
    if (inset < 0.0) inset = 2.0 * scene.corr_length;
    const int inset_cells = static_cast<int>(std::ceil(inset / g.dx - 1e-9));
    L.probe_first = L.profile_first + inset_cells;
    L.probe_last = L.profile_first + scene.aperture_cells - 1 - inset_cells;
    if (L.probe_last - L.probe_first < 8)
        throw InvalidArgument("options: probe inset leaves fewer than 8 probe samples");

    const double s = std::sin(scene.theta_i);
    const double f = scene.frequency;
    const int bounces = detail::slab_bounces(scene);
    const double width = g.nx * g.dx;
    double t = options.ramp_periods / f + width * s / kC0;
    const double t_cover = detail::transit_time(scene.cover.eps_real(), s, L.z_upper);
    const double t_slab = detail::transit_time(scene.slab.eps_real(), s, scene.thickness);
    const double t_sub = detail::transit_time(scene.substrate.eps_real(), s, g.nz * g.dz - L.z_lower);
    t += 2.0 * t_cover + t_slab * (1 + 2 * bounces) + t_sub;
    t += (options.settle_periods + options.dft_periods) / f;
    g.n_steps = static_cast<long>(std::ceil(t / g.dt)) + options.extra_steps;
    // whole number of periods so the window phase is the same for every run
    g.n_steps = ((g.n_steps + L.steps_per_period - 1) / L.steps_per_period) * L.steps_per_period;
    L.dft_start = g.n_steps - static_cast<long>(options.dft_periods) * L.steps_per_period;
    g.validate();
    return L;
}

}  // namespace roughslab
