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

#include "roughslab/fdtd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "fdtd_internal.hpp"
#include "roughslab/fdtd_kernels.hpp"

namespace roughslab {

namespace {

double height_at(std::span<const double> h, int column, int first) {
    const int j = column - first;
    if (h.empty() || j < 0 || j >= static_cast<int>(h.size())) return 0.0;
    return h[static_cast<std::size_t>(j)];
}

void assign_materials(kernels::YeeGrid& grid, const GridLayout& L, const Medium& cover,
                      const Medium& slab, const Medium& substrate, std::span<const double> upper,
                      std::span<const double> lower, double margin) {
    const double dx = L.grid.dx;
    const double dz = L.grid.dz;
    // Interface depths at node columns and half columns.
    std::vector<double> zu(static_cast<std::size_t>(grid.nx)), zl(static_cast<std::size_t>(grid.nx));
    for (int i = 0; i < grid.nx; ++i) {
        zu[static_cast<std::size_t>(i)] = L.z_upper - height_at(upper, i, L.profile_first);
        zl[static_cast<std::size_t>(i)] = L.z_lower - height_at(lower, i, L.profile_first);
    }
    auto z3 = [&](const std::vector<double>& z, int i, double (&out)[3]) {
        const double zc = z[static_cast<std::size_t>(i)];
        const double zm = i > 0 ? z[static_cast<std::size_t>(i - 1)] : zc;
        const double zp = i + 1 < grid.nx ? z[static_cast<std::size_t>(i + 1)] : zc;
        out[0] = 0.5 * (zm + zc);
        out[1] = zc;
        out[2] = 0.5 * (zc + zp);
    };
    const double band = margin + dz;
    for (int k = 0; k < grid.nz; ++k) {
        const double za = (k - 0.5) * dz;
        const double zb = (k + 0.5) * dz;
        const detail::CellMedium flat = detail::flat_row_medium(cover, slab, substrate, L, k);
        const bool rough_row = (zb > L.z_upper - band && za < L.z_upper + band) ||
                               (zb > L.z_lower - band && za < L.z_lower + band);
        for (int i = 0; i < grid.nx; ++i) {
            detail::CellMedium c = flat;
            if (rough_row) {
                double u[3], l[3];
                z3(zu, i, u);
                z3(zl, i, l);
                c = detail::cell_medium(cover, slab, substrate, za, zb, u, l, dx);
            }
            grid.set_material(i, k, c.eps, c.sigma);
        }
    }
}

void write_snapshot(const std::filesystem::path& dir, const kernels::YeeGrid& g, long step) {
    std::filesystem::create_directories(dir);
    char name[64];
    std::snprintf(name, sizeof name, "ey_%08ld", step);
    const auto bin = dir / (std::string(name) + ".bin");
    const auto tmp = dir / (std::string(name) + ".bin.tmp");
    {
        std::ofstream os(tmp, std::ios::binary);
        os << "# ey " << g.nx << ' ' << g.nz << ' ' << g.dx << ' ' << g.dz << ' ' << step << '\n';
        std::vector<float> f(g.ey.begin(), g.ey.end());
        os.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(float)));
    }
    std::filesystem::rename(tmp, bin);
}

}  // namespace

SlabSimulator::SlabSimulator(SlabScene scene, SimulationOptions options)
    : scene_(std::move(scene)), options_(std::move(options)) {
    layout_ = plan_layout(scene_, options_);
    aux_ = run_aux_grid(scene_, layout_, options_);
    SlabScene vac = scene_;
    vac.slab = scene_.cover;
    vac.substrate = scene_.cover;
    aux_vacuum_ = run_aux_grid(vac, layout_, options_, aux_.substeps);
    // Unit incident amplitude on the top TF row.
    const double amp = std::abs(aux_phasor(aux_vacuum_, layout_, layout_.box_top));
    if (!(amp > 0.0)) throw StabilityError("aux grid produced no incident field", 0);
    aux_.scale(1.0 / amp);
    aux_vacuum_.scale(1.0 / amp);
}

SlabSimulator::RawProbes SlabSimulator::run_grid(const Medium& cover, const Medium& slab,
                                                 const Medium& substrate,
                                                 std::span<const double> upper_heights,
                                                 std::span<const double> lower_heights,
                                                 const AuxGridRecord& aux, bool snapshots) const {
    const GridLayout& L = layout_;
    const GridSpec& gs = L.grid;
    kernels::YeeGrid grid(gs.nx, gs.nz, gs.dx, gs.dz, gs.dt, gs.pml_cells, options_.pml_order);
    assign_materials(grid, L, cover, slab, substrate, upper_heights, lower_heights, scene_.roughness_margin);

    const int iL = L.box_left, iR = L.box_right, kT = L.box_top, kB = L.box_bottom;
    const int nbx = iR - iL + 3;  // columns iL-1 .. iR+1
    const int nbz = kB - kT + 3;  // rows kT-1 .. kB+1
    const int order = options_.interp_order;
    auto xof = [&](int i) { return (i - iL) * gs.dx; };

    // Incident E on the four boundary strips, indexed from iL-1 / kT-1.
    std::vector<double> e_top0(nbx), e_top1(nbx), e_bot0(nbx), e_bot1(nbx);
    std::vector<double> e_left0(nbz), e_left1(nbz), e_right0(nbz), e_right1(nbz);
    std::vector<double> hx_top(nbx, 0.0), hx_bot(nbx, 0.0), hz_left(nbz, 0.0), hz_right(nbz, 0.0);

    const double chx = gs.dt / (kMu0 * gs.dz);
    const double chz = gs.dt / (kMu0 * gs.dx);
    const double omega = 2.0 * kPi * scene_.frequency;
    const long nd = gs.n_steps - L.dft_start;
    const int np = L.probe_last - L.probe_first + 1;

    RawProbes out;
    for (ProbeLine* p : {&out.upper, &out.lower}) {
        p->x.resize(static_cast<std::size_t>(np));
        for (int c = 0; c < np; ++c) p->x[static_cast<std::size_t>(c)] = xof(L.probe_first + c);
        p->ey.assign(static_cast<std::size_t>(np), Complex{});
        p->hx.assign(static_cast<std::size_t>(np), Complex{});
        p->hz.assign(static_cast<std::size_t>(np), Complex{});
    }
    out.upper.z = L.z_upper - L.reflect_row * gs.dz;
    out.lower.z = L.z_upper - L.transmit_row * gs.dz;

    auto accumulate = [&](ProbeLine& p, int row, Complex we, Complex wh) {
        for (int c = 0; c < np; ++c) {
            const int i = L.probe_first + c;
            const std::size_t idx = grid.at(i, row);
            p.ey[static_cast<std::size_t>(c)] += grid.ey[idx] * we;
            p.hx[static_cast<std::size_t>(c)] += 0.5 * (grid.hx[idx] + grid.hx[grid.at(i, row - 1)]) * wh;
            p.hz[static_cast<std::size_t>(c)] += 0.5 * (grid.hz[idx] + grid.hz[grid.at(i - 1, row)]) * wh;
        }
    };

    for (long n = 0; n < gs.n_steps; ++n) {
        const double step = static_cast<double>(n);
        for (int c = 0; c < nbx; ++c) {
            const double x = xof(iL - 1 + c);
            e_top0[c] = tfsf_correction(aux, x, kT - 1, step, order);
            e_top1[c] = tfsf_correction(aux, x, kT, step, order);
            e_bot0[c] = tfsf_correction(aux, x, kB, step, order);
            e_bot1[c] = tfsf_correction(aux, x, kB + 1, step, order);
        }
        for (int r = 0; r < nbz; ++r) {
            const int k = kT - 1 + r;
            e_left0[r] = tfsf_correction(aux, xof(iL - 1), k, step, order);
            e_left1[r] = tfsf_correction(aux, xof(iL), k, step, order);
            e_right0[r] = tfsf_correction(aux, xof(iR), k, step, order);
            e_right1[r] = tfsf_correction(aux, xof(iR + 1), k, step, order);
        }

        kernels::update_h(grid);
        for (int i = iL; i <= iR; ++i) {
            const int c = i - iL + 1;
            grid.hx[grid.at(i, kT - 1)] -= chx * e_top1[c];
            grid.hx[grid.at(i, kB)] += chx * e_bot0[c];
        }
        for (int k = kT; k <= kB; ++k) {
            const int r = k - kT + 1;
            grid.hz[grid.at(iL - 1, k)] += chz * e_left1[r];
            grid.hz[grid.at(iR, k)] -= chz * e_right0[r];
        }
        // Incident H on the SF side of each edge, advanced with the main-grid curl.
        for (int c = 0; c < nbx; ++c) {
            hx_top[c] += chx * (e_top1[c] - e_top0[c]);
            hx_bot[c] += chx * (e_bot1[c] - e_bot0[c]);
        }
        for (int r = 0; r < nbz; ++r) {
            hz_left[r] -= chz * (e_left1[r] - e_left0[r]);
            hz_right[r] -= chz * (e_right1[r] - e_right0[r]);
        }

        kernels::update_e(grid);
        for (int i = iL; i <= iR; ++i) {
            const int c = i - iL + 1;
            const std::size_t top = grid.at(i, kT), bot = grid.at(i, kB);
            grid.ey[top] -= grid.cb[top] * hx_top[c] / gs.dz;
            grid.ey[bot] += grid.cb[bot] * hx_bot[c] / gs.dz;
        }
        for (int k = kT; k <= kB; ++k) {
            const int r = k - kT + 1;
            const std::size_t left = grid.at(iL, k), right = grid.at(iR, k);
            grid.ey[left] += grid.cb[left] * hz_left[r] / gs.dx;
            grid.ey[right] -= grid.cb[right] * hz_right[r] / gs.dx;
        }

        if (n >= L.dft_start) {
            const Complex we = std::exp(Complex(0.0, -omega * (step + 1.0) * gs.dt)) * (2.0 / nd);
            const Complex wh = std::exp(Complex(0.0, -omega * (step + 0.5) * gs.dt)) * (2.0 / nd);
            accumulate(out.upper, L.reflect_row, we, wh);
            accumulate(out.lower, L.transmit_row, we, wh);
        }
        if ((n + 1) % 200 == 0 || n + 1 == gs.n_steps) {
            const double m = grid.max_abs_ey();
            if (!std::isfinite(m) || m > 1e6) throw StabilityError("FDTD field diverged", n + 1);
        }
        if (snapshots && options_.snapshot_every > 0 && (n + 1) % options_.snapshot_every == 0)
            write_snapshot(options_.snapshot_dir, grid, n + 1);
    }
    out.steps = gs.n_steps;
    return out;
}

const ProbeLine& SlabSimulator::reference() const {
    if (!reference_) {
        const Medium v = scene_.cover;
        RawProbes r = run_grid(v, v, v, {}, {}, aux_vacuum_, false);
        double sum = 0.0;
        for (const Complex& e : r.lower.ey) sum += std::abs(e);
        reference_amplitude_ = sum / static_cast<double>(r.lower.ey.size());
        reference_ = std::move(r.lower);
    }
    return *reference_;
}

ProbeRecord SlabSimulator::run(std::span<const double> upper_heights,
                               std::span<const double> lower_heights) const {
    const GridLayout& L = layout_;
    auto check = [&](std::span<const double> h, const char* which) {
        if (h.empty()) return;
        if (static_cast<int>(h.size()) != scene_.aperture_cells)
            throw InvalidArgument(std::string("run: ") + which + " profile length must equal aperture_cells");
        for (double v : h) {
            if (!std::isfinite(v) || std::abs(v) > scene_.roughness_margin * (1.0 + 1e-9) + 1e-15)
                throw InvalidArgument(std::string("run: ") + which + " profile exceeds roughness_margin");
        }
    };
    check(upper_heights, "upper");
    check(lower_heights, "lower");

    RawProbes raw = run_grid(scene_.cover, scene_.slab, scene_.substrate, upper_heights, lower_heights,
                             aux_, options_.snapshot_every > 0);

    // The reflection line sits in the scattered-field region; add back the
    // flat-stack reflection carried by the aux solution.
    const GridSpec& gs = L.grid;
    const double omega = 2.0 * kPi * scene_.frequency;
    const double Omega = 2.0 / gs.dt * std::sin(0.5 * omega * gs.dt);
    const double kx = omega * std::sin(scene_.theta_i) / kC0;
    const Complex jwmu(0.0, Omega * kMu0);
    Complex r[3];
    for (int d = -1; d <= 1; ++d) {
        r[d + 1] = aux_phasor(aux_, L, L.reflect_row + d) - aux_phasor(aux_vacuum_, L, L.reflect_row + d);
    }
    const Complex hx_row = 0.5 * ((r[2] - r[1]) + (r[1] - r[0])) / (gs.dz * jwmu);
    for (std::size_t c = 0; c < raw.upper.x.size(); ++c) {
        const double x = raw.upper.x[c];
        auto ph = [&](double xx) { return std::exp(Complex(0.0, -kx * xx)); };
        const Complex e0 = r[1] * ph(x);
        const Complex hz_right = -(r[1] * ph(x + gs.dx) - e0) / (gs.dx * jwmu);
        const Complex hz_left = -(e0 - r[1] * ph(x - gs.dx)) / (gs.dx * jwmu);
        raw.upper.ey[c] += e0;
        raw.upper.hx[c] += hx_row * ph(x);
        raw.upper.hz[c] += 0.5 * (hz_left + hz_right);
    }

    ProbeRecord rec;
    rec.frequency = scene_.frequency;
    rec.theta_i = scene_.theta_i;
    rec.dx = gs.dx;
    rec.upper = std::move(raw.upper);
    rec.lower = std::move(raw.lower);
    rec.reference = reference();
    rec.incident_amplitude = reference_amplitude_;
    rec.steps = raw.steps;
    return rec;
}

ProbeRecord SlabSimulator::run() const { return run(scene_.upper_heights, scene_.lower_heights); }

ProbeRecord simulate_slab(const SlabScene& scene, const SimulationOptions& options) {
    return SlabSimulator(scene, options).run();
}

}  // namespace roughslab
