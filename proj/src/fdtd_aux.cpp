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

#include "fdtd_internal.hpp"
#include "roughslab/fdtd.hpp"

namespace roughslab {

void AuxGridRecord::scale(double factor) {
    for (double& v : e) v *= factor;
}

namespace {

double ramp(double t, double ramp_time) {
    if (t <= 0.0) return 0.0;
    if (t >= ramp_time) return 1.0;
    return 0.5 * (1.0 - std::cos(kPi * t / ramp_time));
}

}  // namespace

AuxGridRecord run_aux_grid(const SlabScene& scene, const GridLayout& layout,
                           const SimulationOptions& options, int substeps) {
    const GridSpec& g = layout.grid;
    const double omega = 2.0 * kPi * scene.frequency;
    const double s = std::sin(scene.theta_i);
    const double kx = omega * s / kC0;
    const double Kx = 2.0 / g.dx * std::sin(0.5 * kx * g.dx);
    const double Omega = 2.0 / g.dt * std::sin(0.5 * omega * g.dt);

    AuxGridRecord rec;
    rec.nz = g.nz;
    rec.n_steps = g.n_steps;
    rec.dt = g.dt;
    rec.dz = g.dz;
    rec.sin_theta = s;
    rec.sin_theta_numeric = Kx * kC0 / Omega;
    rec.frequency = scene.frequency;

    std::vector<detail::CellMedium> rows(static_cast<std::size_t>(g.nz));
    for (int k = 0; k < g.nz; ++k)
        rows[static_cast<std::size_t>(k)] = detail::flat_row_medium(scene.cover, scene.slab, scene.substrate, layout, k);
    const detail::CellMedium top{scene.cover.eps_real(), scene.cover.conductivity};
    const detail::CellMedium bottom{scene.substrate.eps_real(), scene.substrate.conductivity};

    // Aux medium that reproduces the main grid's discrete dispersion at the
    // carrier with an m-times finer time step.
    auto aux_medium = [&](const detail::CellMedium& c, int m) {
        const double dta = g.dt / m;
        const double Oa = 2.0 / dta * std::sin(0.5 * omega * dta);
        const double eps = (c.eps * Omega * Omega - Kx * Kx * kC0 * kC0) / (Oa * Oa);
        const double sigma = c.sigma * std::cos(0.5 * omega * g.dt) * Omega / (Oa * std::cos(0.5 * omega * dta));
        return detail::CellMedium{eps, sigma};
    };
    auto min_eps = [&](int m) {
        double e = std::min(aux_medium(top, m).eps, aux_medium(bottom, m).eps);
        for (const auto& r : rows) e = std::min(e, aux_medium(r, m).eps);
        return e;
    };
    int m = substeps;
    if (m <= 0) {
        for (m = 1; m <= 64; ++m) {
            const double e = min_eps(m);
            if (e > 0.0 && kC0 * (g.dt / m) / (g.dz * std::sqrt(e)) <= 0.95) break;
        }
        if (m > 64) throw InvalidArgument("aux grid: no stable substep count for this incidence");
    }
    const double e_min = min_eps(m);
    if (!(e_min > 0.0)) throw InvalidArgument("aux grid: non-positive aux permittivity (grazing incidence)");
    if (kC0 * (g.dt / m) / (g.dz * std::sqrt(e_min)) > 0.999)
        throw InvalidArgument("aux grid: requested substep count is unstable");
    rec.substeps = m;

    // Pads long enough that nothing returns from the aux ends within the run.
    const double dta = g.dt / m;
    const double reach = kC0 * g.n_steps * g.dt / std::sqrt(e_min);
    const int pad = static_cast<int>(std::ceil(0.5 * reach / g.dz)) + 50;
    const int na = g.nz + 2 * pad;
    std::vector<double> eps(static_cast<std::size_t>(na)), sig(static_cast<std::size_t>(na));
    for (int j = 0; j < na; ++j) {
        const int k = j - pad;
        const detail::CellMedium c = k < 0 ? top : (k >= g.nz ? bottom : rows[static_cast<std::size_t>(k)]);
        const detail::CellMedium a = aux_medium(c, m);
        eps[static_cast<std::size_t>(j)] = a.eps;
        sig[static_cast<std::size_t>(j)] = a.sigma;
    }
    rec.eps_aux.assign(eps.begin() + pad, eps.begin() + pad + g.nz);
    rec.sigma_aux.assign(sig.begin() + pad, sig.begin() + pad + g.nz);

    std::vector<double> ca(static_cast<std::size_t>(na)), cb(static_cast<std::size_t>(na));
    for (int j = 0; j < na; ++j) {
        const double e = kEps0 * eps[static_cast<std::size_t>(j)];
        const double loss = sig[static_cast<std::size_t>(j)] * dta / (2.0 * e);
        ca[static_cast<std::size_t>(j)] = (1.0 - loss) / (1.0 + loss);
        cb[static_cast<std::size_t>(j)] = dta / (e * (1.0 + loss) * g.dz);
    }
    const double ch = dta / (kMu0 * g.dz);

    std::vector<double> E(static_cast<std::size_t>(na), 0.0), H(static_cast<std::size_t>(na), 0.0);
    const int src = pad + layout.reflect_row - 10;
    const double ramp_time = options.ramp_periods / scene.frequency;

    rec.e.assign(static_cast<std::size_t>(g.n_steps + 1) * g.nz, 0.0);
    for (long n = 0; n < g.n_steps; ++n) {
        for (int q = 0; q < m; ++q) {
            for (int j = 0; j + 1 < na; ++j) H[j] += ch * (E[j + 1] - E[j]);
            for (int j = 1; j + 1 < na; ++j) E[j] = ca[j] * E[j] + cb[j] * (H[j] - H[j - 1]);
            const double t = (static_cast<double>(n) * m + q + 1) * dta;
            E[static_cast<std::size_t>(src)] += ramp(t, ramp_time) * std::sin(omega * t);
        }
        std::copy(E.begin() + pad, E.begin() + pad + g.nz,
                  rec.e.begin() + static_cast<std::ptrdiff_t>((n + 1) * g.nz));
    }
    return rec;
}

double tfsf_correction(const AuxGridRecord& rec, double node_x, int k, double step, int interp_order) {
    if (k < 0 || k >= rec.nz) throw InvalidArgument("tfsf_correction: row out of range");
    const double t = step - node_x * rec.sin_theta / (kC0 * rec.dt);
    if (t <= 0.0) return 0.0;
    auto sample = [&](long n) {
        if (n <= 0) return 0.0;
        return rec.E(std::min(n, rec.n_steps), k);
    };
    const long n0 = static_cast<long>(std::floor(t));
    const double a = t - static_cast<double>(n0);
    if (interp_order == 1) return (1.0 - a) * sample(n0) + a * sample(n0 + 1);
    // four-point Lagrange on n0-1 .. n0+2
    const double w0 = -a * (a - 1.0) * (a - 2.0) / 6.0;
    const double w1 = (a + 1.0) * (a - 1.0) * (a - 2.0) / 2.0;
    const double w2 = -(a + 1.0) * a * (a - 2.0) / 2.0;
    const double w3 = (a + 1.0) * a * (a - 1.0) / 6.0;
    return w0 * sample(n0 - 1) + w1 * sample(n0) + w2 * sample(n0 + 1) + w3 * sample(n0 + 2);
}

Complex aux_phasor(const AuxGridRecord& rec, const GridLayout& layout, int k) {
    const double omega = 2.0 * kPi * rec.frequency;
    Complex acc{0.0, 0.0};
    const long nd = layout.grid.n_steps - layout.dft_start;
    for (long n = layout.dft_start + 1; n <= layout.grid.n_steps; ++n) {
        acc += rec.E(n, k) * std::exp(Complex(0.0, -omega * static_cast<double>(n) * rec.dt));
    }
    return acc * (2.0 / static_cast<double>(nd));
}

}  // namespace roughslab
