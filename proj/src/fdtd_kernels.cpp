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

#include "roughslab/fdtd_kernels.hpp"

#include <algorithm>
#include <cmath>

#include "roughslab/common.hpp"

namespace roughslab::kernels {

namespace {

// Graded conductivity (normalized, q = sigma dt / 2 eps0) at fractional cell
// position p along an axis of n nodes with `pml` absorbing cells per side.
double pml_q(double p, int n, int pml, int order, double sigma_max, double dt) {
    if (pml <= 0) return 0.0;
    const double inner_lo = pml;
    const double inner_hi = n - 1 - pml;
    double depth = 0.0;
    if (p < inner_lo) depth = (inner_lo - p) / pml;
    if (p > inner_hi) depth = (p - inner_hi) / pml;
    depth = std::min(depth, 1.0);
    const double sigma = sigma_max * std::pow(depth, order);
    return sigma * dt / (2.0 * kEps0);
}

// H-field UPML step at one node. `q_in` grades the stretched axis that drives
// B, `q_out` the one that converts B back to H.
inline void pml_h(double& h, double& b, double derivative, double q_in, double q_out, double dt) {
    const double b_old = b;
    const double b_new = ((1.0 - q_in) * b_old + dt * derivative) / (1.0 + q_in);
    b = b_new;
    h += ((1.0 + q_out) * b_new - (1.0 - q_out) * b_old) / kMu0;
}

inline void pml_e(double& e, double& d, double& g, double curl, double qx, double qz, double dt,
                  double ca, double cg) {
    const double d_old = d;
    const double d_new = ((1.0 - qx) * d_old + dt * curl) / (1.0 + qx);
    const double g_old = g;
    const double g_new = ((1.0 - qz) * g_old + (d_new - d_old)) / (1.0 + qz);
    d = d_new;
    g = g_new;
    e = ca * e + cg * (g_new - g_old);
}

}  // namespace

YeeGrid::YeeGrid(int nx_, int nz_, double dx_, double dz_, double dt_, int pml_, int order)
    : nx(nx_), nz(nz_), dx(dx_), dz(dz_), dt(dt_), pml(pml_) {
    const std::size_t n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(nz);
    ey.assign(n, 0.0);
    hx.assign(n, 0.0);
    hz.assign(n, 0.0);
    dy.assign(n, 0.0);
    gy.assign(n, 0.0);
    bx.assign(n, 0.0);
    bz.assign(n, 0.0);
    ca.assign(n, 1.0);
    cb.assign(n, dt / kEps0);
    cg.assign(n, 1.0 / kEps0);

    const double smax_x = 0.8 * (order + 1) / (kEta0 * dx);
    const double smax_z = 0.8 * (order + 1) / (kEta0 * dz);
    qx_n.resize(static_cast<std::size_t>(nx));
    qx_h.resize(static_cast<std::size_t>(nx));
    qz_n.resize(static_cast<std::size_t>(nz));
    qz_h.resize(static_cast<std::size_t>(nz));
    for (int i = 0; i < nx; ++i) {
        qx_n[static_cast<std::size_t>(i)] = pml_q(i, nx, pml, order, smax_x, dt);
        qx_h[static_cast<std::size_t>(i)] = pml_q(i + 0.5, nx, pml, order, smax_x, dt);
    }
    for (int k = 0; k < nz; ++k) {
        qz_n[static_cast<std::size_t>(k)] = pml_q(k, nz, pml, order, smax_z, dt);
        qz_h[static_cast<std::size_t>(k)] = pml_q(k + 0.5, nz, pml, order, smax_z, dt);
    }
}

void YeeGrid::set_material(int i, int k, double eps_r, double sigma) {
    const double eps = kEps0 * eps_r;
    const double loss = sigma * dt / (2.0 * eps);
    const std::size_t idx = at(i, k);
    ca[idx] = (1.0 - loss) / (1.0 + loss);
    cg[idx] = 1.0 / (eps * (1.0 + loss));
    cb[idx] = dt * cg[idx];
}

double YeeGrid::max_abs_ey() const {
    double m = 0.0;
    for (double v : ey) m = std::max(m, std::abs(v));
    return m;
}

double YeeGrid::field_energy() const {
    double e = 0.0;
    for (std::size_t i = 0; i < ey.size(); ++i) {
        e += kEps0 * ey[i] * ey[i] + kMu0 * (hx[i] * hx[i] + hz[i] * hz[i]);
    }
    return 0.5 * e * dx * dz;
}

void update_h(YeeGrid& g) {
    const int nx = g.nx;
    const int nz = g.nz;
    const int i0 = g.interior_i0();
    const int i1 = g.interior_i1();
    const int k0 = g.interior_k0();
    const int k1 = g.interior_k1();
    const double dt = g.dt;
    const double chx = dt / (kMu0 * g.dz);
    const double chz = dt / (kMu0 * g.dx);
    const double inv_dx = 1.0 / g.dx;
    const double inv_dz = 1.0 / g.dz;

#pragma omp parallel for schedule(static)
    for (int k = 0; k < nz; ++k) {
        double* __restrict hx = g.hx.data() + g.at(0, k);
        double* __restrict hz = g.hz.data() + g.at(0, k);
        double* __restrict bx = g.bx.data() + g.at(0, k);
        double* __restrict bz = g.bz.data() + g.at(0, k);
        const double* __restrict ey = g.ey.data() + g.at(0, k);
        const double* __restrict ey_next = k + 1 < nz ? g.ey.data() + g.at(0, k + 1) : nullptr;
        const bool interior_row = k >= k0 && k < k1;
        const double qzh = g.qz_h[static_cast<std::size_t>(k)];
        const double qzn = g.qz_n[static_cast<std::size_t>(k)];

        auto slow = [&](int i) {
            if (ey_next) pml_h(hx[i], bx[i], (ey_next[i] - ey[i]) * inv_dz, qzh, g.qx_n[static_cast<std::size_t>(i)], dt);
            if (i + 1 < nx) pml_h(hz[i], bz[i], -(ey[i + 1] - ey[i]) * inv_dx, g.qx_h[static_cast<std::size_t>(i)], qzn, dt);
        };

        if (!interior_row) {
            for (int i = 0; i < nx; ++i) slow(i);
            continue;
        }
        for (int i = 0; i < i0; ++i) slow(i);
#pragma omp simd
        for (int i = i0; i < i1; ++i) {
            hx[i] += chx * (ey_next[i] - ey[i]);
            hz[i] -= chz * (ey[i + 1] - ey[i]);
        }
        for (int i = i1; i < nx; ++i) slow(i);
    }
}

void update_e(YeeGrid& g) {
    const int nx = g.nx;
    const int nz = g.nz;
    const int i0 = g.interior_i0();
    const int i1 = g.interior_i1();
    const int k0 = g.interior_k0();
    const int k1 = g.interior_k1();
    const double dt = g.dt;
    const double inv_dx = 1.0 / g.dx;
    const double inv_dz = 1.0 / g.dz;

#pragma omp parallel for schedule(static)
    for (int k = 1; k < nz - 1; ++k) {
        double* __restrict ey = g.ey.data() + g.at(0, k);
        double* __restrict dy = g.dy.data() + g.at(0, k);
        double* __restrict gy = g.gy.data() + g.at(0, k);
        const double* __restrict hx = g.hx.data() + g.at(0, k);
        const double* __restrict hx_prev = g.hx.data() + g.at(0, k - 1);
        const double* __restrict hz = g.hz.data() + g.at(0, k);
        const double* __restrict ca = g.ca.data() + g.at(0, k);
        const double* __restrict cb = g.cb.data() + g.at(0, k);
        const double* __restrict cg = g.cg.data() + g.at(0, k);
        const bool interior_row = k >= k0 && k < k1;
        const double qzn = g.qz_n[static_cast<std::size_t>(k)];

        auto slow = [&](int i) {
            const double curl = (hx[i] - hx_prev[i]) * inv_dz - (hz[i] - hz[i - 1]) * inv_dx;
            pml_e(ey[i], dy[i], gy[i], curl, g.qx_n[static_cast<std::size_t>(i)], qzn, dt, ca[i], cg[i]);
        };

        if (!interior_row) {
            for (int i = 1; i < nx - 1; ++i) slow(i);
            continue;
        }
        for (int i = 1; i < i0; ++i) slow(i);
#pragma omp simd
        for (int i = i0; i < i1; ++i) {
            const double curl = (hx[i] - hx_prev[i]) * inv_dz - (hz[i] - hz[i - 1]) * inv_dx;
            ey[i] = ca[i] * ey[i] + cb[i] * curl;
        }
        for (int i = i1; i < nx - 1; ++i) slow(i);
    }
}

void update_h_reference(YeeGrid& g) {
    const double inv_dx = 1.0 / g.dx;
    const double inv_dz = 1.0 / g.dz;
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t idx = g.at(i, k);
            if (k + 1 < g.nz) {
                pml_h(g.hx[idx], g.bx[idx], (g.ey[g.at(i, k + 1)] - g.ey[idx]) * inv_dz,
                      g.qz_h[static_cast<std::size_t>(k)], g.qx_n[static_cast<std::size_t>(i)], g.dt);
            }
            if (i + 1 < g.nx) {
                pml_h(g.hz[idx], g.bz[idx], -(g.ey[g.at(i + 1, k)] - g.ey[idx]) * inv_dx,
                      g.qx_h[static_cast<std::size_t>(i)], g.qz_n[static_cast<std::size_t>(k)], g.dt);
            }
        }
    }
}

void update_e_reference(YeeGrid& g) {
    const double inv_dx = 1.0 / g.dx;
    const double inv_dz = 1.0 / g.dz;
    for (int k = 1; k < g.nz - 1; ++k) {
        for (int i = 1; i < g.nx - 1; ++i) {
            const std::size_t idx = g.at(i, k);
            const double curl = (g.hx[idx] - g.hx[g.at(i, k - 1)]) * inv_dz -
                                (g.hz[idx] - g.hz[g.at(i - 1, k)]) * inv_dx;
            pml_e(g.ey[idx], g.dy[idx], g.gy[idx], curl, g.qx_n[static_cast<std::size_t>(i)],
                  g.qz_n[static_cast<std::size_t>(k)], g.dt, g.ca[idx], g.cg[idx]);
        }
    }
}

}  // namespace roughslab::kernels
