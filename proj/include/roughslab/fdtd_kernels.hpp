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

#pragma once

#include <cstddef>
#include <vector>

namespace roughslab::kernels {

/// TE (Ey, Hx, Hz) Yee grid with uniaxial PML auxiliaries.
///
/// Storage is row-major with x fastest. Hx(i, k) lives at (i, k+1/2),
/// Hz(i, k) at (i+1/2, k). Ey on the outermost rows/columns is a PEC wall.
struct YeeGrid {
    int nx = 0;
    int nz = 0;
    double dx = 0.0;
    double dz = 0.0;
    double dt = 0.0;
    int pml = 0;

    std::vector<double> ey, hx, hz;
    std::vector<double> dy, gy, bx, bz;  // UPML auxiliary fields
    std::vector<double> ca, cb, cg;      // Ey update: ey = ca*ey + cb*curl (interior), + cg*dG (PML)

    // Per-axis PML profiles, q = sigma dt / (2 eps0), at integer (n) and
    // half-integer (h) positions.
    std::vector<double> qx_n, qx_h, qz_n, qz_h;

    YeeGrid() = default;
    YeeGrid(int nx, int nz, double dx, double dz, double dt, int pml, int order);

    std::size_t at(int i, int k) const {
        return static_cast<std::size_t>(k) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
    }

    /// Set the Ey update coefficients of node (i, k) from its relative
    /// permittivity and conductivity.
    void set_material(int i, int k, double eps_r, double sigma);

    /// Columns/rows in [first, last) of the PML-free interior.
    int interior_i0() const { return pml + 1; }
    int interior_i1() const { return nx - pml - 1; }
    int interior_k0() const { return pml + 1; }
    int interior_k1() const { return nz - pml - 1; }

    double max_abs_ey() const;
    double field_energy() const;
};

/// OpenMP-parallel half-steps: PML-free interior uses the plain Yee update,
/// the absorbing frame the full UPML chain.
void update_h(YeeGrid& g);
void update_e(YeeGrid& g);

/// Serial reference: the full UPML chain on every node, no interior split.
/// Kept for verifying the parallel kernels.
void update_h_reference(YeeGrid& g);
void update_e_reference(YeeGrid& g);

}  // namespace roughslab::kernels
