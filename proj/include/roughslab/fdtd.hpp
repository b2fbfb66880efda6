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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roughslab/common.hpp"
#include "roughslab/media.hpp"

namespace roughslab {

/// Uniform 2-D Yee grid and time axis.
struct GridSpec {
    double dx = 0.0;  // m
    double dz = 0.0;  // m
    int nx = 0;
    int nz = 0;
    double dt = 0.0;  // s
    long n_steps = 0;
    int pml_cells = 12;
    double courant = 0.99;  // c0 dt sqrt(1/dx^2 + 1/dz^2)
    bool allow_unstable = false;  // accept courant >= 1 (the run then diverges)

    double max_stable_dt() const;
    void validate() const;
};

/// Numerical knobs that are not part of the physical scene.
struct SimulationOptions {
    double cells_per_wavelength = 35.0;  // vacuum wavelength / dx
    double courant = 0.99;
    bool allow_unstable = false;
    int pml_cells = 12;
    int pml_order = 3;
    int pml_gap = 4;             // cells between PML and the nearest probe / TF-SF edge
    double ramp_periods = 5.0;
    int dft_periods = 4;
    double settle_periods = 5.0;
    int extra_steps = 0;         // added to the automatic run length
    int interp_order = 3;        // 1 = linear, 3 = cubic time interpolation of the aux record
    double probe_inset = -1.0;   // m trimmed from each probe end; <0 means 2 correlation lengths
    int snapshot_every = 0;      // 0 disables field dumps
    std::filesystem::path snapshot_dir;
};

/// Air / slab / air stack (any three media) with optional rough interfaces.
///
/// Heights are positive towards layer 1. The rough aperture spans
/// `aperture_cells` columns; profiles must be empty (flat) or have exactly that
/// many samples.
struct SlabScene {
    double frequency = 28e9;
    double theta_i = 0.0;  // rad
    Medium cover;          // layer 1, holds the source and the reflection probe
    Medium slab;           // layer 2
    Medium substrate;      // layer 3, holds the transmission probe
    double thickness = 0.1;
    int aperture_cells = 700;
    double corr_length = 0.0;        // m, only used for the probe inset default
    double roughness_margin = 0.0;   // m reserved above/below each nominal interface
    std::vector<double> upper_heights;
    std::vector<double> lower_heights;

    double wavelength() const { return kC0 / frequency; }
    void validate() const;
};

/// Derived index layout of a scene on a grid. Rows are Ey node indices k,
/// columns Ey node indices i; Ey(i, k) sits at (i dx, k dz).
struct GridLayout {
    GridSpec grid;
    int box_left = 0, box_right = 0;  // TF region columns, inclusive
    int box_top = 0, box_bottom = 0;  // TF region rows, inclusive
    int reflect_row = 0;              // scattered-field side, above box_top
    int transmit_row = 0;             // total-field side, above box_bottom
    int probe_first = 0, probe_last = 0;  // inclusive column range of both probe lines
    int profile_first = 0;            // column of the first profile sample
    double z_upper = 0.0;             // nominal interface depths (m)
    double z_lower = 0.0;
    int steps_per_period = 0;
    long dft_start = 0;               // first step of the phasor accumulation window
};

GridLayout plan_layout(const SlabScene& scene, const SimulationOptions& options);

/// Stored 1-D plane-wave history used to drive the TF/SF boundary.
///
/// E(n, k) is the y field at t = n dt on main-grid row k, for the column at
/// box_left. Other columns see the same history delayed by x sin(theta) / c0.
struct AuxGridRecord {
    int nz = 0;
    long n_steps = 0;  // samples are n = 0 .. n_steps
    double dt = 0.0;
    double dz = 0.0;
    double sin_theta = 0.0;
    double sin_theta_numeric = 0.0;  // K_x c0 / Omega: grid sin(theta) seen by the main grid
    int substeps = 1;
    double frequency = 0.0;
    std::vector<double> eps_aux;    // per row, real permittivity of the aux medium
    std::vector<double> sigma_aux;  // per row
    std::vector<double> e;          // (n_steps + 1) x nz, row-major in n

    double E(long n, int k) const { return e[static_cast<std::size_t>(n) * nz + k]; }
    void scale(double factor);
};

/// Run the 1-D auxiliary grid for the flat-layer version of `scene`.
/// substeps = 0 picks the smallest stable count.
AuxGridRecord run_aux_grid(const SlabScene& scene, const GridLayout& layout,
                           const SimulationOptions& options, int substeps = 0);

/// Aux field on row k at time step*dt - node_x sin(theta)/c0, interpolated
/// between stored samples (order 1 linear, 3 cubic). Zero before t = 0.
double tfsf_correction(const AuxGridRecord& rec, double node_x, int k, double step,
                       int interp_order = 1);

/// Carrier phasor of the aux history on row k over the DFT window of `layout`.
Complex aux_phasor(const AuxGridRecord& rec, const GridLayout& layout, int k);

/// Interface cell of size dx x dz where a dx_part x dz_part rectangle holds medium 2.
struct InterfaceCell {
    double dx_part = 0.0;
    double dz_part = 0.0;
    double dx = 1.0;
    double dz = 1.0;
};

/// Area-weighted (contour-path) permittivity of a cell straddling two media.
Complex effective_permittivity(const InterfaceCell& cell, Complex eps1, Complex eps2);

/// Complex carrier phasors sampled along one probe row.
struct ProbeLine {
    double z = 0.0;
    std::vector<double> x;
    std::vector<Complex> ey, hx, hz;

    bool empty() const { return x.empty(); }
};

struct ProbeRecord {
    double frequency = 0.0;
    double theta_i = 0.0;
    double dx = 0.0;
    ProbeLine upper;      // reflected field (scattered field plus flat-stack reflection)
    ProbeLine lower;      // total transmitted field
    ProbeLine reference;  // incident field on the lower line, vacuum run
    double incident_amplitude = 0.0;  // mean |Ey| of the reference line
    long steps = 0;
};

/// Owns the grid plan, the auxiliary records and the vacuum reference for one
/// scene template, and runs individual (rough) realizations on it.
class SlabSimulator {
public:
    SlabSimulator(SlabScene scene, SimulationOptions options = {});

    const GridLayout& layout() const { return layout_; }
    const SlabScene& scene() const { return scene_; }
    const AuxGridRecord& aux() const { return aux_; }
    const AuxGridRecord& aux_vacuum() const { return aux_vacuum_; }

    /// Run one realization. Empty height vectors mean flat interfaces.
    ProbeRecord run(std::span<const double> upper_heights,
                    std::span<const double> lower_heights) const;

    /// Run the template scene's own profiles.
    ProbeRecord run() const;

    /// Phasors of the vacuum reference run (computed on first use).
    const ProbeLine& reference() const;

private:
    struct RawProbes {
        ProbeLine upper, lower;
        long steps = 0;
    };
    RawProbes run_grid(const Medium& cover, const Medium& slab, const Medium& substrate,
                       std::span<const double> upper_heights,
                       std::span<const double> lower_heights, const AuxGridRecord& aux,
                       bool snapshots) const;

    SlabScene scene_;
    SimulationOptions options_;
    GridLayout layout_;
    AuxGridRecord aux_;
    AuxGridRecord aux_vacuum_;
    mutable std::optional<ProbeLine> reference_;
    mutable double reference_amplitude_ = 0.0;
};

/// One-shot convenience wrapper around SlabSimulator.
ProbeRecord simulate_slab(const SlabScene& scene, const SimulationOptions& options = {});

/// Integral over x in [0, w] of clamp(h(x), a, b) for h linear from h0 to h1.
double clamped_linear_integral(double h0, double h1, double a, double b, double w);

}  // namespace roughslab
