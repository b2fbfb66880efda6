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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "roughslab/common.hpp"

namespace roughslab {

enum class SpectrumKind { Gaussian, Exponential };

std::string to_string(SpectrumKind kind);
SpectrumKind spectrum_kind_from_string(const std::string& name);

/// Statistics and sampling of a 1-D random interface of length N * spacing.
struct SurfaceSpec {
    int n_points = 0;
    double spacing = 0.0;      // m
    double rms_height = 0.0;   // m
    double corr_length = 0.0;  // m
    SpectrumKind kind = SpectrumKind::Gaussian;
    std::uint64_t seed = 0;

    double length() const { return n_points * spacing; }

    /// Throws InvalidArgument naming the offending field.
    void validate() const;
};

struct HeightProfile {
    SurfaceSpec spec;
    std::vector<double> x;        // x_n = n * spacing, n = 1..N
    std::vector<double> heights;  // f(x_n)
    double max_imag_residue = 0.0;  // largest |Im f| left by the inverse transform

    std::size_t size() const { return heights.size(); }
    double max_abs_height() const;
};

/// Power spectral density W(K) of the chosen correlation model, normalized
/// so that its integral over K equals rms_height^2.
double roughness_spectrum(const SurfaceSpec& spec, double k);

/// Draw a profile using the spec's own seed (stream 0).
HeightProfile generate_surface(const SurfaceSpec& spec);

/// Draw a profile from N externally supplied standard-normal variates, laid
/// out as [m=0, m=N/2, Re/Im pairs for m = 1..N/2-1]. This is how stratified
/// ensemble draws enter.
HeightProfile generate_surface(const SurfaceSpec& spec, std::span<const double> normals);

struct SurfaceStatistics {
    double mean = 0.0;
    double rms = 0.0;
    double corr_length = 0.0;  // first 1/e crossing of the sample autocorrelation
};

SurfaceStatistics surface_statistics(const HeightProfile& profile);

/// Periodogram |FFT(f - mean)|^2 * dx / N scaled to estimate W(K_m) for m = 0..N/2.
std::vector<double> periodogram(const HeightProfile& profile);

/// n_realizations x dims matrix (row-major) of Latin-hypercube stratified
/// standard-normal draws.
struct LhsMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    std::span<const double> row(int r) const {
        return {values.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }
    double operator()(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

LhsMatrix latin_hypercube_seeds(int n_realizations, int dims, std::uint64_t master_seed);

/// `# N dx sigma_h l_c kind seed` header followed by `x_m height_m` rows.
void write_profile(std::ostream& os, const HeightProfile& profile);
HeightProfile read_profile(std::istream& is);

}  // namespace roughslab
