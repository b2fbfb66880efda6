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
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "roughslab/fdtd.hpp"
#include "roughslab/ntff.hpp"
#include "roughslab/surface.hpp"

namespace roughslab {

enum class Sampling { LatinHypercube, IID };

std::string to_string(Sampling s);
Sampling sampling_from_string(const std::string& s);

struct EnsembleSpec {
    SlabScene scene;  // profiles and roughness_margin are filled in per ensemble
    SimulationOptions options;
    std::string material;  // label for output files
    int n_realizations = 200;
    std::uint64_t master_seed = 1;
    double sigma_h_upper = 0.0;  // m
    double sigma_h_lower = 0.0;
    double corr_length = 0.0;    // m
    SpectrumKind spectrum = SpectrumKind::Gaussian;
    Sampling sampling = Sampling::LatinHypercube;
    int jobs = 1;  // realizations run concurrently

    void validate() const;
};

struct EnsembleResult {
    AngularPattern mean_r;  // magnitude average, real values
    AngularPattern mean_t;
    std::vector<double> stderr_r;  // per-angle standard error of the mean (linear)
    std::vector<double> stderr_t;
    int n_realizations = 0;

    // Per-realization magnitudes, row i = realization i.
    std::vector<std::vector<double>> abs_r;
    std::vector<std::vector<double>> abs_t;
    std::vector<double> power_ratio;  // (P_R + P_T) / P_inc per realization
    std::vector<std::string> manifest;  // one line per realization
    double max_abs_height = 0.0;
};

/// Draw the 2N-column normal matrix (upper interface first) for all
/// realizations of `spec`.
LhsMatrix ensemble_draws(const EnsembleSpec& spec);

/// Progress callback: (realizations finished, total).
using ProgressFn = std::function<void(int, int)>;

EnsembleResult run_ensemble(const EnsembleSpec& spec, const ProgressFn& progress = {});

/// Combine per-realization magnitudes into mean and standard error (fixed
/// pairwise summation order, so the result does not depend on scheduling).
void finalize_ensemble(EnsembleResult& r);

/// Max over angles of 20 log10((mean + se) / mean) for both patterns.
double rms_error_infnorm(const EnsembleResult& r);

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> v);

/// Pattern file with a trailing `# stderr_db_max` line.
void write_ensemble_pattern(std::ostream& os, const AngularPattern& p, double stderr_db_max);
void write_manifest(std::ostream& os, const EnsembleSpec& spec, const EnsembleResult& r);

}  // namespace roughslab
