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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "roughslab/ntff.hpp"

namespace roughslab {

enum class Family { Lambertian, Directive, Backscattering, HybridDirective };

std::string to_string(Family f);  // "L", "D", "BSc", "HD"
Family family_from_string(const std::string& s);

/// One lobe model. theta_a in pattern degrees; the backscatter lobe sits at
/// theta_b = -theta_a.
struct ModelComponent {
    Family family = Family::Directive;
    double a0 = 0.0;
    double a_a = 0.0;
    double a_b = 0.0;
    double lambda = 1.0;
    double theta_a = 0.0;
};

struct ScatterModel {
    Family family = Family::Directive;
    PatternKind kind = PatternKind::Reflection;  // fixes the quadrant normal for L
    ModelComponent main;      // L, D, BSc
    ModelComponent specular;  // HD: narrow directive lobe
    ModelComponent diffuse;   // HD: any of L, D, BSc
    double mse = 0.0;
    double specular_mse = 0.0;  // HD: specular lobe on its +-3 degree window
    double diffuse_mse = 0.0;   // HD: diffuse component against the specular-removed data

    // Provenance of the fitted pattern.
    double theta_i = 0.0;  // degrees
    double sigma_h = 0.0;  // m

    int parameter_count() const;
    /// Amplitude of the model in the specular direction.
    double specular_amplitude() const;
};

/// Surface normal of the pattern quadrant: 180 for reflection, 0 for transmission.
double quadrant_normal(PatternKind kind);

double eval_component(const ModelComponent& c, PatternKind kind, double theta_deg);
double eval_model(const ScatterModel& m, double theta_deg);

/// MSE of a model over a magnitude pattern.
double model_mse(const ScatterModel& m, std::span<const double> angles, std::span<const double> magnitudes);

struct FitOptions {
    double a_min = 0.5;
    double a_max = 5000.0;
    double specular_window = 3.0;  // degrees, HD specular pre-fit
};

/// Least-squares fit of one family to |pattern| with multi-start damped
/// Gauss-Newton. Throws if no start converges.
ScatterModel fit_model(const AngularPattern& pattern, Family family, const FitOptions& opts = {});

struct SelectionOptions {
    FitOptions fit;
    /// Families whose MSE is within this relative margin of the best count
    /// as tied; the tie goes to the one with fewer parameters.
    double tie_tolerance = 0.1;
};

struct Selection {
    ScatterModel chosen;
    std::vector<ScatterModel> candidates;  // L, D, BSc, HD
};

Selection select_model(const AngularPattern& pattern, const SelectionOptions& opts = {});

/// Text model file: `family A0 aA aB Lambda thetaA mse`; HD adds a specular
/// and a diffuse component line.
void write_model(std::ostream& os, const ScatterModel& m);
ScatterModel read_model(std::istream& is);

}  // namespace roughslab
