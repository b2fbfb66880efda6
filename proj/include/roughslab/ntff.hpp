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

#include "roughslab/common.hpp"
#include "roughslab/fdtd.hpp"

namespace roughslab {

enum class PatternKind { Reflection, Transmission, RCS };

std::string to_string(PatternKind k);
PatternKind pattern_kind_from_string(const std::string& s);

/// 181-point pattern on a 1 degree grid. Reflection spans 90..270 degrees,
/// transmission and RCS use their own ranges (see pattern_angles).
struct AngularPattern {
    PatternKind kind = PatternKind::Reflection;
    std::vector<double> angles;   // degrees
    std::vector<Complex> values;  // RCS stores sigma_HH in the real part

    double frequency = 0.0;
    double theta_i = 0.0;  // degrees
    std::string material;
    double sigma_h_upper = 0.0;  // m
    double sigma_h_lower = 0.0;
    int n_realizations = 1;
    std::string scene_digest;

    std::size_t size() const { return angles.size(); }
    std::vector<double> magnitudes() const;
    void validate() const;
};

inline constexpr int kPatternSamples = 181;

/// 90..270 for reflection and RCS, -90..90 for transmission.
std::vector<double> pattern_angles(PatternKind kind);

enum class ProbeSide { Upper, Lower };

enum class Taper { None, Hann, Blackman };

/// r-cancelled 2-D far field sqrt(r) e^{jkr} E_y(r, theta) of the equivalent
/// currents on one probe line. theta is measured from the +z axis pointing
/// from the upper (source) side through the slab, positive towards +x, so the
/// flat-slab specular direction is 180 - theta_i.
std::vector<Complex> far_field(const ProbeLine& line, ProbeSide side, double frequency,
                               std::span<const double> angles_deg, Taper taper = Taper::None);

std::vector<Complex> far_field(const ProbeRecord& rec, ProbeSide side,
                               std::span<const double> angles_deg, Taper taper = Taper::None);

struct Coefficients {
    AngularPattern reflection;
    AngularPattern transmission;
    Complex incident;  // E_i: reference-run far field at theta_i
};

/// R(theta) = E_R(theta) / E_i and T(theta) = E_T(theta) / E_i, with E_i from
/// the vacuum reference line through the same transformation.
Coefficients extract_coefficients(const ProbeRecord& rec);

/// sigma_HH(theta) = 2 pi |E(theta)|^2 r / |E_inc|^2 on the reflection side.
AngularPattern bistatic_rcs(const ProbeRecord& rec, Taper taper = Taper::None);

/// Far-zone power balance of one realization, each term per unit length.
struct PowerBalance {
    double reflected = 0.0;
    double transmitted = 0.0;
    double incident = 0.0;  // power through the aperture from the reference line

    double ratio() const { return (reflected + transmitted) / incident; }
};

PowerBalance power_balance(const ProbeRecord& rec);

/// Index of the sample closest to `angle_deg`.
std::size_t nearest_index(const AngularPattern& p, double angle_deg);

void write_pattern(std::ostream& os, const AngularPattern& p);
AngularPattern read_pattern(std::istream& is);

}  // namespace roughslab
