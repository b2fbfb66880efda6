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
#include <map>
#include <string>

#include "roughslab/common.hpp"

namespace roughslab {

/// ITU-R P.2040 style material: eps' constant, conductivity c * f_GHz^d.
struct MaterialParams {
    std::string name;
    double eps_real = 1.0;
    double cond_coeff = 0.0;  // S/m at 1 GHz
    double cond_exp = 0.0;

    void validate() const;
};

/// A material evaluated at one frequency. Uses the exp(+j w t) convention,
/// so eps_r = eps' - j sigma / (eps0 w) has a non-positive imaginary part.
struct Medium {
    Complex eps_r{1.0, 0.0};
    double conductivity = 0.0;  // S/m
    double index = 1.0;         // Re sqrt(eps_r)

    double eps_real() const { return eps_r.real(); }
    static Medium vacuum() { return {}; }
};

Medium medium_at(const MaterialParams& m, double f_ghz);

/// Medium with real permittivity and conductivity given directly.
Medium medium_from(double eps_real, double conductivity, double f_hz);

struct PhaseDeviation {
    double reflection = 0.0;    // rad
    double transmission = 0.0;  // rad
};

/// Phase offsets of the reflected and refracted partial waves produced by a
/// height offset dh (m) at incidence theta_i (rad). Throws when n1 sin(theta_i)
/// exceeds n2.
PhaseDeviation phase_deviation(double dh, double theta_i, double lambda, double n1, double n2);

struct CriticalHeights {
    double reflection = 0.0;    // m
    double transmission = 0.0;  // m, +inf when the index contrast vanishes
};

/// Rayleigh-criterion rms heights for reflection and transmission.
CriticalHeights critical_heights(double theta_i, double lambda, double n1, double n2);

/// Plane-wave coefficients of an air / medium / air slab.
struct SlabCoefficients {
    Complex reflection;
    Complex transmission;  // referenced to the slab's exit plane
};

enum class Polarization { TE, TM };

/// Closed-form multiple-reflection (Airy) sum for a homogeneous slab of
/// thickness d between two vacuum half-spaces.
SlabCoefficients slab_coefficients(const Medium& slab, double thickness, double theta_i,
                                   double f_hz, Polarization pol = Polarization::TE);

/// Fresnel reflection from vacuum into a half-space.
Complex halfspace_reflection(const Medium& m, double theta_i, Polarization pol);

/// Material table keyed by name.
class MaterialLibrary {
public:
    /// wood, plasterboard, concrete, glass and vacuum.
    static MaterialLibrary builtin();

    /// JSON object: { "name": { "eps_real": .., "c": .., "d": .. }, ... }.
    static MaterialLibrary load(std::istream& is);
    void save(std::ostream& os) const;

    void add(const MaterialParams& m);
    const MaterialParams& get(const std::string& name) const;
    bool contains(const std::string& name) const { return table_.count(name) != 0; }
    const std::map<std::string, MaterialParams>& entries() const { return table_; }

private:
    std::map<std::string, MaterialParams> table_;
};

}  // namespace roughslab
