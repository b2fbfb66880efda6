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

// Reference solutions written independently of the library code paths.

#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

using cd = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr double c0 = 299792458.0;
inline constexpr double eps0 = 8.8541878128e-12;

/// Relative permittivity eps' - j sigma / (eps0 w).
inline cd permittivity(double eps_real, double sigma, double f) { return {eps_real, -sigma / (eps0 * 2.0 * pi * f)}; }

struct Rt {
    cd r, t;
};

/// TE plane wave through a homogeneous layer, characteristic (ABCD) matrix
/// form, exp(+j w t). t is the field on the exit plane over the incident
/// field on the entry plane.
inline Rt te_layer(cd eps, double d, double theta, double f) {
    const double k0 = 2.0 * pi * f / c0;
    const double s = std::sin(theta);
    cd kz = std::sqrt(eps - s * s);
    if (kz.imag() > 0.0) kz = -kz;
    const cd y = kz;  // normalized TE admittance
    const double y0 = std::cos(theta);
    const cd delta = k0 * d * kz;
    const cd j(0.0, 1.0);
    const cd m11 = std::cos(delta), m12 = j * std::sin(delta) / y, m21 = j * y * std::sin(delta), m22 = std::cos(delta);
    const cd den = y0 * m11 + y0 * y0 * m12 + m21 + y0 * m22;
    const cd t = 2.0 * y0 / den;
    return {t * (m11 + m12 * y0) - 1.0, t};
}

/// Same layer as a stack of `n` thin sublayers, multiplied out.
inline Rt te_layer_stacked(cd eps, double d, double theta, double f, int n) {
    const double k0 = 2.0 * pi * f / c0;
    const double s = std::sin(theta);
    cd kz = std::sqrt(eps - s * s);
    if (kz.imag() > 0.0) kz = -kz;
    const cd y = kz, j(0.0, 1.0);
    const cd delta = k0 * (d / n) * kz;
    cd a = 1, b = 0, c = 0, e = 1;
    for (int i = 0; i < n; ++i) {
        const cd m11 = std::cos(delta), m12 = j * std::sin(delta) / y, m21 = j * y * std::sin(delta), m22 = m11;
        const cd na = a * m11 + b * m21, nb = a * m12 + b * m22, nc = c * m11 + e * m21, ne = c * m12 + e * m22;
        a = na, b = nb, c = nc, e = ne;
    }
    const double y0 = std::cos(theta);
    const cd t = 2.0 * y0 / (y0 * a + y0 * y0 * b + c + y0 * e);
    return {t * (a + b * y0) - 1.0, t};
}

/// Received power (W) over a free-space link.
inline double friis(double pt_w, double gt, double gr, double lambda, double d) {
    const double f = lambda / (4.0 * pi * d);
    return pt_w * gt * gr * f * f;
}

}  // namespace oracle
