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

#include "roughslab/media.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

namespace roughslab {

namespace {

// Principal root with Im <= 0 so that exp(-j kz z) decays in lossy media.
Complex decaying_sqrt(Complex z) {
    Complex r = std::sqrt(z);
    if (r.imag() > 0.0) r = -r;
    return r;
}

}  // namespace

void MaterialParams::validate() const {
    if (!std::isfinite(eps_real) || eps_real < 1.0)
        throw InvalidArgument("material '" + name + "': eps_real must be >= 1");
    if (!std::isfinite(cond_coeff) || cond_coeff < 0.0)
        throw InvalidArgument("material '" + name + "': c must be >= 0");
    if (!std::isfinite(cond_exp)) throw InvalidArgument("material '" + name + "': d must be finite");
}

Medium medium_from(double eps_real, double conductivity, double f_hz) {
    Medium m;
    m.conductivity = conductivity;
    const double omega = 2.0 * kPi * f_hz;
    m.eps_r = Complex(eps_real, -conductivity / (kEps0 * omega));
    m.index = std::sqrt(m.eps_r).real();
    return m;
}

Medium medium_at(const MaterialParams& m, double f_ghz) {
    if (!(f_ghz > 0.0)) throw InvalidArgument("medium_at: frequency must be > 0");
    const double sigma = m.cond_coeff == 0.0 ? 0.0 : m.cond_coeff * std::pow(f_ghz, m.cond_exp);
    return medium_from(m.eps_real, sigma, f_ghz * 1e9);
}

PhaseDeviation phase_deviation(double dh, double theta_i, double lambda, double n1, double n2) {
    if (theta_i < 0.0 || theta_i >= kPi / 2)
        throw InvalidArgument("phase_deviation: theta_i must lie in [0, 90) degrees");
    const double s2 = n1 * std::sin(theta_i) / n2;
    if (s2 > 1.0) throw InvalidArgument("phase_deviation: total internal reflection, no real refraction angle");
    const double k = 2.0 * kPi / lambda;
    const double cos2 = std::sqrt(1.0 - s2 * s2);
    return {2.0 * k * dh * std::cos(theta_i), k * dh * (n1 * std::cos(theta_i) - n2 * cos2)};
}

CriticalHeights critical_heights(double theta_i, double lambda, double n1, double n2) {
    if (theta_i < 0.0 || theta_i >= kPi / 2)
        throw InvalidArgument("critical_heights: theta_i must lie in [0, 90) degrees");
    const double s2 = n1 * std::sin(theta_i) / n2;
    if (s2 > 1.0) throw InvalidArgument("critical_heights: total internal reflection, no real refraction angle");
    const double contrast = std::abs(n1 * std::cos(theta_i) - n2 * std::sqrt(1.0 - s2 * s2));
    CriticalHeights h;
    h.reflection = lambda / (8.0 * std::cos(theta_i));
    h.transmission =
        contrast == 0.0 ? std::numeric_limits<double>::infinity() : lambda / (4.0 * contrast);
    return h;
}

Complex halfspace_reflection(const Medium& m, double theta_i, Polarization pol) {
    const double s = std::sin(theta_i);
    const Complex kz1 = std::cos(theta_i);
    const Complex kz2 = decaying_sqrt(m.eps_r - s * s);
    if (pol == Polarization::TE) return (kz1 - kz2) / (kz1 + kz2);
    return (m.eps_r * kz1 - kz2) / (m.eps_r * kz1 + kz2);
}

SlabCoefficients slab_coefficients(const Medium& slab, double thickness, double theta_i,
                                   double f_hz, Polarization pol) {
    const double k0 = 2.0 * kPi * f_hz / kC0;
    const double s = std::sin(theta_i);
    const Complex kz1 = std::cos(theta_i);
    const Complex kz2 = decaying_sqrt(slab.eps_r - s * s);
    // Interface 1 -> 2 and 2 -> 3 (= 1) reflection of the tangential field.
    Complex r12;
    if (pol == Polarization::TE) {
        r12 = (kz1 - kz2) / (kz1 + kz2);
    } else {
        r12 = (slab.eps_r * kz1 - kz2) / (slab.eps_r * kz1 + kz2);
    }
    const Complex r23 = -r12;
    const Complex t12 = 1.0 + r12;
    const Complex t23 = 1.0 + r23;
    const Complex p = std::exp(Complex(0.0, -1.0) * k0 * kz2 * thickness);
    const Complex denom = 1.0 + r12 * r23 * p * p;
    return {(r12 + r23 * p * p) / denom, t12 * t23 * p / denom};
}

MaterialLibrary MaterialLibrary::builtin() {
    MaterialLibrary lib;
    lib.add({"vacuum", 1.0, 0.0, 0.0});
    lib.add({"wood", 1.99, 0.0047, 1.0718});
    lib.add({"plasterboard", 2.94, 0.0116, 0.7076});
    lib.add({"concrete", 5.24, 0.0462, 0.7822});
    lib.add({"glass", 6.31, 0.0036, 1.3394});
    return lib;
}

MaterialLibrary MaterialLibrary::load(std::istream& is) {
    const auto j = nlohmann::json::parse(is);
    if (!j.is_object()) throw InvalidArgument("material library: top level must be an object");
    MaterialLibrary lib;
    for (const auto& [name, v] : j.items()) {
        if (name.rfind("_", 0) == 0) continue;  // comments / metadata
        for (const auto& [key, _] : v.items()) {
            if (key != "eps_real" && key != "c" && key != "d")
                throw InvalidArgument("material '" + name + "': unknown key '" + key + "'");
        }
        MaterialParams m{name, v.at("eps_real").get<double>(), v.value("c", 0.0), v.value("d", 0.0)};
        lib.add(m);
    }
    return lib;
}

void MaterialLibrary::save(std::ostream& os) const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, m] : table_) {
        j[name] = {{"eps_real", m.eps_real}, {"c", m.cond_coeff}, {"d", m.cond_exp}};
    }
    os << j.dump(2) << '\n';
}

void MaterialLibrary::add(const MaterialParams& m) {
    m.validate();
    table_[m.name] = m;
}

const MaterialParams& MaterialLibrary::get(const std::string& name) const {
    auto it = table_.find(name);
    if (it == table_.end()) throw InvalidArgument("unknown material '" + name + "'");
    return it->second;
}

}  // namespace roughslab
