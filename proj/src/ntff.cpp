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

#include "roughslab/ntff.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace roughslab {

std::string to_string(PatternKind k) {
    switch (k) {
        case PatternKind::Reflection: return "reflection";
        case PatternKind::Transmission: return "transmission";
        case PatternKind::RCS: return "rcs";
    }
    return "reflection";
}

PatternKind pattern_kind_from_string(const std::string& s) {
    if (s == "reflection") return PatternKind::Reflection;
    if (s == "transmission") return PatternKind::Transmission;
    if (s == "rcs") return PatternKind::RCS;
    throw InvalidArgument("unknown pattern kind '" + s + "'");
}

std::vector<double> AngularPattern::magnitudes() const {
    std::vector<double> m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m[i] = std::abs(values[i]);
    return m;
}

void AngularPattern::validate() const {
    if (angles.size() != kPatternSamples || values.size() != kPatternSamples)
        throw InvalidArgument("pattern: expected 181 samples");
    for (const Complex& v : values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidArgument("pattern: non-finite value");
    }
}

std::vector<double> pattern_angles(PatternKind kind) {
    const double start = kind == PatternKind::Transmission ? -90.0 : 90.0;
    std::vector<double> a(kPatternSamples);
    for (int i = 0; i < kPatternSamples; ++i) a[static_cast<std::size_t>(i)] = start + i;
    return a;
}

namespace {

double taper_weight(Taper t, double u) {
    switch (t) {
        case Taper::None: return 1.0;
        case Taper::Hann: return 0.5 * (1.0 - std::cos(2.0 * kPi * u));
        case Taper::Blackman: return 0.42 - 0.5 * std::cos(2.0 * kPi * u) + 0.08 * std::cos(4.0 * kPi * u);
    }
    return 1.0;
}

}  // namespace

std::vector<Complex> far_field(const ProbeLine& line, ProbeSide side, double frequency,
                               std::span<const double> angles_deg, Taper taper) {
    if (line.empty()) throw InvalidArgument("far_field: empty probe line");
    if (line.ey.size() != line.x.size() || line.hx.size() != line.x.size())
        throw InvalidArgument("far_field: probe line arrays differ in length");
    const std::size_t n = line.x.size();
    const double k = 2.0 * kPi * frequency / kC0;
    const double sign = side == ProbeSide::Upper ? -1.0 : 1.0;  // outward normal -z / +z
    const double z = -line.z;  // probe depth in the +z-down frame

    // Trapezoid weights times the optional taper, normalized to unit mean taper.
    std::vector<double> w(n, 0.0);
    double tsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.5;
        const double t = taper_weight(taper, u);
        tsum += t;
        double dx = 0.0;
        if (i > 0) dx += 0.5 * (line.x[i] - line.x[i - 1]);
        if (i + 1 < n) dx += 0.5 * (line.x[i + 1] - line.x[i]);
        w[i] = t * dx;
    }
    const double norm = static_cast<double>(n) / tsum;
    const Complex pre = std::sqrt(Complex(0.0, k / (8.0 * kPi)));

    std::vector<Complex> out(angles_deg.size());
#pragma omp parallel for schedule(static)
    for (std::size_t a = 0; a < angles_deg.size(); ++a) {
        const double th = deg2rad(angles_deg[a]);
        const double st = std::sin(th), ct = std::cos(th);
        Complex L{0.0, 0.0}, N{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            const Complex ph = std::exp(Complex(0.0, k * (line.x[i] * st + z * ct))) * w[i];
            L += sign * line.ey[i] * ph;  // M_x
            N += sign * line.hx[i] * ph;  // J_y
        }
        out[a] = pre * (ct * L - kEta0 * N) * norm;
    }
    return out;
}

std::vector<Complex> far_field(const ProbeRecord& rec, ProbeSide side, std::span<const double> angles_deg,
                               Taper taper) {
    return far_field(side == ProbeSide::Upper ? rec.upper : rec.lower, side, rec.frequency, angles_deg, taper);
}

namespace {

Complex incident_far_field(const ProbeRecord& rec) {
    const double a[1] = {rad2deg(rec.theta_i)};
    const Complex ei = far_field(rec.reference, ProbeSide::Lower, rec.frequency, a)[0];
    const double floor = 1e-12 * std::sqrt(rec.frequency / kC0);
    if (!(std::abs(ei) > floor)) throw InvalidArgument("extract_coefficients: incident field below numerical floor");
    return ei;
}

AngularPattern make_pattern(PatternKind kind, const ProbeRecord& rec) {
    AngularPattern p;
    p.kind = kind;
    p.angles = pattern_angles(kind);
    p.frequency = rec.frequency;
    p.theta_i = rad2deg(rec.theta_i);
    return p;
}

}  // namespace

Coefficients extract_coefficients(const ProbeRecord& rec) {
    Coefficients c;
    c.incident = incident_far_field(rec);
    c.reflection = make_pattern(PatternKind::Reflection, rec);
    c.transmission = make_pattern(PatternKind::Transmission, rec);
    c.reflection.values = far_field(rec, ProbeSide::Upper, c.reflection.angles);
    c.transmission.values = far_field(rec, ProbeSide::Lower, c.transmission.angles);
    for (auto& v : c.reflection.values) v /= c.incident;
    for (auto& v : c.transmission.values) v /= c.incident;
    return c;
}

AngularPattern bistatic_rcs(const ProbeRecord& rec, Taper taper) {
    if (!(rec.incident_amplitude > 0.0)) throw InvalidArgument("bistatic_rcs: incident amplitude must be > 0");
    AngularPattern p = make_pattern(PatternKind::RCS, rec);
    const auto f = far_field(rec, ProbeSide::Upper, p.angles, taper);
    p.values.resize(f.size());
    const double e2 = rec.incident_amplitude * rec.incident_amplitude;
    for (std::size_t i = 0; i < f.size(); ++i) p.values[i] = 2.0 * kPi * std::norm(f[i]) / e2;
    return p;
}

PowerBalance power_balance(const ProbeRecord& rec) {
    // 0.1 degree midpoint rule over each half-plane.
    auto power = [&](const ProbeLine& line, ProbeSide side, double start) {
        std::vector<double> a(1800);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = start + 0.1 * (static_cast<double>(i) + 0.5);
        const auto f = far_field(line, side, rec.frequency, a);
        double s = 0.0;
        for (const Complex& v : f) s += std::norm(v);
        return s * deg2rad(0.1) / (2.0 * kEta0);
    };
    PowerBalance b;
    b.reflected = power(rec.upper, ProbeSide::Upper, 90.0);
    b.transmitted = power(rec.lower, ProbeSide::Lower, -90.0);
    b.incident = power(rec.reference, ProbeSide::Lower, -90.0);
    return b;
}

std::size_t nearest_index(const AngularPattern& p, double angle_deg) {
    if (p.angles.empty()) throw InvalidArgument("nearest_index: empty pattern");
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.angles.size(); ++i) {
        if (std::abs(p.angles[i] - angle_deg) < std::abs(p.angles[best] - angle_deg)) best = i;
    }
    return best;
}

void write_pattern(std::ostream& os, const AngularPattern& p) {
    std::string material = p.material.empty() ? "-" : p.material;
    std::replace(material.begin(), material.end(), ' ', '_');
    os << std::setprecision(10);
    if (!p.scene_digest.empty()) os << "## scene_digest " << p.scene_digest << '\n';
    os << "# " << to_string(p.kind) << ' ' << p.theta_i << ' ' << p.frequency << ' ' << material << ' '
       << p.sigma_h_upper << ' ' << p.sigma_h_lower << ' ' << p.n_realizations << '\n';
    os << std::setprecision(17);
    const double lambda = p.frequency > 0.0 ? kC0 / p.frequency : 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Complex v = p.values[i];
        const double mag = std::abs(v);
        // RCS in dB relative to one wavelength, coefficients in dB of amplitude
        const double db = p.kind == PatternKind::RCS ? 10.0 * std::log10(std::max(v.real() / lambda, 1e-300))
                                                     : 20.0 * std::log10(std::max(mag, 1e-300));
        os << p.angles[i] << ' ' << v.real() << ' ' << v.imag() << ' ' << mag << ' ' << db << '\n';
    }
}

AngularPattern read_pattern(std::istream& is) {
    AngularPattern p;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("##", 0) == 0) {
            std::istringstream ms(line.substr(2));
            std::string key;
            ms >> key;
            if (key == "scene_digest") ms >> p.scene_digest;
            continue;
        }
        if (line[0] == '#') {
            if (have_header) continue;  // sidecar lines such as "# stderr_db_max"
            std::istringstream hs(line.substr(1));
            std::string kind;
            hs >> kind >> p.theta_i >> p.frequency >> p.material >> p.sigma_h_upper >> p.sigma_h_lower >>
                p.n_realizations;
            if (!hs) throw InvalidArgument("pattern file: malformed header");
            p.kind = pattern_kind_from_string(kind);
            have_header = true;
            continue;
        }
        std::istringstream ls(line);
        double th = 0.0, re = 0.0, im = 0.0;
        if (!(ls >> th >> re >> im)) throw InvalidArgument("pattern file: malformed row '" + line + "'");
        p.angles.push_back(th);
        p.values.emplace_back(re, im);
    }
    if (!have_header) throw InvalidArgument("pattern file: missing header");
    p.validate();
    return p;
}

}  // namespace roughslab
