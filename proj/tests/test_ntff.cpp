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

#include <doctest.h>

#include <cmath>
#include <sstream>

#include <boost/math/special_functions/hankel.hpp>

#include "roughslab/ntff.hpp"

using namespace roughslab;

namespace {

// Ey = H0^(2)(k rho) of a line source at height h above the line z = 0.
ProbeLine line_source_fields(double f, double h, double length, bool with_h = true) {
    const double k = 2.0 * kPi * f / kC0, w = 2.0 * kPi * f, lam = kC0 / f;
    ProbeLine line;
    const double dx = lam / 40.0;
    const int n = static_cast<int>(length / dx);
    for (int i = 0; i < n; ++i) {
        const double x = (i - n / 2) * dx, r = std::hypot(x, h);
        const std::complex<double> e = boost::math::cyl_hankel_2(0, k * r);
        const std::complex<double> de = -k * boost::math::cyl_hankel_2(1, k * r);
        line.x.push_back(x);
        line.ey.push_back(e);
        // Faraday's law, exp(+j w t), z measured downwards
        line.hx.push_back(with_h ? de * (h / r) / std::complex<double>(0.0, w * kMu0) : 0.0);
        line.hz.push_back(-de * (x / r) / std::complex<double>(0.0, w * kMu0));
    }
    return line;
}

}  // namespace

TEST_CASE("line source far field: magnitude and phase") {
    const double f = 28e9, k = 2.0 * kPi * f / kC0, lam = kC0 / f, h = 3.0 * lam;
    const auto line = line_source_fields(f, h, 400.0 * lam);
    std::vector<double> angles;
    for (int a = -60; a <= 60; a += 10) angles.push_back(a);
    const auto ff = far_field(line, ProbeSide::Lower, f, angles);
    for (std::size_t i = 0; i < angles.size(); ++i) {
        // asymptotic Hankel form, source displaced by h against the observation direction
        const std::complex<double> exact = std::sqrt(2.0 / (kPi * k)) * std::exp(std::complex<double>(0.0, kPi / 4)) *
                                           std::exp(std::complex<double>(0.0, -k * h * std::cos(deg2rad(angles[i]))));
        CAPTURE(angles[i]);
        CHECK(std::abs(20.0 * std::log10(std::abs(ff[i]) / std::abs(exact))) < 0.3);
        CHECK(std::abs(std::arg(ff[i] / exact)) < 0.03);
    }
}

TEST_CASE("electric and magnetic currents contribute equally") {
    const double f = 28e9, lam = kC0 / f;
    const auto full = line_source_fields(f, 3.0 * lam, 400.0 * lam);
    const auto half = line_source_fields(f, 3.0 * lam, 400.0 * lam, false);
    const double a[1] = {0.0};
    const auto ff = far_field(full, ProbeSide::Lower, f, a)[0];
    const auto fm = far_field(half, ProbeSide::Lower, f, a)[0];
    CHECK(std::abs(ff) == doctest::Approx(2.0 * std::abs(fm)).epsilon(0.03));
}

TEST_CASE("pattern file round trip") {
    AngularPattern p;
    p.kind = PatternKind::Transmission;
    p.angles = pattern_angles(p.kind);
    for (std::size_t i = 0; i < p.angles.size(); ++i) p.values.emplace_back(std::cos(0.01 * i), std::sin(0.02 * i));
    p.frequency = 28e9;
    p.theta_i = 30.0;
    p.material = "wood";
    p.n_realizations = 5;
    std::stringstream ss;
    write_pattern(ss, p);
    const auto q = read_pattern(ss);
    REQUIRE(q.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(q.values[i] - p.values[i]) < 1e-12);
    CHECK(q.material == "wood");
    CHECK(q.n_realizations == 5);
}

TEST_CASE("pattern angle ranges") {
    CHECK(pattern_angles(PatternKind::Reflection).front() == 90.0);
    CHECK(pattern_angles(PatternKind::Reflection).back() == 270.0);
    CHECK(pattern_angles(PatternKind::Transmission).front() == -90.0);
}
