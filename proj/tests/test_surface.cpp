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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "roughslab/rng.hpp"
#include "roughslab/surface.hpp"

using namespace roughslab;

namespace {

SurfaceSpec spec(double sigma, double lc, SpectrumKind kind, std::uint64_t seed) {
    SurfaceSpec s;
    s.n_points = 1024;
    s.spacing = 0.0003;
    s.rms_height = sigma;
    s.corr_length = lc;
    s.kind = kind;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("generated heights are real and reproducible") {
    const auto s = spec(0.002, 0.005, SpectrumKind::Gaussian, 9);
    const auto a = generate_surface(s), b = generate_surface(s);
    CHECK(a.heights == b.heights);
    CHECK(a.max_imag_residue < 1e-12 * s.rms_height);
    CHECK(a.size() == 1024u);
}

TEST_CASE("ensemble rms and correlation length match the spec") {
    for (auto kind : {SpectrumKind::Gaussian, SpectrumKind::Exponential}) {
        double var = 0.0, lc = 0.0;
        const int n = 200;
        for (int i = 0; i < n; ++i) {
            const auto p = generate_surface(spec(0.002, 0.005, kind, 100 + i));
            const auto st = surface_statistics(p);
            var += st.rms * st.rms / n;
            lc += st.corr_length / n;
        }
        CAPTURE(to_string(kind));
        CHECK(std::sqrt(var) == doctest::Approx(0.002).epsilon(0.05));
        CHECK(lc == doctest::Approx(0.005).epsilon(0.2));
    }
}

TEST_CASE("spectrum integrates to the variance") {
    for (auto kind : {SpectrumKind::Gaussian, SpectrumKind::Exponential}) {
        const auto s = spec(0.0015, 0.004, kind, 1);
        // trapezoid over a wide symmetric range; the exponential tail ~1/K^2 is added analytically
        const double kmax = 4e5, dk = 1.0;
        double sum = 0.0;
        for (double k = 0.0; k < kmax; k += dk) sum += 0.5 * dk * (roughness_spectrum(s, k) + roughness_spectrum(s, k + dk));
        sum *= 2.0;
        if (kind == SpectrumKind::Exponential)
            sum += 2.0 * s.rms_height * s.rms_height / (kPi * s.corr_length * kmax);
        CHECK(sum == doctest::Approx(s.rms_height * s.rms_height).epsilon(1e-3));
    }
}

TEST_CASE("spec validation names the field") {
    auto s = spec(-0.001, 0.005, SpectrumKind::Gaussian, 1);
    try {
        s.validate();
        FAIL("expected a throw");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("rms_height") != std::string::npos);
    }
}

TEST_CASE("profile file round trip") {
    const auto p = generate_surface(spec(0.001, 0.005, SpectrumKind::Gaussian, 3));
    std::stringstream ss;
    write_profile(ss, p);
    const auto q = read_profile(ss);
    CHECK(q.heights == p.heights);
    CHECK(q.spec.seed == 3u);
}

TEST_CASE("latin hypercube: one draw per stratum in every column") {
    const int n = 37, dims = 11;
    const auto m = latin_hypercube_seeds(n, dims, 42);
    for (int c = 0; c < dims; ++c) {
        std::vector<int> hits(n, 0);
        for (int r = 0; r < n; ++r) {
            const double u = normal_cdf(m(r, c));
            hits[static_cast<std::size_t>(std::min(n - 1, static_cast<int>(u * n)))]++;
        }
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
    const auto again = latin_hypercube_seeds(n, dims, 42);
    CHECK(again.values == m.values);
}

TEST_CASE("counter rng streams are reproducible and distinct") {
    CounterRng a(5, 0), b(5, 0), c(5, 1);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        CHECK(x != c());
    }
    CounterRng u(1, 2);
    double mean = 0.0;
    for (int i = 0; i < 20000; ++i) mean += u.uniform() / 20000;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("normal quantile inverts the cdf") {
    for (double p : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999}) CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
}
