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
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "roughslab/sbr.hpp"

using namespace roughslab;

namespace {

double dbm(double w) { return 10.0 * std::log10(w * 1e3); }

ScatterModel directive(PatternKind kind, double a0, double a, double sigma_h) {
    ScatterModel m;
    m.family = Family::Directive;
    m.kind = kind;
    m.theta_i = 30.0;
    m.sigma_h = sigma_h;
    m.main = {Family::Directive, a0, a, 0.0, 1.0, kind == PatternKind::Reflection ? 150.0 : 30.0};
    return m;
}

Surface plaster_slab() {
    Surface s;
    s.name = "pb";
    s.kind = SurfaceKind::Slab;
    s.material = "plasterboard";
    s.medium = medium_at(MaterialLibrary::builtin().get("plasterboard"), 28.0);
    s.thickness = 0.1;
    return s;
}

Wall wall(int axis, double at, Vec3 lo, Vec3 hi, int surface = 0) {
    Wall w;
    w.name = "w" + std::to_string(axis) + "_" + std::to_string(at);
    w.axis = axis;
    w.at = at;
    lo[axis] = hi[axis] = at;
    w.lo = lo;
    w.hi = hi;
    w.surface = surface;
    return w;
}

// Small room with a partition, used by the path properties.
RayScene room() {
    RayScene s;
    s.tx.position = {1.0, 1.5, 1.5};
    s.tx.boresight = {1.0, 0.3, 0.0};
    s.tx.exponent = 4.0;
    Surface c;
    c.name = "concrete";
    c.material = "concrete";
    c.medium = medium_at(MaterialLibrary::builtin().get("concrete"), 28.0);
    s.surfaces = {c, plaster_slab()};
    s.walls = {wall(0, 0.0, {0, 0, 0}, {0, 6, 3}), wall(0, 8.0, {0, 0, 0}, {0, 6, 3}),
               wall(1, 0.0, {0, 0, 0}, {8, 0, 3}), wall(1, 6.0, {0, 0, 0}, {8, 6, 3}),
               wall(2, 0.0, {0, 0, 0}, {8, 6, 0}), wall(2, 3.0, {0, 0, 0}, {8, 6, 0}),
               wall(0, 4.0, {0, 0, 0}, {0, 4, 3}, 1)};
    s.grid = {0.0, 8.0, 0.0, 6.0, 0.5, 1.5};
    return s;
}

}  // namespace

TEST_CASE("cosine-power gain examples") {
    CHECK(antenna_gain(0.0, 100.0) == doctest::Approx(202.0));
    CHECK(10.0 * std::log10(antenna_gain(0.0, 100.0)) == doctest::Approx(23.05).epsilon(1e-3));
    CHECK(antenna_gain(kPi / 2, 100.0) == doctest::Approx(0.0));
    CHECK(antenna_gain(0.7, 0.0) == doctest::Approx(2.0));
    CHECK(antenna_gain(2.0, 0.0) == 0.0);
    CHECK(dipole_gain(kPi / 2) == doctest::Approx(1.64));
}

TEST_CASE("icosphere partitions the sphere") {
    for (int k = 0; k <= 5; ++k) {
        const auto t = icosphere(k);
        CHECK(t.size() == static_cast<std::size_t>(20 * (1 << (2 * k))));
        double sum = 0.0;
        for (const auto& tri : t) sum += tri.solid_angle();
        CHECK(std::abs(sum - 4.0 * kPi) < 1e-9);
    }
}

TEST_CASE("launched power equals the pattern integral") {
    for (double n : {2.0, 20.0, 100.0}) {
        // independent quadrature of G over the sphere / 4 pi
        double integral = 0.0;
        const int m = 200000;
        for (int i = 0; i < m; ++i) {
            const double th = (i + 0.5) * (kPi / 2) / m;
            integral += 2.0 * (n + 1.0) * std::pow(std::cos(th), n) * std::sin(th) * (kPi / 2) / m;
        }
        integral *= 2.0 * kPi / (4.0 * kPi);
        for (int level = 3; level <= 6; ++level) {
            RayScene s;
            s.tx.exponent = n;
            s.grid = {0.0, 1.0, 0.0, 1.0, 1.0, 1.5};
            TraceOptions o;
            o.subdivision = level;
            o.launch_cull = 0.0;
            const auto r = trace(s, {Vec3(5, 0, 0)}, o);
            CAPTURE(n);
            CAPTURE(level);
            CHECK(r.stats.launched_power == doctest::Approx(0.1 * integral).epsilon(0.01));
        }
    }
}

TEST_CASE("free-space map equals the Friis link budget") {
    RayScene s;
    s.tx.position = {0.0, 0.0, 1.5};
    s.tx.exponent = 100.0;
    s.grid = {1.0, 15.0, -4.0, 4.0, 0.25, 1.5};
    TraceOptions o;
    o.launch_cull = 0.0;
    const auto g = rss_map(s, o);
    const auto pts = s.grid.points();
    int checked = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec3 d = pts[i] - s.tx.position;
        const double c = d.x() / d.norm();
        const double gt = 202.0 * std::pow(c, 100);
        const double ref = dbm(oracle::friis(0.1, gt, 1.64, kC0 / 28e9, d.norm()));
        REQUIRE(std::isfinite(g.rss_dbm[i]));
        CHECK(std::abs(g.rss_dbm[i] - ref) < 0.1);
        ++checked;
    }
    CHECK(checked == static_cast<int>(pts.size()));

    // boresight, 10 m
    const auto r = trace(s, {Vec3(10.0, 0.0, 1.5)}, o);
    const double want = 20.0 + 10 * std::log10(202.0) + 10 * std::log10(1.64) + 20 * std::log10(kC0 / 28e9 / (4 * kPi * 10.0));
    CHECK(dbm(r.receivers[0].power_w) == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("single wall reflection uses the image-source distance") {
    RayScene s;
    s.tx.position = {0.0, 3.0, 1.5};
    s.tx.boresight = {0.3, -1.0, 0.0};
    s.tx.exponent = 2.0;
    s.surfaces = {plaster_slab()};
    s.walls = {wall(1, 0.0, {-50, 0, -50}, {50, 0, 50})};
    s.limits = {1, 0, 0};
    s.grid = {0.0, 1.0, 0.0, 1.0, 1.0, 1.5};
    TraceOptions o;
    o.keep_paths = true;
    const Vec3 rx(4.0, 2.0, 1.5);
    const auto r = trace(s, {rx}, o);
    int reflections = 0;
    for (const auto& p : r.receivers[0].paths) {
        if (p.events.size() != 1) continue;
        ++reflections;
        double len = 0.0;
        for (std::size_t i = 0; i + 1 < p.points.size(); ++i) len += (p.points[i + 1] - p.points[i]).norm();
        const Vec3 image(0.0, -3.0, 1.5);
        CHECK(std::abs(len - (rx - image).norm()) < 1e-9);
        CHECK(std::abs(p.points[1].y()) < 1e-12);
    }
    CHECK(reflections == 1);
}

TEST_CASE("flat slab coefficients are the transfer-matrix values") {
    RayScene s;
    s.surfaces = {plaster_slab()};
    s.walls = {wall(1, 0.0, {-5, 0, 0}, {5, 0, 3})};
    const Medium& m = s.surfaces[0].medium;
    for (double deg : {30.0, 45.0, 60.0}) {
        const double th = deg2rad(deg);
        const auto ref = oracle::te_layer(oracle::permittivity(m.eps_real(), m.conductivity, 28e9), 0.1, th, 28e9);
        const Complex r = interaction_coefficient(s, s.walls[0], EventType::Reflect, th, TraceMode::Flat);
        const Complex t = interaction_coefficient(s, s.walls[0], EventType::Transmit, th, TraceMode::Flat);
        CHECK(std::abs(r - ref.r) < 1e-10);
        // thin-plane insertion adds the free-space phase across the thickness
        const double k0 = 2 * kPi * 28e9 / kC0;
        CHECK(std::abs(t - ref.t * std::exp(Complex(0.0, k0 * 0.1 * std::cos(th)))) < 1e-10);
    }
}

TEST_CASE("accepted paths are exact specular polylines") {
    const RayScene s = room();
    TraceOptions o;
    o.subdivision = 5;
    o.keep_paths = true;
    const auto pts = s.grid.points();
    std::vector<Vec3> rx;
    for (std::size_t i = 0; i < pts.size(); i += 7) rx.push_back(pts[i]);
    const auto r = trace(s, rx, o);
    long checked = 0;
    for (std::size_t k = 0; k < rx.size(); ++k) {
        for (const auto& p : r.receivers[k].paths) {
            REQUIRE(p.points.size() == p.events.size() + 2);
            CHECK((p.points.front() - s.tx.position).norm() < 1e-12);
            CHECK((p.points.back() - rx[k]).norm() < 1e-12);
            for (std::size_t j = 0; j < p.events.size(); ++j) {
                const Wall& w = s.walls[p.events[j].wall];
                const Vec3& h = p.points[j + 1];
                CHECK(std::abs(h[w.axis] - w.at) < 1e-9);
                CHECK(w.contains(h, 1e-9));
                const Vec3 a = (h - p.points[j]).normalized(), b = (p.points[j + 2] - h).normalized();
                for (int ax = 0; ax < 3; ++ax) {
                    const bool reflect = p.events[j].type == EventType::Reflect;
                    const double want = (ax == w.axis && reflect) ? -a[ax] : a[ax];
                    CHECK(std::abs(b[ax] - want) < 1e-9);
                }
            }
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("raising the bounce budget never loses paths") {
    RayScene s = room();
    TraceOptions o;
    o.subdivision = 5;
    o.keep_paths = true;
    const auto pts = s.grid.points();
    std::vector<Vec3> rx;
    for (std::size_t i = 0; i < pts.size(); i += 11) rx.push_back(pts[i]);
    std::vector<std::set<std::vector<Event>>> prev;
    for (int refl = 0; refl <= 3; ++refl) {
        s.limits = {refl, 1, 0};
        const auto r = trace(s, rx, o);
        std::vector<std::set<std::vector<Event>>> now(rx.size());
        for (std::size_t k = 0; k < rx.size(); ++k)
            for (const auto& p : r.receivers[k].paths) now[k].insert(p.events);
        for (std::size_t k = 0; k < prev.size(); ++k)
            for (const auto& e : prev[k]) CHECK(now[k].count(e) == 1);
        prev = std::move(now);
    }
}

TEST_CASE("coherent sum is bounded by the sum of path amplitudes") {
    const RayScene s = room();
    TraceOptions o;
    o.subdivision = 5;
    o.keep_paths = true;
    const auto pts = s.grid.points();
    const auto r = trace(s, pts, o);
    for (const auto& rr : r.receivers) {
        double sum = 0.0;
        for (const auto& p : rr.paths) sum += std::abs(p.amplitude);
        CHECK(std::sqrt(rr.power_w) <= sum * (1.0 + 1e-12) + 1e-300);
    }
}

TEST_CASE("results do not depend on the thread count") {
    const RayScene s = room();
    TraceOptions o;
    o.subdivision = 4;
    const auto a = rss_map(s, o);
    o.jobs = 3;
    const auto b = rss_map(s, o);
    REQUIRE(a.rss_dbm.size() == b.rss_dbm.size());
    for (std::size_t i = 0; i < a.rss_dbm.size(); ++i) {
        if (std::isfinite(a.rss_dbm[i])) CHECK(a.rss_dbm[i] == b.rss_dbm[i]);
        CHECK(a.path_count[i] == b.path_count[i]);
    }
}

TEST_CASE("smooth-surface models reproduce the flat map") {
    RayScene s = room();
    Surface rough = plaster_slab();
    rough.kind = SurfaceKind::RoughSlab;
    rough.reflection = {{30.0, directive(PatternKind::Reflection, 0.3, 1000, 0.0)}};
    rough.transmission = {{30.0, directive(PatternKind::Transmission, 0.2, 1500, 0.0)}};
    s.surfaces[1] = rough;
    TraceOptions o;
    o.subdivision = 4;
    const auto flat = rss_map(s, o);
    o.mode = TraceMode::AttenuationOnly;
    const auto att = rss_map(s, o);
    o.mode = TraceMode::WithDiffuse;
    const auto dif = rss_map(s, o);
    for (std::size_t i = 0; i < flat.rss_dbm.size(); ++i) {
        if (!std::isfinite(flat.rss_dbm[i])) continue;
        CHECK(att.rss_dbm[i] == flat.rss_dbm[i]);
        CHECK(dif.rss_dbm[i] == flat.rss_dbm[i]);
    }
}

TEST_CASE("diffuse power from a lambertian wall matches the wall integral") {
    RayScene s;
    s.tx.position = {0.0, 3.0, 0.0};
    s.tx.boresight = {0.5, -0.8660254037844386, 0.0};
    s.tx.exponent = 2.0;
    ScatterModel lr;
    lr.family = Family::Lambertian;
    lr.kind = PatternKind::Reflection;
    lr.theta_i = 30.0;
    lr.sigma_h = 0.006;
    lr.main = {Family::Lambertian, 0.05, 0, 0, 1, 0};
    ScatterModel lt = lr;
    lt.kind = PatternKind::Transmission;
    Surface pb = plaster_slab();
    pb.kind = SurfaceKind::RoughSlab;
    pb.reflection = {{30.0, lr}};
    pb.transmission = {{30.0, lt}};
    pb.aperture_wavelengths = 20.0;
    s.surfaces = {pb};
    s.walls = {wall(1, 0.0, {-40, 0, -40}, {40, 0, 40})};
    TraceOptions o;
    o.mode = TraceMode::WithDiffuse;
    o.launch_cull = 0.0;
    o.keep_paths = true;
    const double lam = s.wavelength(), beam = 1.0 / (20.0 * std::cos(deg2rad(30.0)));
    for (const Vec3& rx : {Vec3(4, 2, 0), Vec3(-1, 1.5, 0), Vec3(2, 5, 0)}) {
        const auto r = trace(s, {rx}, o);
        double traced = 0.0;
        for (const auto& p : r.receivers[0].paths)
            if (!p.coherent) traced += p.power / 1.64;
        // 2-D wall integral: in-plane cylindrical spread from each wall point,
        // out-of-plane spread specular from the source
        double ref = 0.0;
        const double dx = 2e-4;
        for (double x = -40.0; x < 40.0; x += dx) {
            const Vec3 p(x + 0.5 * dx, 0.0, 0.0);
            const Vec3 d = p - s.tx.position, e = rx - p;
            const double r1 = d.norm(), r2 = e.norm();
            const double c = d.dot(s.tx.boresight) / r1;
            const double gt = c > 0 ? 6.0 * c * c : 0.0;
            const double si = 0.1 * gt / (4 * kPi * r1 * r1), ci = std::abs(d.y()) / r1;
            // pattern turned rigidly with the incidence angle
            const double sg = d.x() < 0 ? -1.0 : 1.0;
            const double ti = rad2deg(std::atan2(sg * d.x(), std::abs(d.y())));
            const double ph = 180.0 - rad2deg(std::atan2(sg * e.x(), std::abs(e.y())));
            const double amp = eval_model(lr, ph + ti - 30.0);
            const double a2 = amp * amp;
            ref += dx * si * ci * a2 * r1 / (beam * r2 * (r1 + r2)) * lam * lam / (4 * kPi);
        }
        CAPTURE(rx.transpose());
        CHECK(std::abs(10 * std::log10(traced / ref)) < 0.5);
    }
}

TEST_CASE("a pure specular directive model spreads no extra power") {
    // aperture chosen so that the lobe integral equals one reference beam
    const double a = 5000.0;
    const double ap = 1.0 / (std::cos(deg2rad(30.0)) * std::sqrt(4.0 * kPi / a));
    RayScene s;
    s.tx.position = {0.0, 0.0, 1.5};
    s.tx.boresight = {1.0, 0.0, 0.0};
    s.tx.exponent = 2.0;
    Surface pb = plaster_slab();
    pb.kind = SurfaceKind::RoughSlab;
    pb.aperture_wavelengths = ap;
    pb.reflection = {{30.0, directive(PatternKind::Reflection, 0.3, a, 0.003)}};
    pb.transmission = {{30.0, directive(PatternKind::Transmission, 0.2, a, 0.003)}};
    s.surfaces = {pb};
    s.walls = {wall(0, 3.0, {0, -30, -30}, {0, 30, 30})};
    s.grid = {4.0, 10.0, -5.0, 5.0, 0.5, 1.5};
    TraceOptions o;
    o.mode = TraceMode::AttenuationOnly;
    const auto spec = rss_map(s, o);
    o.mode = TraceMode::WithDiffuse;
    o.specular_fwhm_deg = 0.0;  // force the fan
    const auto fan = rss_map(s, o);
    CHECK(fan.stats.children > 0);
    const double ms = spec.mean_dbm(4, 10, -5, 5), mf = fan.mean_dbm(4, 10, -5, 5);
    CHECK(std::abs(ms - mf) < 0.5);
}

TEST_CASE("directive lobe width") {
    CHECK(directive_fwhm(1000.0) == doctest::Approx(6.0).epsilon(0.01));
    CHECK(directive_fwhm(15.0) == doctest::Approx(49.0).epsilon(0.02));
    CHECK(fan_kind(directive(PatternKind::Reflection, 0.3, 1000, 0.001), 12.0) == FanKind::None);
    CHECK(fan_kind(directive(PatternKind::Reflection, 0.3, 15, 0.006), 12.0) == FanKind::Full);
}

TEST_CASE("rss file round trip keeps no-path points") {
    RssGrid g;
    g.grid = {0.0, 1.0, 0.0, 0.5, 0.5, 1.5};
    g.rss_dbm = {-40.5, -std::numeric_limits<double>::infinity()};
    g.path_count = {3, 0};
    g.mode = TraceMode::WithDiffuse;
    std::stringstream ss;
    write_rss(ss, g);
    CHECK(ss.str().find("nopath") != std::string::npos);
    const auto h = read_rss(ss);
    CHECK(h.mode == TraceMode::WithDiffuse);
    CHECK(h.rss_dbm[0] == doctest::Approx(-40.5));
    CHECK(std::isinf(h.rss_dbm[1]));
    CHECK(h.path_count == g.path_count);
}

TEST_CASE("missing model file is reported against the wall") {
    const std::string scene = R"({
      "frequency_ghz": 28,
      "transmitter": {"position": [1, 1, 1.5], "boresight": [1, 0, 0], "power_dbm": 20, "exponent": 100},
      "receivers": {"x": [0, 4], "y": [0, 4]},
      "surfaces": {"pb": {"kind": "rough_slab", "material": "plasterboard", "thickness": 0.1,
                          "reflection": {"30": "nowhere_r.model"}, "transmission": {"30": "nowhere_t.model"}}},
      "walls": [{"name": "divider", "surface": "pb", "from": [2, 0], "to": [2, 4], "z": [0, 3]}]
    })";
    std::istringstream is(scene);
    try {
        parse_scene(is, std::filesystem::temp_directory_path(), MaterialLibrary::builtin());
        FAIL("expected a throw");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("divider") != std::string::npos);
    }
}

TEST_CASE("scene parser rejects unknown keys") {
    const std::string scene = R"({"frequency_ghz": 28, "colour": 1,
      "transmitter": {"position": [1, 1, 1.5], "boresight": [1, 0, 0]},
      "receivers": {"x": [0, 4], "y": [0, 4]}, "surfaces": {}, "walls": []})";
    std::istringstream is(scene);
    CHECK_THROWS_AS(parse_scene(is, ".", MaterialLibrary::builtin()), InvalidArgument);
}
