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

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "roughslab/sbr.hpp"

namespace roughslab {

using nlohmann::json;

double antenna_gain(double theta, double exponent) {
    const double c = std::cos(theta);
    if (c <= 0.0) return 0.0;
    return 2.0 * (exponent + 1.0) * std::pow(c, exponent);
}

double dipole_gain(double theta) {
    const double s = std::sin(theta);
    return 1.64 * s * s;
}

double Transmitter::gain_towards(const Vec3& dir) const {
    const double c = std::clamp(dir.normalized().dot(boresight.normalized()), -1.0, 1.0);
    return antenna_gain(std::acos(c), exponent);
}

bool Wall::contains(const Vec3& p, double tol) const {
    for (int d = 0; d < 3; ++d) {
        if (d == axis) continue;
        if (p[d] < lo[d] - tol || p[d] > hi[d] + tol) return false;
    }
    return true;
}

int ReceiverGrid::nx() const { return std::max(1, static_cast<int>(std::floor((x1 - x0) / spacing + 1e-9))); }
int ReceiverGrid::ny() const { return std::max(1, static_cast<int>(std::floor((y1 - y0) / spacing + 1e-9))); }

std::vector<Vec3> ReceiverGrid::points() const {
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(nx()) * ny());
    for (int j = 0; j < ny(); ++j)
        for (int i = 0; i < nx(); ++i) pts.emplace_back(x0 + (i + 0.5) * spacing, y0 + (j + 0.5) * spacing, height);
    return pts;
}

void RayScene::validate() const {
    if (!(frequency > 0.0)) throw InvalidArgument("scene: frequency must be positive");
    if (!(tx.boresight.norm() > 0.0)) throw InvalidArgument("scene: boresight must be non-zero");
    if (!(tx.exponent >= 0.0)) throw InvalidArgument("scene: beam exponent must be >= 0");
    if (limits.reflections < 0 || limits.transmissions < 0 || limits.diffuse < 0 || limits.diffuse > 1)
        throw InvalidArgument("scene: bounce limits must be >= 0 and diffuse <= 1");
    if (!(grid.spacing > 0.0) || !(grid.x1 > grid.x0) || !(grid.y1 > grid.y0))
        throw InvalidArgument("scene: receiver grid is empty");
    for (const auto& w : walls) {
        if (w.surface < 0 || w.surface >= static_cast<int>(surfaces.size()))
            throw InvalidArgument("scene: wall '" + w.name + "' has no surface");
        if (w.axis < 0 || w.axis > 2) throw InvalidArgument("scene: wall '" + w.name + "' bad axis");
    }
    for (const auto& s : surfaces) {
        if (s.kind != SurfaceKind::Halfspace && !(s.thickness > 0.0))
            throw InvalidArgument("scene: surface '" + s.name + "' needs a positive thickness");
        if (s.kind == SurfaceKind::RoughSlab && (s.reflection.empty() || s.transmission.empty()))
            throw InvalidArgument("scene: rough surface '" + s.name + "' needs reflection and transmission models");
        if (!(s.aperture_wavelengths > 0.0)) throw InvalidArgument("scene: aperture_wavelengths must be positive");
    }
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw InvalidArgument(where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!ok.count(k)) throw InvalidArgument(where + ": unknown key '" + k + "'");
}

Vec3 vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw InvalidArgument(where + ": expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::array<double, 2> pair2(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw InvalidArgument(where + ": expected a pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<ModelBin> load_bins(const json& j, const std::filesystem::path& base, PatternKind kind,
                                const std::string& where) {
    if (!j.is_object()) throw InvalidArgument(where + ": expected { angle: model_file }");
    std::vector<ModelBin> bins;
    for (const auto& [angle, file] : j.items()) {
        ModelBin b;
        try {
            b.theta_deg = std::stod(angle);
        } catch (const std::exception&) {
            throw InvalidArgument(where + ": bad incidence angle '" + angle + "'");
        }
        const std::filesystem::path p = base / file.get<std::string>();
        std::ifstream is(p);
        if (!is) throw InvalidArgument(where + ": cannot open model '" + p.string() + "'");
        b.model = read_model(is);
        if (b.model.kind != kind) throw InvalidArgument(where + ": model '" + p.string() + "' has the wrong kind");
        bins.push_back(std::move(b));
    }
    std::sort(bins.begin(), bins.end(), [](const ModelBin& a, const ModelBin& b) { return a.theta_deg < b.theta_deg; });
    return bins;
}

}  // namespace

RayScene parse_scene(std::istream& is, const std::filesystem::path& base_dir, const MaterialLibrary& materials) {
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("scene: ") + e.what());
    }
    try {
        check_keys(j, {"frequency_ghz", "transmitter", "limits", "receivers", "surfaces", "walls"}, "scene");
        RayScene s;
        s.frequency = j.at("frequency_ghz").get<double>() * 1e9;

        const auto& t = j.at("transmitter");
        check_keys(t, {"position", "boresight", "power_dbm", "exponent"}, "transmitter");
        s.tx.position = vec3(t.at("position"), "transmitter.position");
        s.tx.boresight = vec3(t.at("boresight"), "transmitter.boresight");
        s.tx.power_dbm = t.value("power_dbm", 20.0);
        s.tx.exponent = t.value("exponent", 100.0);

        if (j.contains("limits")) {
            const auto& l = j["limits"];
            check_keys(l, {"reflections", "transmissions", "diffuse"}, "limits");
            s.limits.reflections = l.value("reflections", 4);
            s.limits.transmissions = l.value("transmissions", 2);
            s.limits.diffuse = l.value("diffuse", 1);
        }

        const auto& r = j.at("receivers");
        check_keys(r, {"x", "y", "spacing", "height"}, "receivers");
        const auto rx = pair2(r.at("x"), "receivers.x");
        const auto ry = pair2(r.at("y"), "receivers.y");
        s.grid = {rx[0], rx[1], ry[0], ry[1], r.value("spacing", 0.25), r.value("height", 1.5)};

        std::map<std::string, int> index;
        std::map<std::string, std::string> broken;
        for (const auto& [name, sj] : j.at("surfaces").items()) {
            check_keys(sj, {"kind", "material", "thickness", "reflection", "transmission", "aperture_wavelengths"},
                       "surface " + name);
            Surface sf;
            sf.name = name;
            const std::string kind = sj.at("kind").get<std::string>();
            if (kind == "halfspace") sf.kind = SurfaceKind::Halfspace;
            else if (kind == "slab") sf.kind = SurfaceKind::Slab;
            else if (kind == "rough_slab") sf.kind = SurfaceKind::RoughSlab;
            else throw InvalidArgument("surface " + name + ": unknown kind '" + kind + "'");
            sf.material = sj.at("material").get<std::string>();
            sf.medium = medium_at(materials.get(sf.material), s.frequency / 1e9);
            sf.thickness = sj.value("thickness", 0.0);
            sf.aperture_wavelengths = sj.value("aperture_wavelengths", 18.0);
            if (sf.kind == SurfaceKind::RoughSlab) {
                // Reported against the first wall that uses the surface.
                try {
                    sf.reflection =
                        load_bins(sj.at("reflection"), base_dir, PatternKind::Reflection, "surface " + name);
                    sf.transmission =
                        load_bins(sj.at("transmission"), base_dir, PatternKind::Transmission, "surface " + name);
                } catch (const InvalidArgument& e) {
                    broken[name] = e.what();
                }
            } else if (sj.contains("reflection") || sj.contains("transmission")) {
                throw InvalidArgument("surface " + name + ": models are only allowed on rough_slab");
            }
            index[name] = static_cast<int>(s.surfaces.size());
            s.surfaces.push_back(std::move(sf));
        }

        for (const auto& wj : j.at("walls")) {
            Wall w;
            w.name = wj.value("name", std::string("wall") + std::to_string(s.walls.size()));
            const std::string surf = wj.at("surface").get<std::string>();
            if (!index.count(surf)) throw InvalidArgument("wall " + w.name + ": unknown surface '" + surf + "'");
            if (broken.count(surf)) throw InvalidArgument("wall " + w.name + ": " + broken[surf]);
            w.surface = index[surf];
            if (wj.contains("from")) {
                check_keys(wj, {"name", "surface", "from", "to", "z"}, "wall " + w.name);
                const auto a = pair2(wj.at("from"), "wall.from");
                const auto b = pair2(wj.at("to"), "wall.to");
                const auto z = pair2(wj.at("z"), "wall.z");
                if (a[0] == b[0]) {
                    w.axis = 0;
                    w.at = a[0];
                } else if (a[1] == b[1]) {
                    w.axis = 1;
                    w.at = a[1];
                } else {
                    throw InvalidArgument("wall " + w.name + ": only axis-aligned walls are supported");
                }
                w.lo = {std::min(a[0], b[0]), std::min(a[1], b[1]), std::min(z[0], z[1])};
                w.hi = {std::max(a[0], b[0]), std::max(a[1], b[1]), std::max(z[0], z[1])};
            } else {
                check_keys(wj, {"name", "surface", "z_at", "x", "y"}, "wall " + w.name);
                const auto x = pair2(wj.at("x"), "wall.x");
                const auto y = pair2(wj.at("y"), "wall.y");
                w.axis = 2;
                w.at = wj.at("z_at").get<double>();
                w.lo = {std::min(x[0], x[1]), std::min(y[0], y[1]), w.at};
                w.hi = {std::max(x[0], x[1]), std::max(y[0], y[1]), w.at};
            }
            w.lo[w.axis] = w.hi[w.axis] = w.at;
            s.walls.push_back(std::move(w));
        }
        if (!broken.empty()) throw InvalidArgument(broken.begin()->second);
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("scene: ") + e.what());
    }
}

RayScene load_scene(const std::filesystem::path& path, const MaterialLibrary& materials) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("cannot open scene '" + path.string() + "'");
    return parse_scene(is, path.parent_path(), materials);
}

std::string to_string(TraceMode m) {
    switch (m) {
        case TraceMode::Flat: return "flat";
        case TraceMode::AttenuationOnly: return "attenuation_only";
        case TraceMode::WithDiffuse: return "with_diffuse";
    }
    return "flat";
}

TraceMode trace_mode_from_string(const std::string& s) {
    if (s == "flat") return TraceMode::Flat;
    if (s == "attenuation_only") return TraceMode::AttenuationOnly;
    if (s == "with_diffuse") return TraceMode::WithDiffuse;
    throw InvalidArgument("unknown trace mode '" + s + "'");
}

double directive_fwhm(double a) {
    // ((1 + cos psi) / 2)^a = 1/2
    const double half = 2.0 * std::acos(std::pow(0.5, 0.5 / a));
    return rad2deg(2.0 * half);
}

namespace {

bool narrow(const ModelComponent& c, double fwhm) {
    return c.family == Family::Directive && directive_fwhm(c.a_a) <= fwhm;
}

}  // namespace

FanKind fan_kind(const ScatterModel& m, double specular_fwhm_deg) {
    if (m.sigma_h <= 0.0) return FanKind::None;
    if (m.family == Family::HybridDirective)
        return narrow(m.diffuse, specular_fwhm_deg) ? FanKind::None : FanKind::DiffuseOnly;
    return narrow(m.main, specular_fwhm_deg) ? FanKind::None : FanKind::Full;
}

const ModelBin& nearest_bin(const std::vector<ModelBin>& bins, double theta_deg) {
    if (bins.empty()) throw InvalidArgument("nearest_bin: no models");
    const ModelBin* best = &bins.front();
    for (const auto& b : bins)
        if (std::abs(b.theta_deg - theta_deg) < std::abs(best->theta_deg - theta_deg)) best = &b;
    return *best;
}

Complex interaction_coefficient(const RayScene& scene, const Wall& wall, EventType type, double theta,
                                TraceMode mode) {
    const Surface& s = scene.surfaces[wall.surface];
    const Polarization pol = wall.vertical() ? Polarization::TE : Polarization::TM;
    const bool reflect = type == EventType::Reflect || type == EventType::ReflectSpecular;
    if (s.kind == SurfaceKind::Halfspace) return reflect ? halfspace_reflection(s.medium, theta, pol) : Complex{};

    const SlabCoefficients c = slab_coefficients(s.medium, s.thickness, theta, scene.frequency, pol);
    const double k0 = 2.0 * kPi / scene.wavelength();
    // The thin-plane geometry counts the wall thickness as free-space path.
    const Complex flat = reflect ? c.reflection
                                 : c.transmission * std::exp(Complex(0.0, k0 * s.thickness * std::cos(theta)));
    if (s.kind == SurfaceKind::Slab || mode == TraceMode::Flat) return flat;

    const ModelBin& bin = nearest_bin(reflect ? s.reflection : s.transmission, rad2deg(theta));
    const ScatterModel& m = bin.model;
    if (m.sigma_h <= 0.0) return flat;
    double mag = m.specular_amplitude();
    if ((type == EventType::ReflectSpecular || type == EventType::TransmitSpecular) &&
        m.family == Family::HybridDirective) {
        const double spec = m.kind == PatternKind::Transmission ? m.theta_i : 180.0 - m.theta_i;
        mag = eval_component(m.specular, m.kind, spec);
    }
    const double a = std::abs(flat);
    return a > 0.0 ? flat * (mag / a) : Complex(mag, 0.0);
}

double triangle_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = std::abs(a.dot(b.cross(c)));
    const double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    return 2.0 * std::atan2(num, den);
}

double SphereTriangle::solid_angle() const { return triangle_solid_angle(a, b, c); }

std::vector<SphereTriangle> icosphere(int subdivision) {
    if (subdivision < 0 || subdivision > 9) throw InvalidArgument("icosphere: subdivision must be in [0, 9]");
    const double p = (1.0 + std::sqrt(5.0)) / 2.0;
    const std::array<Vec3, 12> v = {Vec3(-1, p, 0), Vec3(1, p, 0),  Vec3(-1, -p, 0), Vec3(1, -p, 0),
                                    Vec3(0, -1, p), Vec3(0, 1, p),  Vec3(0, -1, -p), Vec3(0, 1, -p),
                                    Vec3(p, 0, -1), Vec3(p, 0, 1),  Vec3(-p, 0, -1), Vec3(-p, 0, 1)};
    const int f[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                          {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                          {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    // Generic fixed orientation: no edge or vertex lies on a coordinate plane.
    const Eigen::Matrix3d rot = (Eigen::AngleAxisd(0.3710, Vec3::UnitZ()) * Eigen::AngleAxisd(0.5290, Vec3::UnitY()) *
                                 Eigen::AngleAxisd(0.2170, Vec3::UnitX()))
                                    .toRotationMatrix();
    std::vector<SphereTriangle> tris;
    for (const auto& t : f)
        tris.push_back({rot * v[t[0]].normalized(), rot * v[t[1]].normalized(), rot * v[t[2]].normalized()});
    for (int s = 0; s < subdivision; ++s) {
        std::vector<SphereTriangle> next;
        next.reserve(tris.size() * 4);
        for (const auto& t : tris) {
            const Vec3 ab = (t.a + t.b).normalized(), bc = (t.b + t.c).normalized(), ca = (t.c + t.a).normalized();
            next.push_back({t.a, ab, ca});
            next.push_back({ab, t.b, bc});
            next.push_back({ca, bc, t.c});
            next.push_back({ab, bc, ca});
        }
        tris.swap(next);
    }
    return tris;
}

double RssGrid::mean_dbm(double x0, double x1, double y0, double y1) const {
    const auto pts = grid.points();
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].x() < x0 || pts[i].x() > x1 || pts[i].y() < y0 || pts[i].y() > y1) continue;
        ++n;
        if (std::isfinite(rss_dbm[i])) sum += std::pow(10.0, rss_dbm[i] / 10.0);
    }
    if (n == 0) throw InvalidArgument("mean_dbm: region holds no receivers");
    return sum > 0.0 ? 10.0 * std::log10(sum / n) : -std::numeric_limits<double>::infinity();
}

void write_rss(std::ostream& os, const RssGrid& g) {
    os << "# mode " << to_string(g.mode) << " nx " << g.grid.nx() << " ny " << g.grid.ny() << " spacing "
       << g.grid.spacing << " height " << g.grid.height << "\n";
    os << "# x_m y_m rss_dbm path_count\n";
    const auto pts = g.grid.points();
    os << std::setprecision(10);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        os << pts[i].x() << ' ' << pts[i].y() << ' ';
        if (std::isfinite(g.rss_dbm[i])) os << g.rss_dbm[i];
        else os << "nopath";
        os << ' ' << g.path_count[i] << '\n';
    }
}

RssGrid read_rss(std::istream& is) {
    RssGrid g;
    std::string line;
    std::vector<double> xs, ys;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') {
            std::istringstream hs(line.size() > 1 ? line.substr(1) : "");
            std::string key;
            while (hs >> key) {
                if (key == "mode") {
                    std::string m;
                    hs >> m;
                    g.mode = trace_mode_from_string(m);
                } else if (key == "spacing") {
                    hs >> g.grid.spacing;
                } else if (key == "height") {
                    hs >> g.grid.height;
                }
            }
            continue;
        }
        std::istringstream ls(line);
        double x = 0.0, y = 0.0;
        std::string v;
        int n = 0;
        if (!(ls >> x >> y >> v >> n)) throw InvalidArgument("read_rss: malformed row '" + line + "'");
        xs.push_back(x);
        ys.push_back(y);
        g.rss_dbm.push_back(v == "nopath" ? -std::numeric_limits<double>::infinity() : std::stod(v));
        g.path_count.push_back(n);
    }
    if (xs.empty()) throw InvalidArgument("read_rss: no rows");
    const double h = g.grid.spacing / 2.0;
    g.grid.x0 = *std::min_element(xs.begin(), xs.end()) - h;
    g.grid.x1 = *std::max_element(xs.begin(), xs.end()) + h;
    g.grid.y0 = *std::min_element(ys.begin(), ys.end()) - h;
    g.grid.y1 = *std::max_element(ys.begin(), ys.end()) + h;
    if (static_cast<std::size_t>(g.grid.nx()) * g.grid.ny() != xs.size())
        throw InvalidArgument("read_rss: rows do not form the grid");
    return g;
}

}  // namespace roughslab
