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
#include <cmath>
#include <limits>
#include <optional>

#include <omp.h>

#include "roughslab/sbr.hpp"

namespace roughslab {

namespace {

using Quanta = __int128;
constexpr long double kQuantum = 1e-30L;  // W

Vec3 axis_unit(int a) {
    Vec3 e = Vec3::Zero();
    e[a] = 1.0;
    return e;
}

Vec3 mirror(Vec3 p, const Wall& w) {
    p[w.axis] = 2.0 * w.at - p[w.axis];
    return p;
}

bool is_reflection(EventType t) { return t == EventType::Reflect || t == EventType::ReflectSpecular; }

struct Cone {
    Vec3 apex = Vec3::Zero();
    Vec3 axis = Vec3::UnitX();
    std::vector<Vec3> corners;
    std::vector<Vec3> faces;

    void finalize() {
        axis = Vec3::Zero();
        for (const auto& c : corners) axis += c;
        axis.normalize();
        faces.clear();
        for (std::size_t i = 0; i < corners.size(); ++i) {
            Vec3 n = corners[i].cross(corners[(i + 1) % corners.size()]);
            if (n.dot(axis) < 0.0) n = -n;
            faces.push_back(n);
        }
    }

    bool contains(const Vec3& p) const {
        const Vec3 v = p - apex;
        if (v.dot(axis) <= 0.0) return false;
        const double tol = -1e-12 * v.norm();
        for (const auto& n : faces)
            if (n.dot(v) < tol) return false;
        return true;
    }

    bool degenerate() const {
        for (std::size_t i = 0; i < corners.size(); ++i)
            for (std::size_t j = i + 1; j < corners.size(); ++j)
                if (corners[i].dot(corners[j]) <= 0.0) return true;
        return false;
    }

    void mirror_in(const Wall& w) {
        apex = roughslab::mirror(apex, w);
        for (auto& c : corners) c[w.axis] = -c[w.axis];
        finalize();
    }

    double solid_angle() const {
        double s = 0.0;
        for (std::size_t i = 1; i + 1 < corners.size(); ++i)
            s += triangle_solid_angle(corners[0], corners[i], corners[i + 1]);
        return s;
    }
};

struct Tube {
    Cone cone;
    Vec3 origin = Vec3::Zero();
    int origin_wall = -1;
    std::vector<Event> events;
    int reflections = 0;
    int transmissions = 0;
    int diffuse = 0;
    double power = 0.0;
    bool coherent = true;

    // Incoherent tubes fan out in-plane from the diffuse point and keep the
    // parent's out-of-plane spread, which grows with the unfolded distance.
    // Origin and frame are mirrored along with the tube.
    Vec3 diffuse_point = Vec3::Zero();
    int diffuse_wall = -1;
    double side = 0.0;  // sign of the first leg along the diffuse wall normal
    Vec3 fan_origin = Vec3::Zero();
    Vec3 fx = Vec3::UnitX(), fy = Vec3::UnitY(), fz = Vec3::UnitZ();
    double fan_lo = 0.0, fan_hi = 0.0;  // rad, in-plane
    double out_lo = 0.0, out_hi = 0.0;  // rad, out-of-plane window about the central ray
    double tan_elev = 0.0;              // parent's elevation out of the fan plane
    double unfolded = 0.0;              // source to diffuse point

    Vec3 fan_dir(double th) const {
        return (std::sin(th) * fx + std::cos(th) * fz + tan_elev * fy).normalized();
    }
    Vec3 axis() const { return coherent ? cone.axis : fan_dir(0.5 * (fan_lo + fan_hi)); }
    Vec3 apex() const { return coherent ? cone.apex : fan_origin; }

    bool contains(const Vec3& p) const {
        if (coherent) return cone.contains(p);
        const Vec3 v = p - fan_origin;
        const double a = v.dot(fx), b = v.dot(fz);
        const double rho = std::hypot(a, b);
        if (rho <= 0.0) return false;
        double th = std::atan2(a, b);
        if (th < fan_lo - 1e-12) th += 2.0 * kPi;
        if (th < fan_lo || th > fan_hi) return false;
        const double o = v.dot(fy) - rho * tan_elev;
        const double r = reach(rho);
        return o >= out_lo * r && o <= out_hi * r;
    }

    double reach(double rho) const { return unfolded + rho * std::sqrt(1.0 + tan_elev * tan_elev); }

    void mirror_in(const Wall& w) {
        if (coherent) {
            cone.mirror_in(w);
            return;
        }
        fan_origin = mirror(fan_origin, w);
        fx[w.axis] = -fx[w.axis];
        fy[w.axis] = -fy[w.axis];
        fz[w.axis] = -fz[w.axis];
    }
};

struct Hit {
    int wall = -1;
    double t = 0.0;
    Vec3 p = Vec3::Zero();
};

std::optional<Hit> nearest_hit(const RayScene& scene, const Vec3& o, const Vec3& d, int skip) {
    std::optional<Hit> best;
    for (int w = 0; w < static_cast<int>(scene.walls.size()); ++w) {
        if (w == skip) continue;
        const Wall& wall = scene.walls[w];
        const double den = d[wall.axis];
        if (std::abs(den) < 1e-15) continue;
        const double t = (wall.at - o[wall.axis]) / den;
        if (t <= 1e-9) continue;
        if (best && t >= best->t) continue;
        const Vec3 p = o + t * d;
        if (!wall.contains(p)) continue;
        best = Hit{w, t, p};
    }
    return best;
}

/// Whether the open segment a-b crosses any wall other than the two skipped.
bool blocked(const RayScene& scene, const Vec3& a, const Vec3& b, int skip_a, int skip_b) {
    const Vec3 d = b - a;
    const double len = d.norm();
    if (len < 1e-12) return false;
    for (int w = 0; w < static_cast<int>(scene.walls.size()); ++w) {
        if (w == skip_a || w == skip_b) continue;
        const Wall& wall = scene.walls[w];
        const double den = d[wall.axis];
        if (std::abs(den) < 1e-15) continue;
        const double t = (wall.at - a[wall.axis]) / den;
        if (t * len <= 1e-9 || (1.0 - t) * len <= 1e-9) continue;
        if (wall.contains(a + t * d)) return true;
    }
    return false;
}

double incidence(const Vec3& dir, const Wall& w) {
    return std::acos(std::clamp(std::abs(dir.normalized()[w.axis]), 0.0, 1.0));
}

/// Spatial buckets over receiver x, y.
class ReceiverIndex {
public:
    ReceiverIndex(const std::vector<Vec3>& pts, double cell) : pts_(pts), cell_(cell) {
        if (pts.empty()) return;
        lo_ = hi_ = pts.front();
        for (const auto& p : pts) {
            lo_ = lo_.cwiseMin(p);
            hi_ = hi_.cwiseMax(p);
        }
        nx_ = static_cast<int>((hi_.x() - lo_.x()) / cell_) + 1;
        ny_ = static_cast<int>((hi_.y() - lo_.y()) / cell_) + 1;
        buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
        for (int i = 0; i < static_cast<int>(pts.size()); ++i) buckets_[bucket(pts[i])].push_back(i);
    }

    template <class F>
    void query(const Vec3& lo, const Vec3& hi, F&& f) const {
        if (pts_.empty()) return;
        if (hi.z() < lo_.z() || lo.z() > hi_.z()) return;
        const int i0 = std::max(0, static_cast<int>(std::floor((lo.x() - lo_.x()) / cell_)));
        const int i1 = std::min(nx_ - 1, static_cast<int>(std::floor((hi.x() - lo_.x()) / cell_)));
        const int j0 = std::max(0, static_cast<int>(std::floor((lo.y() - lo_.y()) / cell_)));
        const int j1 = std::min(ny_ - 1, static_cast<int>(std::floor((hi.y() - lo_.y()) / cell_)));
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i)
                for (int r : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
                    const Vec3& p = pts_[r];
                    if ((p.array() >= lo.array()).all() && (p.array() <= hi.array()).all()) f(r);
                }
    }

private:
    std::size_t bucket(const Vec3& p) const {
        const int i = std::min(nx_ - 1, static_cast<int>((p.x() - lo_.x()) / cell_));
        const int j = std::min(ny_ - 1, static_cast<int>((p.y() - lo_.y()) / cell_));
        return static_cast<std::size_t>(j) * nx_ + i;
    }

    const std::vector<Vec3>& pts_;
    double cell_;
    Vec3 lo_ = Vec3::Zero(), hi_ = Vec3::Zero();
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<int>> buckets_;
};

struct Candidate {
    int rx;
    std::vector<Event> events;
    bool operator<(const Candidate& o) const { return rx != o.rx ? rx < o.rx : events < o.events; }
    bool operator==(const Candidate& o) const { return rx == o.rx && events == o.events; }
};

struct ThreadAccum {
    std::vector<Candidate> coherent;
    std::vector<Quanta> incoherent;
    std::vector<int> incoherent_count;
    std::vector<std::vector<TracedPath>> paths;
    TraceStats stats;
};

class Tracer {
public:
    Tracer(const RayScene& scene, const std::vector<Vec3>& rx, const TraceOptions& opts)
        : scene_(scene), rx_(rx), opts_(opts), index_(rx, 0.5) {
        Vec3 lo = scene.tx.position, hi = scene.tx.position;
        for (const auto& w : scene.walls) {
            lo = lo.cwiseMin(w.lo);
            hi = hi.cwiseMax(w.hi);
        }
        for (const auto& p : rx) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        reach_ = 2.0 * (hi - lo).norm() + 1.0;
        lambda_ = scene.wavelength();
    }

    void process(Tube tube, ThreadAccum& acc) const;

    Complex coherent_amplitude(const std::vector<Vec3>& pts, const std::vector<Event>& events) const;

private:
    void segment_receivers(const Tube& tube, const Vec3& dir, const std::optional<Hit>& hit, ThreadAccum& acc) const;
    void incoherent_contribution(const Tube& tube, int r, ThreadAccum& acc) const;
    void continue_tube(const Tube& parent, const Hit& hit, EventType type, std::vector<Tube>& out,
                       ThreadAccum& acc) const;
    void spawn_fan(const Tube& parent, const Hit& hit, const ScatterModel& m, bool diffuse_only, double bin_theta,
                   std::vector<Tube>& out, ThreadAccum& acc) const;

    const RayScene& scene_;
    const std::vector<Vec3>& rx_;
    const TraceOptions& opts_;
    ReceiverIndex index_;
    double reach_ = 100.0;
    double lambda_ = 0.0;

public:
    double cull_floor_ = 0.0;
};

void Tracer::segment_receivers(const Tube& tube, const Vec3& dir, const std::optional<Hit>& hit,
                               ThreadAccum& acc) const {
    // Bounding box of the tube between its start plane and the hit plane.
    Vec3 lo = tube.origin, hi = tube.origin;
    auto extend = [&](const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    };
    const Vec3 apex = tube.apex();
    auto edge = [&](const Vec3& c, double grow0, double grow1) {
        double s0 = 0.0;
        if (tube.origin_wall >= 0) {
            const Wall& w = scene_.walls[tube.origin_wall];
            s0 = std::abs(c[w.axis]) > 1e-15 ? (w.at - apex[w.axis]) / c[w.axis] : 0.0;
            s0 = std::max(s0, 0.0);
        }
        double s1 = reach_;
        if (hit) {
            const Wall& w = scene_.walls[hit->wall];
            const double s = std::abs(c[w.axis]) > 1e-15 ? (w.at - apex[w.axis]) / c[w.axis] : -1.0;
            if (s > s0) s1 = std::min(s, reach_);
        }
        for (double o : {tube.out_lo, tube.out_hi}) {
            extend(apex + s0 * c + o * (grow0 + s0) * tube.fy);
            extend(apex + s1 * c + o * (grow1 + s1) * tube.fy);
        }
    };
    if (tube.coherent) {
        for (const auto& c : tube.cone.corners) edge(c, 0.0, 0.0);
    } else {
        edge(tube.fan_dir(tube.fan_lo), tube.unfolded, tube.unfolded);
        edge(tube.fan_dir(tube.fan_hi), tube.unfolded, tube.unfolded);
    }
    lo.array() -= 1e-9;
    hi.array() += 1e-9;

    index_.query(lo, hi, [&](int r) {
        const Vec3& p = rx_[r];
        if (!tube.contains(p)) return;
        if (tube.origin_wall >= 0) {
            const Wall& w = scene_.walls[tube.origin_wall];
            if ((p[w.axis] - w.at) * dir[w.axis] <= 0.0) return;
        }
        if (hit) {
            const Wall& w = scene_.walls[hit->wall];
            if ((p[w.axis] - w.at) * dir[w.axis] >= 0.0) return;
        }
        if (tube.coherent) acc.coherent.push_back({r, tube.events});
        else incoherent_contribution(tube, r, acc);
    });
}

Complex Tracer::coherent_amplitude(const std::vector<Vec3>& pts, const std::vector<Event>& events) const {
    double d = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) d += (pts[i + 1] - pts[i]).norm();
    const Vec3 first = pts[1] - pts[0];
    const Vec3 last = pts[pts.size() - 1] - pts[pts.size() - 2];
    const double pt = std::pow(10.0, scene_.tx.power_dbm / 10.0) * 1e-3;
    const double gr = dipole_gain(std::acos(std::clamp(last.normalized().z(), -1.0, 1.0)));
    Complex a = std::sqrt(pt * scene_.tx.gain_towards(first) * gr) * lambda_ / (4.0 * kPi * d) *
                std::exp(Complex(0.0, -2.0 * kPi * d / lambda_));
    for (std::size_t j = 0; j < events.size(); ++j) {
        const Wall& w = scene_.walls[events[j].wall];
        a *= interaction_coefficient(scene_, w, events[j].type, incidence(pts[j + 1] - pts[j], w), opts_.mode);
    }
    return a;
}

void Tracer::incoherent_contribution(const Tube& tube, int r, ThreadAccum& acc) const {
    const auto pts = image_path(scene_, tube.diffuse_point, tube.diffuse_wall, tube.events, rx_[r]);
    if (pts.empty()) return;
    // The first leg must leave on the child's side of the diffuse wall.
    const Wall& dw = scene_.walls[tube.diffuse_wall];
    if ((pts[1] - pts[0])[dw.axis] * tube.side <= 0.0) return;

    double len = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) len += (pts[i + 1] - pts[i]).norm();
    const double rho = len / std::sqrt(1.0 + tube.tan_elev * tube.tan_elev);
    double g = 1.0;
    for (std::size_t j = 0; j < tube.events.size(); ++j) {
        const Wall& w = scene_.walls[tube.events[j].wall];
        g *= std::norm(
            interaction_coefficient(scene_, w, tube.events[j].type, incidence(pts[j + 1] - pts[j], w), opts_.mode));
    }
    const Vec3 last = pts[pts.size() - 1] - pts[pts.size() - 2];
    const double gr = dipole_gain(std::acos(std::clamp(last.normalized().z(), -1.0, 1.0)));
    const double area = (tube.fan_hi - tube.fan_lo) * rho * (tube.out_hi - tube.out_lo) * tube.reach(rho);
    const double p = tube.power / area * g * gr * lambda_ * lambda_ / (4.0 * kPi);
    if (!(p > 0.0)) return;
    acc.incoherent[r] += static_cast<Quanta>(static_cast<long double>(p) / kQuantum + 0.5L);
    acc.incoherent_count[r] += 1;
    if (opts_.keep_paths) {
        TracedPath tp;
        tp.points = pts;
        tp.events = tube.events;
        tp.coherent = false;
        tp.power = p;
        acc.paths[r].push_back(std::move(tp));
    }
}

void Tracer::continue_tube(const Tube& parent, const Hit& hit, EventType type, std::vector<Tube>& out,
                           ThreadAccum& acc) const {
    const Wall& w = scene_.walls[hit.wall];
    const Complex c = interaction_coefficient(scene_, w, type, incidence(parent.axis(), w), opts_.mode);
    Tube t = parent;
    t.power *= std::norm(c);
    if (!(t.power > 0.0) || t.power < cull_floor_) return;
    if (is_reflection(type)) {
        t.mirror_in(w);
        ++t.reflections;
    } else {
        ++t.transmissions;
    }
    if (type == EventType::ReflectSpecular || type == EventType::TransmitSpecular) t.diffuse = 1;
    t.origin = hit.p;
    t.origin_wall = hit.wall;
    t.events.push_back({hit.wall, type});
    (void)acc;
    out.push_back(std::move(t));
}

void Tracer::spawn_fan(const Tube& parent, const Hit& hit, const ScatterModel& m, bool diffuse_only,
                       double bin_theta, std::vector<Tube>& out, ThreadAccum& acc) const {
    const Wall& w = scene_.walls[hit.wall];
    const Surface& s = scene_.surfaces[w.surface];
    const Vec3 d = parent.axis();
    // Vertical walls scatter in the horizontal plane and keep the vertical
    // direction component; floors and ceilings use the plane of incidence.
    const Vec3 zp = axis_unit(w.axis) * (d[w.axis] > 0.0 ? 1.0 : -1.0);
    Vec3 xp = w.vertical() ? zp.cross(Vec3::UnitZ()) : Vec3(d - d.dot(zp) * zp);
    if (xp.norm() < 1e-9) xp = zp.cross(Vec3::UnitX());
    xp.normalize();
    if (xp.dot(d) < 0.0) xp = -xp;
    const Vec3 yp = zp.cross(xp);
    const double beta = std::asin(std::clamp(d.dot(yp), -1.0, 1.0));
    const double theta_inc = rad2deg(std::atan2(d.dot(xp), d.dot(zp)));

    // The children keep the parent's full out-of-plane extent, so the windows
    // of neighbouring parents tile without gaps.
    double out_lo = 0.0, out_hi = 0.0;
    for (const auto& c : parent.cone.corners) {
        const double b = std::asin(std::clamp(c.dot(yp), -1.0, 1.0)) - beta;
        out_lo = std::min(out_lo, b);
        out_hi = std::max(out_hi, b);
    }
    if (out_hi - out_lo < 1e-9) {
        out_lo -= 5e-10;
        out_hi += 5e-10;
    }
    const double unfolded = parent.coherent ? (hit.p - parent.cone.apex).norm() : 0.0;
    const bool reflect = m.kind == PatternKind::Reflection;
    const double start = reflect ? 90.0 : -90.0;
    const double step = opts_.fan_step_deg;
    const int n = static_cast<int>(std::round(180.0 / step));
    // One reference beam of the model aperture spans 1 / (L cos theta) rad.
    const double beam = 1.0 / (s.aperture_wavelengths * std::cos(deg2rad(bin_theta)));
    const double shift = reflect ? theta_inc - bin_theta : bin_theta - theta_inc;

    auto amp = [&](double theta) {
        const double tm = theta + shift;
        return diffuse_only ? eval_component(m.diffuse, m.kind, tm) : eval_model(m, tm);
    };

    constexpr int kSub = 20;
    for (int c = 0; c < n; ++c) {
        const double lo = start + c * step;
        double share = 0.0;
        for (int q = 0; q < kSub; ++q) {
            const double a = amp(lo + (q + 0.5) * step / kSub);
            share += a * a;
        }
        share *= deg2rad(step) / kSub / beam;
        if (share < opts_.child_cull) continue;

        Tube t;
        t.coherent = false;
        t.fan_origin = hit.p;
        t.fx = xp;
        t.fy = yp;
        t.fz = zp;
        t.fan_lo = deg2rad(lo);
        t.fan_hi = deg2rad(lo + step);
        t.out_lo = out_lo;
        t.out_hi = out_hi;
        t.tan_elev = std::tan(beta);
        t.side = t.axis()[w.axis] > 0.0 ? 1.0 : -1.0;
        t.origin = hit.p;
        t.origin_wall = hit.wall;
        t.reflections = parent.reflections;
        t.transmissions = parent.transmissions;
        t.diffuse = parent.diffuse + 1;
        t.power = parent.power * share;
        t.coherent = false;
        t.diffuse_point = hit.p;
        t.diffuse_wall = hit.wall;
        t.unfolded = unfolded;
        if (t.power < cull_floor_) continue;
        ++acc.stats.children;
        out.push_back(std::move(t));
    }
}

void Tracer::process(Tube tube, ThreadAccum& acc) const {
    std::vector<Tube> stack;
    stack.push_back(std::move(tube));
    while (!stack.empty()) {
        Tube t = std::move(stack.back());
        stack.pop_back();
        if (t.coherent && t.cone.degenerate()) {
            ++acc.stats.dropped_degenerate;
            continue;
        }
        const Vec3 dir = t.axis();
        const Vec3 start = t.origin_wall >= 0 ? t.origin : t.cone.apex;
        const auto hit = nearest_hit(scene_, start, dir, t.origin_wall);
        ++acc.stats.segments;
        segment_receivers(t, dir, hit, acc);
        if (!hit) continue;

        const Wall& w = scene_.walls[hit->wall];
        const Surface& s = scene_.surfaces[w.surface];
        const double theta = rad2deg(incidence(dir, w));
        const bool may_fan = opts_.mode == TraceMode::WithDiffuse && s.kind == SurfaceKind::RoughSlab &&
                             t.diffuse < scene_.limits.diffuse;

        for (int side = 0; side < 2; ++side) {
            const bool reflect = side == 0;
            if (!reflect && s.kind == SurfaceKind::Halfspace) continue;
            FanKind fk = FanKind::None;
            const ModelBin* bin = nullptr;
            if (may_fan) {
                bin = &nearest_bin(reflect ? s.reflection : s.transmission, theta);
                fk = fan_kind(bin->model, opts_.specular_fwhm_deg);
            }
            if (fk != FanKind::None)
                spawn_fan(t, *hit, bin->model, fk == FanKind::DiffuseOnly, bin->theta_deg, stack, acc);
            if (fk == FanKind::Full) continue;
            if (reflect ? t.reflections >= scene_.limits.reflections
                        : t.transmissions >= scene_.limits.transmissions)
                continue;
            EventType type = reflect ? EventType::Reflect : EventType::Transmit;
            if (fk == FanKind::DiffuseOnly) type = reflect ? EventType::ReflectSpecular : EventType::TransmitSpecular;
            continue_tube(t, *hit, type, stack, acc);
        }
    }
}

}  // namespace

std::vector<Vec3> image_path(const RayScene& scene, const Vec3& source, int source_wall,
                             const std::vector<Event>& events, const Vec3& rx) {
    const std::size_t k = events.size();
    std::vector<Vec3> images(k + 1);
    images[0] = source;
    for (std::size_t j = 0; j < k; ++j) {
        const Wall& w = scene.walls[events[j].wall];
        images[j + 1] = is_reflection(events[j].type) ? mirror(images[j], w) : images[j];
    }
    std::vector<Vec3> pts(k + 2);
    pts[0] = source;
    pts[k + 1] = rx;
    Vec3 q = rx;
    for (std::size_t jj = k; jj-- > 0;) {
        const Wall& w = scene.walls[events[jj].wall];
        const Vec3& img = images[jj + 1];
        const Vec3 d = q - img;
        if (std::abs(d[w.axis]) < 1e-15) return {};
        const double t = (w.at - img[w.axis]) / d[w.axis];
        const double len = d.norm();
        if (t * len <= 1e-9 || (1.0 - t) * len <= 1e-9) return {};
        Vec3 p = img + t * d;
        p[w.axis] = w.at;
        if (!w.contains(p)) return {};
        pts[jj + 1] = p;
        q = p;
    }
    if (source_wall >= 0 && k > 0 && events[0].wall == source_wall) return {};
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const int wa = i == 0 ? source_wall : events[i - 1].wall;
        const int wb = i < k ? events[i].wall : -1;
        if ((pts[i + 1] - pts[i]).norm() < 1e-9) return {};
        if (blocked(scene, pts[i], pts[i + 1], wa, wb)) return {};
    }
    return pts;
}

TraceResult trace(const RayScene& scene, const std::vector<Vec3>& receivers, const TraceOptions& opts) {
    scene.validate();
    if (opts.jobs < 1) throw InvalidArgument("trace: jobs must be >= 1");
    if (!(opts.fan_step_deg > 0.0) || std::abs(180.0 / opts.fan_step_deg - std::round(180.0 / opts.fan_step_deg)) > 1e-9)
        throw InvalidArgument("trace: fan step must divide 180 degrees");

    Tracer tracer(scene, receivers, opts);
    const double pt = std::pow(10.0, scene.tx.power_dbm / 10.0) * 1e-3;

    std::vector<Tube> launch;
    double pmax = 0.0;
    for (const auto& tri : icosphere(opts.subdivision)) {
        Tube t;
        t.cone.apex = scene.tx.position;
        t.cone.corners = {tri.a, tri.b, tri.c};
        t.cone.finalize();
        t.origin = scene.tx.position;
        t.power = pt * scene.tx.gain_towards(t.cone.axis) * tri.solid_angle() / (4.0 * kPi);
        pmax = std::max(pmax, t.power);
        launch.push_back(std::move(t));
    }
    tracer.cull_floor_ = opts.launch_cull * pmax;
    std::erase_if(launch, [&](const Tube& t) { return opts.launch_cull > 0.0 && t.power < tracer.cull_floor_; });

    const int nthreads = opts.jobs;
    std::vector<ThreadAccum> accs(nthreads);
    for (auto& a : accs) {
        a.incoherent.assign(receivers.size(), 0);
        a.incoherent_count.assign(receivers.size(), 0);
        if (opts.keep_paths) a.paths.resize(receivers.size());
    }
#pragma omp parallel for num_threads(nthreads) schedule(dynamic, 16)
    for (std::size_t i = 0; i < launch.size(); ++i) {
        ThreadAccum& acc = accs[omp_get_thread_num()];
        tracer.process(launch[i], acc);
    }

    TraceResult res;
    res.stats.tubes_launched = static_cast<long>(launch.size());
    for (const auto& t : launch) res.stats.launched_power += t.power;
    std::vector<Candidate> cand;
    std::vector<Quanta> inc(receivers.size(), 0);
    res.receivers.resize(receivers.size());
    for (auto& a : accs) {
        res.stats.segments += a.stats.segments;
        res.stats.children += a.stats.children;
        res.stats.dropped_degenerate += a.stats.dropped_degenerate;
        cand.insert(cand.end(), std::make_move_iterator(a.coherent.begin()), std::make_move_iterator(a.coherent.end()));
        for (std::size_t r = 0; r < receivers.size(); ++r) {
            inc[r] += a.incoherent[r];
            res.receivers[r].path_count += a.incoherent_count[r];
            if (opts.keep_paths)
                for (auto& p : a.paths[r]) res.receivers[r].paths.push_back(std::move(p));
        }
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    std::vector<Complex> field(receivers.size(), Complex{});
    std::vector<char> valid(cand.size(), 0);
    std::vector<Complex> amps(cand.size());
#pragma omp parallel for num_threads(nthreads) schedule(dynamic, 64)
    for (std::size_t i = 0; i < cand.size(); ++i) {
        const auto pts = image_path(scene, scene.tx.position, -1, cand[i].events, receivers[cand[i].rx]);
        if (pts.empty()) continue;
        valid[i] = 1;
        amps[i] = tracer.coherent_amplitude(pts, cand[i].events);
    }
    for (std::size_t i = 0; i < cand.size(); ++i) {
        if (!valid[i]) continue;
        auto& rr = res.receivers[cand[i].rx];
        field[cand[i].rx] += amps[i];
        ++rr.path_count;
        if (opts.keep_paths) {
            TracedPath tp;
            tp.points = image_path(scene, scene.tx.position, -1, cand[i].events, receivers[cand[i].rx]);
            tp.events = cand[i].events;
            tp.amplitude = amps[i];
            tp.power = std::norm(amps[i]);
            rr.paths.push_back(std::move(tp));
        }
    }
    for (std::size_t r = 0; r < receivers.size(); ++r) {
        res.receivers[r].power_w = std::norm(field[r]) + static_cast<double>(static_cast<long double>(inc[r]) * kQuantum);
        auto& paths = res.receivers[r].paths;
        std::sort(paths.begin(), paths.end(), [](const TracedPath& a, const TracedPath& b) {
            if (a.coherent != b.coherent) return a.coherent;
            if (a.events != b.events) return a.events < b.events;
            return a.power < b.power;
        });
    }
    return res;
}

RssGrid rss_map(const RayScene& scene, const TraceOptions& opts) {
    const auto pts = scene.grid.points();
    const TraceResult tr = trace(scene, pts, opts);
    RssGrid g;
    g.grid = scene.grid;
    g.mode = opts.mode;
    g.stats = tr.stats;
    for (const auto& r : tr.receivers) {
        g.rss_dbm.push_back(r.power_w > 0.0 ? 10.0 * std::log10(r.power_w * 1e3)
                                            : -std::numeric_limits<double>::infinity());
        g.path_count.push_back(r.path_count);
    }
    return g;
}

}  // namespace roughslab
