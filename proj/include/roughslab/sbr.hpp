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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "roughslab/media.hpp"
#include "roughslab/scatmodel.hpp"

namespace roughslab {

using Vec3 = Eigen::Vector3d;

/// Cosine-power beam normalized over the front hemisphere: 2 (n + 1) cos^n.
double antenna_gain(double theta, double exponent);

/// Half-wave dipole along z; theta from the dipole axis.
double dipole_gain(double theta);

struct Transmitter {
    Vec3 position{0.0, 0.0, 0.0};
    Vec3 boresight{1.0, 0.0, 0.0};
    double power_dbm = 20.0;
    double exponent = 100.0;

    double gain_towards(const Vec3& dir) const;
};

struct BounceLimits {
    int reflections = 4;
    int transmissions = 2;
    int diffuse = 1;
};

enum class SurfaceKind { Halfspace, Slab, RoughSlab };

struct ModelBin {
    double theta_deg = 30.0;
    ScatterModel model;
};

struct Surface {
    std::string name;
    SurfaceKind kind = SurfaceKind::Halfspace;
    std::string material;
    Medium medium;
    double thickness = 0.0;
    std::vector<ModelBin> reflection;    // rough slabs only
    std::vector<ModelBin> transmission;
    /// Length of the probe aperture the models were extracted from, in
    /// wavelengths. Sets the power share of each diffuse child tube.
    double aperture_wavelengths = 18.0;
};

/// Axis-aligned rectangle. `axis` is the normal direction (0 x, 1 y, 2 z);
/// lo/hi bound the other two coordinates.
struct Wall {
    std::string name;
    int axis = 0;
    double at = 0.0;
    Vec3 lo{0.0, 0.0, 0.0};
    Vec3 hi{0.0, 0.0, 0.0};
    int surface = 0;

    bool contains(const Vec3& p, double tol = 1e-9) const;
    bool vertical() const { return axis != 2; }
};

struct ReceiverGrid {
    double x0 = 0.0, x1 = 1.0;
    double y0 = 0.0, y1 = 1.0;
    double spacing = 0.25;
    double height = 1.5;

    int nx() const;
    int ny() const;
    /// Cell centres, x fastest.
    std::vector<Vec3> points() const;
};

struct RayScene {
    double frequency = 28e9;
    Transmitter tx;
    BounceLimits limits;
    std::vector<Surface> surfaces;
    std::vector<Wall> walls;
    ReceiverGrid grid;

    double wavelength() const { return roughslab::wavelength(frequency); }
    void validate() const;
};

/// JSON scene file. Model paths resolve relative to the file's directory.
RayScene load_scene(const std::filesystem::path& path, const MaterialLibrary& materials);
RayScene parse_scene(std::istream& is, const std::filesystem::path& base_dir, const MaterialLibrary& materials);

enum class TraceMode { Flat, AttenuationOnly, WithDiffuse };

std::string to_string(TraceMode m);  // "flat", "attenuation_only", "with_diffuse"
TraceMode trace_mode_from_string(const std::string& s);

struct TraceOptions {
    TraceMode mode = TraceMode::Flat;
    int subdivision = 6;             // icosahedron levels, 20 * 4^k tubes
    double fan_step_deg = 5.0;
    double launch_cull = 1e-8;       // tube power relative to the strongest launched tube
    double child_cull = 1e-6;        // diffuse child power relative to its parent
    /// Directive lobes narrower than this (power FWHM) are the specular beam
    /// of the model aperture and stay coherent.
    double specular_fwhm_deg = 12.0;
    bool keep_paths = false;
    int jobs = 1;
};

/// Coefficient of a single interaction at incidence theta (rad).
enum class EventType : std::uint8_t { Reflect, Transmit, ReflectSpecular, TransmitSpecular };

struct Event {
    int wall = 0;
    EventType type = EventType::Reflect;
    bool operator==(const Event&) const = default;
    auto operator<=>(const Event&) const = default;
};

/// How a rough-slab model behaves when a tube with diffuse budget hits it.
enum class FanKind { None, Full, DiffuseOnly };

FanKind fan_kind(const ScatterModel& m, double specular_fwhm_deg);

/// Power full width at half maximum of a directive lobe, degrees.
double directive_fwhm(double a);

Complex interaction_coefficient(const RayScene& scene, const Wall& wall, EventType type, double theta, TraceMode mode);

/// Nearest model bin to an incidence angle in degrees.
const ModelBin& nearest_bin(const std::vector<ModelBin>& bins, double theta_deg);

struct TracedPath {
    std::vector<Vec3> points;  // source (tx or diffuse point), hits, receiver
    std::vector<Event> events;
    bool coherent = true;
    Complex amplitude{0.0, 0.0};  // sqrt(W), coherent paths
    double power = 0.0;           // W
};

struct ReceiverResult {
    double power_w = 0.0;
    int path_count = 0;
    std::vector<TracedPath> paths;  // when keep_paths
};

struct TraceStats {
    long tubes_launched = 0;
    long segments = 0;
    long children = 0;
    long dropped_degenerate = 0;
    double launched_power = 0.0;  // W, after the launch cull
};

struct TraceResult {
    std::vector<ReceiverResult> receivers;
    TraceStats stats;
};

TraceResult trace(const RayScene& scene, const std::vector<Vec3>& receivers, const TraceOptions& opts);

/// Rebuilds a specular polyline from a source through `events` to `rx` with
/// images; empty when the path leaves a wall or is blocked.
std::vector<Vec3> image_path(const RayScene& scene, const Vec3& source, int source_wall,
                             const std::vector<Event>& events, const Vec3& rx);

struct RssGrid {
    ReceiverGrid grid;
    std::vector<double> rss_dbm;  // -inf when no path
    std::vector<int> path_count;
    TraceMode mode = TraceMode::Flat;
    TraceStats stats;

    /// Mean of linear power over points in the box, in dBm.
    double mean_dbm(double x0, double x1, double y0, double y1) const;
};

RssGrid rss_map(const RayScene& scene, const TraceOptions& opts);

/// Rows `x_m y_m rss_dbm path_count`; no-path rows print `nopath`.
void write_rss(std::ostream& os, const RssGrid& g);
RssGrid read_rss(std::istream& is);

/// Icosahedral subdivision of the unit sphere.
struct SphereTriangle {
    Vec3 a, b, c;
    double solid_angle() const;
};
std::vector<SphereTriangle> icosphere(int subdivision);

/// Van Oosterom and Strackee solid angle of the triangle (a, b, c) seen from the origin.
double triangle_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace roughslab
