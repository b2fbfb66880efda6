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

#include "roughslab/scatmodel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "roughslab/lm.hpp"

namespace roughslab {

std::string to_string(Family f) {
    switch (f) {
        case Family::Lambertian: return "L";
        case Family::Directive: return "D";
        case Family::Backscattering: return "BSc";
        case Family::HybridDirective: return "HD";
    }
    return "D";
}

Family family_from_string(const std::string& s) {
    if (s == "L") return Family::Lambertian;
    if (s == "D") return Family::Directive;
    if (s == "BSc") return Family::Backscattering;
    if (s == "HD") return Family::HybridDirective;
    throw InvalidArgument("unknown model family '" + s + "'");
}

double quadrant_normal(PatternKind kind) { return kind == PatternKind::Transmission ? 0.0 : 180.0; }

namespace {

int component_params(Family f) {
    switch (f) {
        case Family::Lambertian: return 1;
        case Family::Directive: return 3;
        case Family::Backscattering: return 5;
        case Family::HybridDirective: break;
    }
    throw InvalidArgument("component_params: HD is not a single component");
}

double lobe(double a, double theta_deg, double center_deg) {
    const double base = 0.5 * (1.0 + std::cos(deg2rad(theta_deg - center_deg)));
    return std::pow(std::max(base, 0.0), a);
}

}  // namespace

double eval_component(const ModelComponent& c, PatternKind kind, double theta_deg) {
    switch (c.family) {
        case Family::Lambertian: {
            const double ct = std::cos(deg2rad(theta_deg - quadrant_normal(kind)));
            return c.a0 * std::sqrt(std::max(ct, 0.0));
        }
        case Family::Directive: return c.a0 * std::sqrt(lobe(c.a_a, theta_deg, c.theta_a));
        case Family::Backscattering: {
            const double v = c.lambda * lobe(c.a_a, theta_deg, c.theta_a) +
                             (1.0 - c.lambda) * lobe(c.a_b, theta_deg, -c.theta_a);
            return c.a0 * std::sqrt(std::max(v, 0.0));
        }
        case Family::HybridDirective: break;
    }
    throw InvalidArgument("eval_component: HD is not a single component");
}

double eval_model(const ScatterModel& m, double theta_deg) {
    if (m.family != Family::HybridDirective) return eval_component(m.main, m.kind, theta_deg);
    const double s = eval_component(m.specular, m.kind, theta_deg);
    const double d = eval_component(m.diffuse, m.kind, theta_deg);
    return std::sqrt(s * s + d * d);
}

int ScatterModel::parameter_count() const {
    if (family == Family::HybridDirective) return component_params(specular.family) + component_params(diffuse.family);
    return component_params(family);
}

double ScatterModel::specular_amplitude() const {
    const double spec = kind == PatternKind::Transmission ? theta_i : 180.0 - theta_i;
    return eval_model(*this, spec);
}

double model_mse(const ScatterModel& m, std::span<const double> angles, std::span<const double> magnitudes) {
    if (angles.size() != magnitudes.size() || angles.empty()) throw InvalidArgument("model_mse: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const double d = eval_model(m, angles[i]) - magnitudes[i];
        s += d * d;
    }
    return s / static_cast<double>(angles.size());
}

namespace {

struct Data {
    std::vector<double> theta;
    std::vector<double> y;
};

struct Quadrant {
    PatternKind kind;
    double lo, hi;  // allowed lobe directions
    double specular;
};

Quadrant quadrant_of(const AngularPattern& p) {
    if (p.kind == PatternKind::Transmission) return {PatternKind::Transmission, -90.0, 90.0, p.theta_i};
    return {PatternKind::Reflection, 90.0, 270.0, 180.0 - p.theta_i};
}

Eigen::VectorXd pack(const ModelComponent& c) {
    switch (c.family) {
        case Family::Lambertian: return (Eigen::VectorXd(1) << c.a0).finished();
        case Family::Directive: return (Eigen::VectorXd(3) << c.a0, std::log(c.a_a), c.theta_a).finished();
        case Family::Backscattering:
            return (Eigen::VectorXd(5) << c.a0, std::log(c.a_a), std::log(c.a_b), c.lambda, c.theta_a).finished();
        case Family::HybridDirective: break;
    }
    throw InvalidArgument("pack: HD");
}

ModelComponent unpack(Family f, const double* x) {
    ModelComponent c;
    c.family = f;
    c.a0 = x[0];
    if (f == Family::Directive) {
        c.a_a = std::exp(x[1]);
        c.theta_a = x[2];
    } else if (f == Family::Backscattering) {
        c.a_a = std::exp(x[1]);
        c.a_b = std::exp(x[2]);
        c.lambda = x[3];
        c.theta_a = x[4];
    }
    return c;
}

void bounds(Family f, const Quadrant& q, const FitOptions& o, double theta_lo, double theta_hi,
            Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
    const int n = component_params(f);
    lo.resize(n);
    hi.resize(n);
    lo[0] = 0.0;
    hi[0] = 100.0;
    if (f == Family::Directive) {
        lo[1] = std::log(o.a_min);
        hi[1] = std::log(o.a_max);
        lo[2] = theta_lo;
        hi[2] = theta_hi;
    } else if (f == Family::Backscattering) {
        lo[1] = lo[2] = std::log(o.a_min);
        hi[1] = hi[2] = std::log(o.a_max);
        lo[3] = 0.0;
        hi[3] = 1.0;
        lo[4] = theta_lo;
        hi[4] = theta_hi;
    }
    (void)q;
}

double value_near(const Data& d, double theta) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < d.theta.size(); ++i) {
        if (std::abs(d.theta[i] - theta) < std::abs(d.theta[best] - theta)) best = i;
    }
    return d.y[best];
}

std::vector<double> direction_seeds(const Data& d, const Quadrant& q, double lo, double hi) {
    std::vector<double> seeds{std::clamp(q.specular, lo, hi)};
    std::vector<std::pair<double, double>> peaks;  // (value, angle)
    for (std::size_t i = 1; i + 1 < d.y.size(); ++i) {
        if (d.y[i] >= d.y[i - 1] && d.y[i] >= d.y[i + 1]) peaks.emplace_back(d.y[i], d.theta[i]);
    }
    std::sort(peaks.begin(), peaks.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < peaks.size() && seeds.size() < 4; ++i) {
        const double t = std::clamp(peaks[i].second, lo, hi);
        if (std::none_of(seeds.begin(), seeds.end(), [&](double s) { return std::abs(s - t) < 0.5; })) seeds.push_back(t);
    }
    return seeds;
}

struct ComponentFit {
    ModelComponent c;
    double mse = std::numeric_limits<double>::infinity();
    bool converged = false;
};

double component_mse(const ModelComponent& c, PatternKind kind, const Data& d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.y.size(); ++i) {
        const double r = eval_component(c, kind, d.theta[i]) - d.y[i];
        s += r * r;
    }
    return s / static_cast<double>(d.y.size());
}

ComponentFit fit_component(const Data& d, Family f, const Quadrant& q, const FitOptions& o, double theta_lo,
                           double theta_hi, std::span<const double> a_seeds) {
    ComponentFit best;
    if (f == Family::Lambertian) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < d.y.size(); ++i) {
            const double g = std::sqrt(std::max(std::cos(deg2rad(d.theta[i] - quadrant_normal(q.kind))), 0.0));
            num += g * d.y[i];
            den += g * g;
        }
        best.c.family = f;
        best.c.a0 = den > 0.0 ? std::max(num / den, 0.0) : 0.0;
        best.mse = component_mse(best.c, q.kind, d);
        best.converged = true;
        return best;
    }

    Eigen::VectorXd lo, hi;
    bounds(f, q, o, theta_lo, theta_hi, lo, hi);
    auto residual = [&](const Eigen::VectorXd& x) {
        const ModelComponent c = unpack(f, x.data());
        Eigen::VectorXd r(static_cast<Eigen::Index>(d.y.size()));
        for (std::size_t i = 0; i < d.y.size(); ++i) r[static_cast<Eigen::Index>(i)] = eval_component(c, q.kind, d.theta[i]) - d.y[i];
        return r;
    };

    const auto thetas = direction_seeds(d, q, theta_lo, theta_hi);
    const double b_seeds[] = {5.0, 50.0};
    const double l_seeds[] = {0.3, 0.7};
    for (double t : thetas) {
        const double a0 = std::max(value_near(d, t), 1e-6);
        for (double a : a_seeds) {
            ModelComponent s;
            s.family = f;
            s.a0 = a0;
            s.a_a = std::clamp(a, o.a_min, o.a_max);
            s.theta_a = t;
            std::vector<ModelComponent> starts;
            if (f == Family::Backscattering) {
                for (double b : b_seeds)
                    for (double l : l_seeds) {
                        s.a_b = b;
                        s.lambda = l;
                        starts.push_back(s);
                    }
            } else {
                starts.push_back(s);
            }
            for (const auto& st : starts) {
                const LmResult r = levenberg_marquardt(residual, pack(st), lo, hi);
                const ModelComponent c = unpack(f, r.x.data());
                const double mse = component_mse(c, q.kind, d);
                if (mse < best.mse) {
                    best.c = c;
                    best.mse = mse;
                }
                best.converged = best.converged || r.converged;
            }
        }
    }
    return best;
}

Data pattern_data(const AngularPattern& p) {
    if (p.angles.size() != p.values.size() || p.angles.empty()) throw InvalidArgument("fit_model: malformed pattern");
    Data d;
    d.theta = p.angles;
    d.y = p.magnitudes();
    return d;
}

constexpr double kDirectiveSeeds[] = {5.0, 50.0, 500.0, 1500.0};

ScatterModel fit_hybrid(const Data& d, const Quadrant& q, const FitOptions& o) {
    // 1. narrow specular lobe on a window around the specular direction
    Data win;
    for (std::size_t i = 0; i < d.y.size(); ++i) {
        if (std::abs(d.theta[i] - q.specular) <= o.specular_window + 1e-9) {
            win.theta.push_back(d.theta[i]);
            win.y.push_back(d.y[i]);
        }
    }
    if (win.y.size() < 3) throw InvalidArgument("fit_model: specular window holds fewer than 3 samples");
    const double spec_seeds[] = {500.0, 1500.0, 5000.0};
    const ComponentFit spec = fit_component(win, Family::Directive, q, o, q.specular - o.specular_window,
                                            q.specular + o.specular_window, spec_seeds);

    // 2. diffuse part fitted to what the specular lobe leaves, in power
    Data rest = d;
    for (std::size_t i = 0; i < d.y.size(); ++i) {
        const double s = eval_component(spec.c, q.kind, d.theta[i]);
        rest.y[i] = std::sqrt(std::max(d.y[i] * d.y[i] - s * s, 0.0));
    }
    ComponentFit diff;
    for (Family f : {Family::Lambertian, Family::Directive, Family::Backscattering}) {
        ComponentFit c = fit_component(rest, f, q, o, q.lo, q.hi, kDirectiveSeeds);
        if (c.mse < diff.mse) diff = c;
    }

    // 3. joint polish of both components
    const Family df = diff.c.family;
    const int ns = 3, nd = component_params(df);
    Eigen::VectorXd lo(ns + nd), hi(ns + nd), x0(ns + nd);
    {
        Eigen::VectorXd l1, h1, l2, h2;
        bounds(Family::Directive, q, o, q.specular - o.specular_window, q.specular + o.specular_window, l1, h1);
        bounds(df, q, o, q.lo, q.hi, l2, h2);
        lo << l1, l2;
        hi << h1, h2;
        x0 << pack(spec.c), pack(diff.c);
    }
    auto residual = [&](const Eigen::VectorXd& x) {
        const ModelComponent s = unpack(Family::Directive, x.data());
        const ModelComponent c = unpack(df, x.data() + ns);
        Eigen::VectorXd r(static_cast<Eigen::Index>(d.y.size()));
        for (std::size_t i = 0; i < d.y.size(); ++i) {
            const double a = eval_component(s, q.kind, d.theta[i]);
            const double b = eval_component(c, q.kind, d.theta[i]);
            r[static_cast<Eigen::Index>(i)] = std::sqrt(a * a + b * b) - d.y[i];
        }
        return r;
    };
    const LmResult r = levenberg_marquardt(residual, x0, lo, hi);

    ScatterModel m;
    m.family = Family::HybridDirective;
    m.kind = q.kind;
    m.specular = unpack(Family::Directive, r.x.data());
    m.diffuse = unpack(df, r.x.data() + ns);
    m.specular_mse = component_mse(m.specular, q.kind, win);
    Data rest2 = d;
    for (std::size_t i = 0; i < d.y.size(); ++i) {
        const double s = eval_component(m.specular, q.kind, d.theta[i]);
        rest2.y[i] = std::sqrt(std::max(d.y[i] * d.y[i] - s * s, 0.0));
    }
    m.diffuse_mse = component_mse(m.diffuse, q.kind, rest2);
    if (!(spec.converged || diff.converged || r.converged))
        throw InvalidArgument("fit_model: HD fit did not converge");
    return m;
}

}  // namespace

ScatterModel fit_model(const AngularPattern& pattern, Family family, const FitOptions& opts) {
    if (pattern.kind == PatternKind::RCS) throw InvalidArgument("fit_model: RCS patterns are not fitted");
    const Data d = pattern_data(pattern);
    const Quadrant q = quadrant_of(pattern);
    ScatterModel m;
    if (family == Family::HybridDirective) {
        m = fit_hybrid(d, q, opts);
    } else {
        const ComponentFit c = fit_component(d, family, q, opts, q.lo, q.hi, kDirectiveSeeds);
        if (!c.converged) {
            std::ostringstream os;
            os << "fit_model: no start converged for " << to_string(family) << " (best mse " << c.mse << ")";
            throw InvalidArgument(os.str());
        }
        m.family = family;
        m.kind = q.kind;
        m.main = c.c;
    }
    m.theta_i = pattern.theta_i;
    m.sigma_h = pattern.sigma_h_upper;
    m.mse = model_mse(m, d.theta, d.y);
    return m;
}

Selection select_model(const AngularPattern& pattern, const SelectionOptions& opts) {
    Selection s;
    for (Family f : {Family::Lambertian, Family::Directive, Family::Backscattering, Family::HybridDirective})
        s.candidates.push_back(fit_model(pattern, f, opts.fit));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : s.candidates) best = std::min(best, c.mse);
    const double limit = best * (1.0 + opts.tie_tolerance) + 1e-15;
    const ScatterModel* pick = nullptr;
    for (const auto& c : s.candidates) {
        if (c.mse > limit) continue;
        if (!pick || c.parameter_count() < pick->parameter_count() ||
            (c.parameter_count() == pick->parameter_count() && c.mse < pick->mse))
            pick = &c;
    }
    s.chosen = *pick;
    return s;
}

namespace {

void write_component(std::ostream& os, const ModelComponent& c, double mse) {
    os << to_string(c.family) << ' ' << c.a0 << ' ' << c.a_a << ' ' << c.a_b << ' ' << c.lambda << ' ' << c.theta_a
       << ' ' << mse;
}

ModelComponent read_component(std::istringstream& ls, const std::string& fam, double& mse) {
    ModelComponent c;
    c.family = family_from_string(fam);
    if (c.family == Family::HybridDirective) throw InvalidArgument("model file: nested HD component");
    if (!(ls >> c.a0 >> c.a_a >> c.a_b >> c.lambda >> c.theta_a >> mse))
        throw InvalidArgument("model file: malformed component row");
    if (c.a0 < 0.0 || c.a_a < 0.0 || c.a_b < 0.0 || c.lambda < 0.0 || c.lambda > 1.0)
        throw InvalidArgument("model file: parameter out of range");
    return c;
}

}  // namespace

void write_model(std::ostream& os, const ScatterModel& m) {
    os << std::setprecision(10);
    os << "## kind " << to_string(m.kind) << " theta_i " << m.theta_i << " sigma_h " << m.sigma_h << '\n';
    os << "# family A0 aA aB Lambda thetaA mse\n";
    if (m.family != Family::HybridDirective) {
        write_component(os, m.main, m.mse);
        os << '\n';
        return;
    }
    os << "HD 0 0 0 0 0 " << m.mse << '\n';
    os << "specular ";
    write_component(os, m.specular, m.specular_mse);
    os << "\ndiffuse ";
    write_component(os, m.diffuse, m.diffuse_mse);
    os << '\n';
}

ScatterModel read_model(std::istream& is) {
    ScatterModel m;
    bool have_main = false, have_spec = false, have_diff = false;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line.rfind("##", 0) == 0) {
            ls.ignore(2);
            std::string key;
            while (ls >> key) {
                if (key == "kind") {
                    std::string k;
                    ls >> k;
                    m.kind = pattern_kind_from_string(k);
                } else if (key == "theta_i") {
                    ls >> m.theta_i;
                } else if (key == "sigma_h") {
                    ls >> m.sigma_h;
                } else {
                    std::string skip;
                    ls >> skip;
                }
            }
            continue;
        }
        if (line[0] == '#') continue;
        std::string head;
        ls >> head;
        if (head == "specular" || head == "diffuse") {
            std::string fam;
            ls >> fam;
            double mse = 0.0;
            ModelComponent c = read_component(ls, fam, mse);
            if (head == "specular") {
                m.specular = c;
                m.specular_mse = mse;
                have_spec = true;
            } else {
                m.diffuse = c;
                m.diffuse_mse = mse;
                have_diff = true;
            }
        } else if (head == "HD") {
            m.family = Family::HybridDirective;
            double z;
            for (int i = 0; i < 5; ++i) ls >> z;
            if (!(ls >> m.mse)) throw InvalidArgument("model file: malformed HD row");
            have_main = true;
        } else {
            m.main = read_component(ls, head, m.mse);
            m.family = m.main.family;
            have_main = true;
        }
    }
    if (!have_main) throw InvalidArgument("model file: no model row");
    if (m.family == Family::HybridDirective && !(have_spec && have_diff))
        throw InvalidArgument("model file: HD needs specular and diffuse rows");
    return m;
}

}  // namespace roughslab
