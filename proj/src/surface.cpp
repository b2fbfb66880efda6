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

#include "roughslab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fftw3.h>

#include "roughslab/rng.hpp"

namespace roughslab {

namespace {

// RAII wrapper around a single complex-to-complex FFTW plan. FFTW's planner is
// not thread-safe, so plan creation is serialized.
class ForwardDft {
public:
    explicit ForwardDft(int n)
        : n_(n),
          in_(fftw_alloc_complex(static_cast<std::size_t>(n))),
          out_(fftw_alloc_complex(static_cast<std::size_t>(n))) {
#pragma omp critical(roughslab_fftw_planner)
        plan_ = fftw_plan_dft_1d(n, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~ForwardDft() {
#pragma omp critical(roughslab_fftw_planner)
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    ForwardDft(const ForwardDft&) = delete;
    ForwardDft& operator=(const ForwardDft&) = delete;

    Complex* input() { return reinterpret_cast<Complex*>(in_); }
    const Complex* output() const { return reinterpret_cast<const Complex*>(out_); }
    void execute() { fftw_execute(plan_); }
    int size() const { return n_; }

private:
    int n_;
    fftw_complex* in_;
    fftw_complex* out_;
    fftw_plan plan_;
};

}  // namespace

std::string to_string(SpectrumKind kind) {
    return kind == SpectrumKind::Gaussian ? "Gaussian" : "Exponential";
}

SpectrumKind spectrum_kind_from_string(const std::string& name) {
    if (name == "Gaussian" || name == "gaussian") return SpectrumKind::Gaussian;
    if (name == "Exponential" || name == "exponential") return SpectrumKind::Exponential;
    throw InvalidArgument("spectrum_kind: unknown value '" + name + "'");
}

void SurfaceSpec::validate() const {
    if (n_points < 2) throw InvalidArgument("n_points: must be >= 2");
    if (n_points % 2 != 0) throw InvalidArgument("n_points: must be even");
    if (!std::isfinite(spacing) || spacing <= 0.0)
        throw InvalidArgument("spacing: must be finite and > 0");
    if (!std::isfinite(rms_height) || rms_height < 0.0)
        throw InvalidArgument("rms_height: must be finite and >= 0");
    if (!std::isfinite(corr_length) || corr_length <= 0.0)
        throw InvalidArgument("corr_length: must be finite and > 0");
}

double HeightProfile::max_abs_height() const {
    double m = 0.0;
    for (double h : heights) m = std::max(m, std::abs(h));
    return m;
}

double roughness_spectrum(const SurfaceSpec& spec, double k) {
    const double s2 = spec.rms_height * spec.rms_height;
    const double lc = spec.corr_length;
    if (spec.kind == SpectrumKind::Gaussian) {
        return s2 * lc / (2.0 * std::sqrt(kPi)) * std::exp(-k * k * lc * lc / 4.0);
    }
    // Fourier pair of s2 * exp(-|x| / lc).
    return s2 * lc / kPi / (1.0 + k * k * lc * lc);
}

HeightProfile generate_surface(const SurfaceSpec& spec) {
    spec.validate();
    CounterRng rng(spec.seed, 0);
    std::vector<double> normals(static_cast<std::size_t>(spec.n_points));
    for (double& z : normals) z = rng.normal();
    return generate_surface(spec, normals);
}

HeightProfile generate_surface(const SurfaceSpec& spec, std::span<const double> normals) {
    spec.validate();
    const int n = spec.n_points;
    if (static_cast<int>(normals.size()) != n)
        throw InvalidArgument("generate_surface: need exactly N normal draws");

    const double length = spec.length();
    const int half = n / 2;
    auto amplitude = [&](int m) {
        const double k = 2.0 * kPi * m / length;
        return std::sqrt(2.0 * kPi * length * roughness_spectrum(spec, k));
    };

    // Spectral coefficients F(K_m) for m = -N/2+1 .. N/2, stored in DFT order.
    // The real draws at m = 0 and m = N/2 take precedence over the complex
    // branch, and F(-K_m) = conj(F(K_m)) keeps the profile real.
    ForwardDft dft(n);
    Complex* coeff = dft.input();
    coeff[0] = amplitude(0) * normals[0];
    coeff[half] = amplitude(half) * normals[1];
    for (int m = 1; m < half; ++m) {
        const double re = normals[static_cast<std::size_t>(2 * m)];
        const double im = normals[static_cast<std::size_t>(2 * m + 1)];
        const Complex f = amplitude(m) * Complex(re, -im) / std::numbers::sqrt2;
        coeff[m] = f;
        coeff[n - m] = std::conj(f);
    }
    dft.execute();

    HeightProfile profile;
    profile.spec = spec;
    profile.x.resize(static_cast<std::size_t>(n));
    profile.heights.resize(static_cast<std::size_t>(n));
    const Complex* out = dft.output();
    for (int i = 1; i <= n; ++i) {
        const Complex v = out[i % n] / length;
        profile.x[static_cast<std::size_t>(i - 1)] = i * spec.spacing;
        profile.heights[static_cast<std::size_t>(i - 1)] = v.real();
        profile.max_imag_residue = std::max(profile.max_imag_residue, std::abs(v.imag()));
    }
    return profile;
}

SurfaceStatistics surface_statistics(const HeightProfile& profile) {
    SurfaceStatistics st;
    const auto& h = profile.heights;
    const std::size_t n = h.size();
    if (n == 0) return st;
    st.mean = std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(n);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = h[i] - st.mean;
    const double var0 = std::inner_product(d.begin(), d.end(), d.begin(), 0.0);
    st.rms = std::sqrt(var0 / static_cast<double>(n));
    if (var0 <= 0.0) return st;

    const double threshold = std::exp(-1.0);
    double prev = 1.0;
    for (std::size_t lag = 1; lag < n; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) acc += d[i] * d[i + lag];
        const double rho = acc / var0;
        if (rho < threshold) {
            const double frac = (prev - threshold) / (prev - rho);
            st.corr_length = (static_cast<double>(lag - 1) + frac) * profile.spec.spacing;
            return st;
        }
        prev = rho;
    }
    st.corr_length = static_cast<double>(n - 1) * profile.spec.spacing;
    return st;
}

std::vector<double> periodogram(const HeightProfile& profile) {
    const int n = static_cast<int>(profile.size());
    ForwardDft dft(n);
    const double mean =
        std::accumulate(profile.heights.begin(), profile.heights.end(), 0.0) / n;
    for (int i = 0; i < n; ++i) dft.input()[i] = profile.heights[static_cast<std::size_t>(i)] - mean;
    dft.execute();
    const double dx = profile.spec.spacing;
    std::vector<double> w(static_cast<std::size_t>(n / 2 + 1));
    for (int m = 0; m <= n / 2; ++m) {
        w[static_cast<std::size_t>(m)] = std::norm(dft.output()[m]) * dx / (2.0 * kPi * n);
    }
    return w;
}

LhsMatrix latin_hypercube_seeds(int n_realizations, int dims, std::uint64_t master_seed) {
    if (n_realizations < 1) throw InvalidArgument("n_realizations: must be >= 1");
    if (dims < 1) throw InvalidArgument("dims: must be >= 1");
    LhsMatrix m;
    m.rows = n_realizations;
    m.cols = dims;
    m.values.resize(static_cast<std::size_t>(n_realizations) * static_cast<std::size_t>(dims));

    std::vector<int> perm(static_cast<std::size_t>(n_realizations));
#pragma omp parallel for firstprivate(perm) schedule(static)
    for (int c = 0; c < dims; ++c) {
        CounterRng rng(master_seed, static_cast<std::uint32_t>(c));
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = n_realizations - 1; i > 0; --i) {
            const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
        for (int r = 0; r < n_realizations; ++r) {
            const double u = (perm[static_cast<std::size_t>(r)] + rng.uniform()) / n_realizations;
            m.values[static_cast<std::size_t>(r) * dims + c] = normal_quantile(u);
        }
    }
    return m;
}

void write_profile(std::ostream& os, const HeightProfile& p) {
    const auto& s = p.spec;
    os.precision(17);
    os << "# " << s.n_points << ' ' << s.spacing << ' ' << s.rms_height << ' ' << s.corr_length
       << ' ' << to_string(s.kind) << ' ' << s.seed << '\n';
    for (std::size_t i = 0; i < p.size(); ++i) os << p.x[i] << ' ' << p.heights[i] << '\n';
}

HeightProfile read_profile(std::istream& is) {
    HeightProfile p;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line.rfind("##", 0) == 0) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string kind;
            hs >> p.spec.n_points >> p.spec.spacing >> p.spec.rms_height >> p.spec.corr_length >>
                kind >> p.spec.seed;
            if (!hs) throw InvalidArgument("profile file: malformed header");
            p.spec.kind = spectrum_kind_from_string(kind);
            have_header = true;
            continue;
        }
        std::istringstream ls(line);
        double x = 0.0, h = 0.0;
        if (!(ls >> x >> h)) throw InvalidArgument("profile file: malformed row '" + line + "'");
        p.x.push_back(x);
        p.heights.push_back(h);
    }
    if (!have_header) throw InvalidArgument("profile file: missing header");
    if (static_cast<int>(p.size()) != p.spec.n_points)
        throw InvalidArgument("profile file: row count does not match header N");
    return p;
}

}  // namespace roughslab
