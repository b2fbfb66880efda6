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

#include "roughslab/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "roughslab/rng.hpp"

namespace roughslab {

std::string to_string(Sampling s) { return s == Sampling::LatinHypercube ? "lhs" : "iid"; }

Sampling sampling_from_string(const std::string& s) {
    if (s == "lhs") return Sampling::LatinHypercube;
    if (s == "iid") return Sampling::IID;
    throw InvalidArgument("unknown sampling '" + s + "' (expected lhs or iid)");
}

void EnsembleSpec::validate() const {
    if (n_realizations < 1) throw InvalidArgument("ensemble: n_realizations must be >= 1");
    if (sigma_h_upper < 0.0 || sigma_h_lower < 0.0) throw InvalidArgument("ensemble: sigma_h must be >= 0");
    if ((sigma_h_upper > 0.0 || sigma_h_lower > 0.0) && !(corr_length > 0.0))
        throw InvalidArgument("ensemble: corr_length must be > 0 for rough interfaces");
    if (jobs < 1) throw InvalidArgument("ensemble: jobs must be >= 1");
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

LhsMatrix ensemble_draws(const EnsembleSpec& spec) {
    const int n = spec.scene.aperture_cells;
    const int dims = 2 * n;
    if (spec.sampling == Sampling::LatinHypercube) return latin_hypercube_seeds(spec.n_realizations, dims, spec.master_seed);
    LhsMatrix m;
    m.rows = spec.n_realizations;
    m.cols = dims;
    m.values.resize(static_cast<std::size_t>(m.rows) * dims);
    for (int r = 0; r < m.rows; ++r) {
        CounterRng rng(spec.master_seed, static_cast<std::uint32_t>(r));
        for (int c = 0; c < dims; ++c) m.values[static_cast<std::size_t>(r) * dims + c] = rng.normal();
    }
    return m;
}

namespace {

SurfaceSpec interface_spec(const EnsembleSpec& spec, const GridLayout& probe_layout, double sigma) {
    SurfaceSpec s;
    s.n_points = spec.scene.aperture_cells;
    s.spacing = probe_layout.grid.dx;
    s.rms_height = sigma;
    s.corr_length = spec.corr_length > 0.0 ? spec.corr_length : probe_layout.grid.dx;
    s.kind = spec.spectrum;
    s.seed = spec.master_seed;
    return s;
}

}  // namespace

EnsembleResult run_ensemble(const EnsembleSpec& spec, const ProgressFn& progress) {
    spec.validate();
    const int n = spec.n_realizations;
    const int np = spec.scene.aperture_cells;

    // Grid spacing does not depend on the margin, so a provisional layout
    // gives dx for the profiles.
    SlabScene provisional = spec.scene;
    provisional.upper_heights.clear();
    provisional.lower_heights.clear();
    provisional.roughness_margin = 0.0;
    const GridLayout pre = plan_layout(provisional, spec.options);

    const LhsMatrix draws = ensemble_draws(spec);
    std::vector<std::vector<double>> upper(static_cast<std::size_t>(n)), lower(static_cast<std::size_t>(n));
    double hmax = 0.0;
    for (int r = 0; r < n; ++r) {
        auto row = draws.row(r);
        if (spec.sigma_h_upper > 0.0) {
            upper[static_cast<std::size_t>(r)] =
                generate_surface(interface_spec(spec, pre, spec.sigma_h_upper), row.subspan(0, static_cast<std::size_t>(np))).heights;
        }
        if (spec.sigma_h_lower > 0.0) {
            lower[static_cast<std::size_t>(r)] =
                generate_surface(interface_spec(spec, pre, spec.sigma_h_lower), row.subspan(static_cast<std::size_t>(np))).heights;
        }
        for (double h : upper[static_cast<std::size_t>(r)]) hmax = std::max(hmax, std::abs(h));
        for (double h : lower[static_cast<std::size_t>(r)]) hmax = std::max(hmax, std::abs(h));
    }

    SlabScene scene = provisional;
    scene.roughness_margin = hmax;
    scene.corr_length = spec.corr_length;
    SlabSimulator sim(scene, spec.options);
    (void)sim.reference();  // computed once before any concurrent use

    EnsembleResult res;
    res.n_realizations = n;
    res.max_abs_height = hmax;
    res.abs_r.resize(static_cast<std::size_t>(n));
    res.abs_t.resize(static_cast<std::size_t>(n));
    res.power_ratio.assign(static_cast<std::size_t>(n), 0.0);
    res.manifest.resize(static_cast<std::size_t>(n));

    Coefficients first;
    std::atomic<int> done{0};
    std::exception_ptr failure;
    std::mutex mu;
    long failed_index = -1;

#pragma omp parallel for num_threads(spec.jobs) schedule(dynamic, 1)
    for (int r = 0; r < n; ++r) {
        {
            std::lock_guard<std::mutex> lock(mu);
            if (failure) continue;
        }
        try {
            const ProbeRecord rec = sim.run(upper[static_cast<std::size_t>(r)], lower[static_cast<std::size_t>(r)]);
            Coefficients c = extract_coefficients(rec);
            res.abs_r[static_cast<std::size_t>(r)] = c.reflection.magnitudes();
            res.abs_t[static_cast<std::size_t>(r)] = c.transmission.magnitudes();
            res.power_ratio[static_cast<std::size_t>(r)] = power_balance(rec).ratio();
            if (r == 0) first = std::move(c);
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!failure || r < failed_index) {
                failure = std::current_exception();
                failed_index = r;
            }
        }
        const int d = ++done;
        if (progress) {
            std::lock_guard<std::mutex> lock(mu);
            progress(d, n);
        }
    }
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const StabilityError& e) {
            throw StabilityError(std::string(e.what()) + " (realization " + std::to_string(failed_index) +
                                     ", master seed " + std::to_string(spec.master_seed) + ")",
                                 e.step());
        }
    }

    for (int r = 0; r < n; ++r) {
        std::ostringstream os;
        os << "realization " << r << " sampling " << to_string(spec.sampling) << " master_seed " << spec.master_seed
           << " row " << r << " upper_cols 0-" << np - 1 << " lower_cols " << np << '-' << 2 * np - 1;
        res.manifest[static_cast<std::size_t>(r)] = os.str();
    }

    res.mean_r = first.reflection;
    res.mean_t = first.transmission;
    for (AngularPattern* p : {&res.mean_r, &res.mean_t}) {
        p->material = spec.material;
        p->sigma_h_upper = spec.sigma_h_upper;
        p->sigma_h_lower = spec.sigma_h_lower;
        p->n_realizations = n;
    }
    finalize_ensemble(res);
    return res;
}

void finalize_ensemble(EnsembleResult& r) {
    const int n = static_cast<int>(r.abs_r.size());
    if (n < 1) throw InvalidArgument("finalize_ensemble: no realizations");
    r.n_realizations = n;
    auto reduce = [&](const std::vector<std::vector<double>>& rows, AngularPattern& mean, std::vector<double>& se) {
        const std::size_t m = rows.front().size();
        mean.values.assign(m, Complex{});
        se.assign(m, 0.0);
        std::vector<double> col(static_cast<std::size_t>(n));
        for (std::size_t a = 0; a < m; ++a) {
            for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = rows[static_cast<std::size_t>(i)][a];
            const double mu = pairwise_sum(col) / n;
            mean.values[a] = Complex(mu, 0.0);
            if (n > 1) {
                for (int i = 0; i < n; ++i) {
                    const double d = col[static_cast<std::size_t>(i)] - mu;
                    col[static_cast<std::size_t>(i)] = d * d;
                }
                const double var = pairwise_sum(col) / (n - 1);
                se[a] = std::sqrt(var / n);
            }
        }
    };
    reduce(r.abs_r, r.mean_r, r.stderr_r);
    reduce(r.abs_t, r.mean_t, r.stderr_t);
}

double rms_error_infnorm(const EnsembleResult& r) {
    double worst = 0.0;
    auto scan = [&](const AngularPattern& mean, const std::vector<double>& se) {
        for (std::size_t a = 0; a < se.size(); ++a) {
            const double mu = mean.values[a].real();
            if (mu <= 0.0) continue;
            worst = std::max(worst, 20.0 * std::log10((mu + se[a]) / mu));
        }
    };
    scan(r.mean_r, r.stderr_r);
    scan(r.mean_t, r.stderr_t);
    return worst;
}

void write_ensemble_pattern(std::ostream& os, const AngularPattern& p, double stderr_db_max) {
    write_pattern(os, p);
    os << "# stderr_db_max " << std::setprecision(6) << stderr_db_max << '\n';
}

void write_manifest(std::ostream& os, const EnsembleSpec& spec, const EnsembleResult& r) {
    os << "# n_realizations " << r.n_realizations << " master_seed " << spec.master_seed << " sampling "
       << to_string(spec.sampling) << " max_abs_height " << std::setprecision(10) << r.max_abs_height << '\n';
    for (const auto& line : r.manifest) os << line << '\n';
}

}  // namespace roughslab
