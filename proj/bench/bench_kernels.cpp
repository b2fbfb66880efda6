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

#include <benchmark/benchmark.h>

#include <cmath>

#include <omp.h>

#include "roughslab/common.hpp"
#include "roughslab/fdtd_kernels.hpp"

using namespace roughslab;

namespace {

kernels::YeeGrid make_grid(int n) {
    const double dx = 3e-4, dt = 0.99 / (kC0 * std::sqrt(2.0) / dx);
    kernels::YeeGrid g(n, n, dx, dx, dt, 12, 3);
    for (int k = 1; k < n - 1; ++k)
        for (int i = 1; i < n - 1; ++i) {
            if (k > n / 2) g.set_material(i, k, 2.94, 0.12);
            g.ey[g.at(i, k)] = std::sin(0.1 * i) * std::cos(0.07 * k);
        }
    return g;
}

void BM_step_parallel(benchmark::State& st) {
    auto g = make_grid(static_cast<int>(st.range(0)));
    omp_set_num_threads(static_cast<int>(st.range(1)));
    for (auto _ : st) {
        kernels::update_h(g);
        kernels::update_e(g);
        benchmark::DoNotOptimize(g.ey.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0));
}

void BM_step_reference(benchmark::State& st) {
    auto g = make_grid(static_cast<int>(st.range(0)));
    for (auto _ : st) {
        kernels::update_h_reference(g);
        kernels::update_e_reference(g);
        benchmark::DoNotOptimize(g.ey.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0));
}

}  // namespace

BENCHMARK(BM_step_parallel)->ArgsProduct({{256, 1024}, {1, 2, 4}})->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_step_reference)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond)->UseRealTime();

BENCHMARK_MAIN();
