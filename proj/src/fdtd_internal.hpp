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

#include "roughslab/fdtd.hpp"

namespace roughslab::detail {

/// Time for a plane wave with transverse index sin_theta to cross `depth`
/// metres vertically in a medium of real permittivity eps_real.
double transit_time(double eps_real, double sin_theta, double depth);

/// Slab round trips needed for the internal echo to fall below -60 dB.
int slab_bounces(const SlabScene& scene);

struct CellMedium {
    double eps = 1.0;
    double sigma = 0.0;
};

/// Area-averaged medium of the cell [x - w/2, x + w/2] x [za, zb]. zu / zl hold
/// the interface depths at the left edge, the node and the right edge.
CellMedium cell_medium(const Medium& cover, const Medium& slab, const Medium& substrate, double za,
                       double zb, const double (&zu)[3], const double (&zl)[3], double width);

CellMedium flat_row_medium(const Medium& cover, const Medium& slab, const Medium& substrate,
                           const GridLayout& layout, int k);

}  // namespace roughslab::detail
