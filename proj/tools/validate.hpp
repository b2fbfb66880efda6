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

#include <iosfwd>

namespace roughslab::cli {

struct ValidateOptions {
    double cells_per_wavelength = 35.0;
    double flat_tol_db = 0.5;
    double ntff_tol_db = 0.3;
    double friis_tol_db = 0.1;
    double passivity_limit = 1.02;
    double sidelobe_db = 35.0;
    bool quick = false;  // skip FDTD runs
};

/// Oracle suite; one `PASS|FAIL name measured tolerance` line per check.
bool run_validation(const ValidateOptions& o, std::ostream& os);

}  // namespace roughslab::cli
