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

#include <functional>

#include <Eigen/Dense>

namespace roughslab {

struct LmOptions {
    int max_iterations = 300;
    double step_tolerance = 1e-10;  // relative parameter change
    double cost_tolerance = 1e-14;  // relative cost decrease
    double initial_damping = 1e-3;
};

struct LmResult {
    Eigen::VectorXd x;
    double cost = 0.0;  // 0.5 * |r|^2
    int iterations = 0;
    bool converged = false;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Box-constrained Levenberg-Marquardt with a forward-difference Jacobian.
/// Steps are projected onto [lower, upper] and only accepted when the cost
/// drops, so the result is never worse than the start.
LmResult levenberg_marquardt(const ResidualFn& residual, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, const LmOptions& opts = {});

}  // namespace roughslab
