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

#include "roughslab/lm.hpp"

#include <algorithm>
#include <cmath>

#include "roughslab/common.hpp"

namespace roughslab {

LmResult levenberg_marquardt(const ResidualFn& residual, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, const LmOptions& opts) {
    const Eigen::Index n = x0.size();
    if (lower.size() != n || upper.size() != n) throw InvalidArgument("levenberg_marquardt: bound sizes differ");
    x0 = x0.cwiseMax(lower).cwiseMin(upper);

    LmResult res;
    res.x = x0;
    Eigen::VectorXd r = residual(res.x);
    res.cost = 0.5 * r.squaredNorm();
    if (!std::isfinite(res.cost)) throw InvalidArgument("levenberg_marquardt: non-finite residual at start");
    double lambda = -1.0;

    for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
        Eigen::MatrixXd J(r.size(), n);
        for (Eigen::Index j = 0; j < n; ++j) {
            Eigen::VectorXd xp = res.x;
            double h = 1e-7 * std::max(std::abs(res.x[j]), 1.0);
            if (xp[j] + h > upper[j]) h = -h;  // stay inside the box
            xp[j] += h;
            J.col(j) = (residual(xp) - r) / h;
        }
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        if (lambda < 0.0) lambda = opts.initial_damping * std::max(A.diagonal().maxCoeff(), 1e-12);

        bool accepted = false;
        while (!accepted && lambda < 1e16) {
            Eigen::MatrixXd M = A;
            for (Eigen::Index j = 0; j < n; ++j) M(j, j) += lambda * std::max(A(j, j), 1e-12);
            const Eigen::VectorXd step = M.ldlt().solve(-g);
            const Eigen::VectorXd xn = (res.x + step).cwiseMax(lower).cwiseMin(upper);
            const Eigen::VectorXd rn = residual(xn);
            const double cn = 0.5 * rn.squaredNorm();
            if (std::isfinite(cn) && cn < res.cost) {
                const double dx = (xn - res.x).norm() / std::max(res.x.norm(), 1e-12);
                const double dc = (res.cost - cn) / std::max(res.cost, 1e-300);
                res.x = xn;
                r = rn;
                res.cost = cn;
                lambda = std::max(lambda / 3.0, 1e-15);
                accepted = true;
                if (dx < opts.step_tolerance || dc < opts.cost_tolerance) {
                    res.converged = true;
                    return res;
                }
            } else {
                lambda *= 4.0;
            }
        }
        if (!accepted) {
            // No descent direction left inside the box: a (constrained) minimum.
            res.converged = true;
            return res;
        }
    }
    return res;
}

}  // namespace roughslab
