// Copyright 2026 The qcat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QCAT_SPECTRAL_HPP
#define QCAT_SPECTRAL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcat/config.hpp"

namespace qcat {

/// Eigenvalues at or below this are treated as exact zeros in the entropy sum.
inline constexpr double kEigenvalueClamp = 1e-10;
/// Eigenvalues below minus this are a positivity violation, not roundoff.
inline constexpr double kNegativeEigenvalueLimit = 1e-8;

/// Largest |H - H^dagger| entry.
inline double hermiticity_residual(const Eigen::MatrixXcd &h) {
    if (h.size() == 0) {
        return 0.0;
    }
    return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

/// Real spectrum of a Hermitian matrix, sorted descending.
inline std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd &h) {
    if (h.rows() != h.cols()) {
        throw std::invalid_argument("hermitian_eigenvalues needs a square matrix");
    }
    if (h.size() == 0) {
        return {};
    }
    double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (hermiticity_residual(h) > 1e-8 * scale) {
        throw std::invalid_argument(
            "matrix is not Hermitian (residual " + std::to_string(hermiticity_residual(h)) + ")");
    }
    Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw numeric_error("Hermitian eigensolver did not converge");
    }
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

/// -sum lambda ln lambda over a density spectrum, in nats.
inline double von_neumann_entropy(std::span<const double> eigenvalues) {
    double s = 0.0;
    for (double l : eigenvalues) {
        if (l < -kNegativeEigenvalueLimit) {
            throw numeric_error("negative eigenvalue " + std::to_string(l) + " in a density spectrum");
        }
        if (l > kEigenvalueClamp) {
            s -= l * std::log(l);
        }
    }
    return s;
}

}  // namespace qcat

#endif
