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

#ifndef QCAT_FFT_HPP
#define QCAT_FFT_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qcat/config.hpp"

namespace qcat {

using cplx = std::complex<double>;

/// Unitary radix-2 DFT of a fixed power-of-two length.
///
/// transform(x, +1) computes c_k = d^{-1/2} sum_j x_j e^{+2 pi i k j / d} and
/// transform(x, -1) its inverse. Twiddles are tabulated once with direct
/// cos/sin evaluation (no recurrences).
class Radix2Dft {
   public:
    explicit Radix2Dft(std::size_t d) : size_(d), twiddle_(d / 2), reversed_(d) {
        if (!is_power_of_two(d)) {
            throw std::invalid_argument("DFT length must be a power of two (got " + std::to_string(d) + ")");
        }
        for (std::size_t m = 0; m < d / 2; m++) {
            double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(d);
            twiddle_[m] = cplx(std::cos(angle), std::sin(angle));
        }
        std::size_t bits = 0;
        while ((std::size_t{1} << bits) < d) {
            bits++;
        }
        for (std::size_t i = 0; i < d; i++) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; b++) {
                if (i & (std::size_t{1} << b)) {
                    r |= std::size_t{1} << (bits - 1 - b);
                }
            }
            reversed_[i] = r;
        }
        scale_ = 1.0 / std::sqrt(static_cast<double>(d));
    }

    std::size_t size() const {
        return size_;
    }

    /// In-place transform of a contiguous buffer of length size().
    void transform(std::span<cplx> x, int sign) const {
        const std::size_t d = size_;
        for (std::size_t i = 0; i < d; i++) {
            if (i < reversed_[i]) {
                std::swap(x[i], x[reversed_[i]]);
            }
        }
        for (std::size_t len = 2; len <= d; len <<= 1) {
            std::size_t half = len / 2;
            std::size_t step = d / len;
            for (std::size_t start = 0; start < d; start += len) {
                for (std::size_t m = 0; m < half; m++) {
                    cplx w = twiddle_[m * step];
                    if (sign < 0) {
                        w = std::conj(w);
                    }
                    cplx a = x[start + m];
                    cplx b = x[start + m + half] * w;
                    x[start + m] = a + b;
                    x[start + m + half] = a - b;
                }
            }
        }
        for (auto &v : x) {
            v *= scale_;
        }
    }

    /// Transforms every line of `data` along `axis` of `shape`.
    void transform_axis(std::span<cplx> data, const Shape &shape, std::size_t axis, int sign,
                        std::vector<cplx> &line) const {
        const std::size_t d = shape.axis_size(axis);
        const std::size_t stride = shape.stride(axis);
        const std::size_t block = d * stride;
        line.resize(d);
        for (std::size_t outer = 0; outer < data.size(); outer += block) {
            for (std::size_t inner = 0; inner < stride; inner++) {
                std::size_t base = outer + inner;
                for (std::size_t j = 0; j < d; j++) {
                    line[j] = data[base + j * stride];
                }
                transform(line, sign);
                for (std::size_t j = 0; j < d; j++) {
                    data[base + j * stride] = line[j];
                }
            }
        }
    }

   private:
    std::size_t size_;
    std::vector<cplx> twiddle_;
    std::vector<std::size_t> reversed_;
    double scale_ = 1.0;
};

}  // namespace qcat

#endif
