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

#ifndef QCAT_CONFIG_HPP
#define QCAT_CONFIG_HPP

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qcat {

/// Invalid physical or numerical parameters (CLI exit code 2).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A computation would exceed the configured size or time budget (CLI exit code 3).
struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numerical invariant (unitarity, trace, positivity, entropy bounds) was violated (CLI exit code 4).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool is_power_of_two(std::size_t x) {
    return x != 0 && (x & (x - 1)) == 0;
}

/// Checked integer power; throws budget_error on overflow of std::size_t.
inline std::size_t checked_pow(std::size_t base, std::size_t exponent) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exponent; i++) {
        if (base != 0 && r > std::numeric_limits<std::size_t>::max() / base) {
            throw budget_error("integer power overflows: " + std::to_string(base) + "^" + std::to_string(exponent));
        }
        r *= base;
    }
    return r;
}

/// Shape of the multi-particle lattice: one big axis of size `big` followed by
/// `particles` small axes of size `small`, row-major with the big axis leading.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// 16 lowercase hex digits.
inline std::string hex64(std::uint64_t h) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; i--) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

struct Shape {
    std::size_t big = 2;
    std::size_t small = 2;
    std::size_t particles = 0;

    std::size_t num_axes() const {
        return particles + 1;
    }
    std::size_t axis_size(std::size_t axis) const {
        return axis == 0 ? big : small;
    }
    /// Number of small-particle configurations per big-particle site (n^I).
    std::size_t small_volume() const {
        return checked_pow(small, particles);
    }
    /// Total Hilbert-space dimension N * n^I.
    std::size_t total() const {
        return big * small_volume();
    }
    /// Distance in the flat array between neighbours along `axis`.
    std::size_t stride(std::size_t axis) const {
        return checked_pow(small, particles - axis);
    }

    bool operator==(const Shape &) const = default;
};

/// All physical and numerical parameters of one run.
///
/// Units follow the torus convention L = T = h = 1, so the big-particle mass is
/// M = N, the small-particle mass is m = n and the kick strength is fixed by
/// kappa T^2 / M = 1.
struct SystemConfig {
    std::size_t N = 16;
    std::size_t n = 2;
    std::size_t I = 0;
    /// Lattice shift of each small particle in units of 1/N, each in [0, N/n).
    std::vector<std::size_t> shifts;
    /// Total scattering phase accumulated per period at a coincidence point.
    double V = 0.0;
    /// Trotter substeps per period.
    std::size_t R = 16;
    /// Number of partition cells along the big-particle position.
    std::size_t K = 4;
    std::size_t J_max = 6;
    /// Largest admissible Hilbert-space dimension.
    std::size_t max_dim = std::size_t{1} << 12;

    Shape shape() const {
        return Shape{N, n, I};
    }
    std::size_t ratio() const {
        return N / n;
    }

    /// Shifts s_i = i mod (N/n), distinct whenever I <= N/n.
    static std::vector<std::size_t> default_shifts(std::size_t N, std::size_t n, std::size_t I) {
        std::vector<std::size_t> s(I);
        std::size_t p = n == 0 ? 1 : N / n;
        for (std::size_t i = 0; i < I; i++) {
            s[i] = p == 0 ? 0 : i % p;
        }
        return s;
    }

    /// Fills defaulted fields (shifts) and checks every invariant.
    void validate() {
        if (!is_power_of_two(N) || N < 2) {
            throw config_error("N must be a power of two >= 2 (got " + std::to_string(N) + ")");
        }
        if (!is_power_of_two(n) || n < 2) {
            throw config_error("n must be a power of two >= 2 (got " + std::to_string(n) + ")");
        }
        if (N % n != 0) {
            throw config_error(
                "n must divide N (got N=" + std::to_string(N) + ", n=" + std::to_string(n) + ")");
        }
        if (shifts.empty() && I > 0) {
            shifts = default_shifts(N, n, I);
        }
        if (shifts.size() != I) {
            throw config_error(
                "shifts must list exactly I=" + std::to_string(I) + " entries (got " +
                std::to_string(shifts.size()) + ")");
        }
        for (std::size_t i = 0; i < I; i++) {
            if (shifts[i] >= ratio()) {
                throw config_error(
                    "shift s_" + std::to_string(i + 1) + "=" + std::to_string(shifts[i]) +
                    " out of range [0, N/n - 1 = " + std::to_string(ratio() - 1) + "]");
            }
        }
        if (R < 1) {
            throw config_error("R must be >= 1");
        }
        if (K < 1 || N % K != 0) {
            throw config_error(
                "K must divide N (got N=" + std::to_string(N) + ", K=" + std::to_string(K) + ")");
        }
        if (J_max < 1) {
            throw config_error("J_max must be >= 1");
        }
        if (!(V == V) || V < 0 || V > 1e12) {
            throw config_error("V must be a finite non-negative number");
        }
        std::size_t dim = 0;
        try {
            dim = shape().total();
        } catch (const budget_error &) {
            throw budget_error("Hilbert-space dimension N*n^I overflows");
        }
        if (dim > max_dim) {
            throw budget_error(
                "Hilbert-space dimension N*n^I=" + std::to_string(dim) + " exceeds the budget max_dim=" +
                std::to_string(max_dim));
        }
    }

    /// Stable 64-bit FNV-1a hash of the physical parameters (not of J_max or budgets).
    std::uint64_t hash() const {
        std::string s = "N=" + std::to_string(N) + ";n=" + std::to_string(n) + ";I=" + std::to_string(I) + ";s=";
        for (auto v : shifts) {
            s += std::to_string(v) + ",";
        }
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof(buf), V);
        s += ";V=" + std::string(buf, res.ptr) + ";R=" + std::to_string(R) + ";K=" + std::to_string(K);
        return fnv1a(s);
    }

    std::string hash_hex() const {
        return hex64(hash());
    }
};

}  // namespace qcat

#endif
