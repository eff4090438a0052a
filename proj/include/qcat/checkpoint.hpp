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

// Per-level snapshot of the history-operator blocks.
//
// Layout (all integers unsigned little-endian, all reals IEEE-754 binary64
// little-endian):
//
//   offset  size  field
//   0       8     magic "QCATHIST"
//   8       4     format version (= 1)
//   12      4     reserved (= 0)
//   16      8     config hash
//   24      8     K (cells)
//   32      8     J (word length of the stored level)
//   40      8     cell size c (rows of each block)
//   48      8     Hilbert-space dimension
//   56      8     number of stored entropies m
//   64      8m    S(1) .. S(m)
//   ...     16 c^2 K^J   leaves, column-major, each entry (re, im)
//   ...     8     FNV-1a checksum of every preceding byte

#ifndef QCAT_CHECKPOINT_HPP
#define QCAT_CHECKPOINT_HPP

#include <Eigen/Dense>
#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcat/config.hpp"
#include "qcat/histories.hpp"

namespace qcat {

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::array<char, 8> kCheckpointMagic = {'Q', 'C', 'A', 'T', 'H', 'I', 'S', 'T'};

struct Checkpoint {
    std::uint64_t config_hash = 0;
    std::vector<double> entropies;
    HistoryLevel level;
};

namespace detail {

class LeWriter {
   public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; i++) {
            byte(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; i++) {
            byte(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void f64(double v) {
        u64(std::bit_cast<std::uint64_t>(v));
    }
    void byte(std::uint8_t b) {
        buf_.push_back(static_cast<char>(b));
        hash_ ^= b;
        hash_ *= 0x100000001b3ULL;
    }
    std::uint64_t hash() const {
        return hash_;
    }
    const std::string &bytes() const {
        return buf_;
    }

   private:
    std::string buf_;
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

class LeReader {
   public:
    explicit LeReader(std::string bytes) : buf_(std::move(bytes)) {
    }
    std::uint8_t byte() {
        if (pos_ >= buf_.size()) {
            throw std::runtime_error("checkpoint truncated");
        }
        auto b = static_cast<std::uint8_t>(buf_[pos_++]);
        hash_ ^= b;
        hash_ *= 0x100000001b3ULL;
        return b;
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; i++) {
            v |= static_cast<std::uint32_t>(byte()) << (8 * i);
        }
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; i++) {
            v |= static_cast<std::uint64_t>(byte()) << (8 * i);
        }
        return v;
    }
    double f64() {
        return std::bit_cast<double>(u64());
    }
    std::uint64_t hash() const {
        return hash_;
    }
    std::size_t remaining() const {
        return buf_.size() - pos_;
    }

   private:
    std::string buf_;
    std::size_t pos_ = 0;
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace detail

/// Writes atomically: to `path.tmp`, then renamed over `path`.
inline void write_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt) {
    detail::LeWriter w;
    for (char c : kCheckpointMagic) {
        w.byte(static_cast<std::uint8_t>(c));
    }
    w.u32(kCheckpointVersion);
    w.u32(0);
    w.u64(ckpt.config_hash);
    const auto &lvl = ckpt.level;
    w.u64(lvl.cells());
    w.u64(lvl.length());
    w.u64(lvl.cell_size());
    w.u64(lvl.dim());
    w.u64(ckpt.entropies.size());
    for (double s : ckpt.entropies) {
        w.f64(s);
    }
    const auto &leaves = lvl.leaves();
    for (Eigen::Index i = 0; i < leaves.size(); i++) {
        w.f64(leaves.data()[i].real());
        w.f64(leaves.data()[i].imag());
    }
    std::uint64_t sum = w.hash();
    w.u64(sum);

    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open checkpoint for writing: " + tmp.string());
        }
        out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
        if (!out) {
            throw std::runtime_error("failed writing checkpoint: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

inline Checkpoint read_checkpoint(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open checkpoint: " + path.string());
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    detail::LeReader r(std::move(bytes));
    for (char c : kCheckpointMagic) {
        if (r.byte() != static_cast<std::uint8_t>(c)) {
            throw std::runtime_error("not a qcat checkpoint: " + path.string());
        }
    }
    std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    }
    r.u32();
    Checkpoint ckpt;
    ckpt.config_hash = r.u64();
    std::size_t K = r.u64();
    std::size_t J = r.u64();
    std::size_t cell = r.u64();
    std::size_t dim = r.u64();
    std::size_t m = r.u64();
    if (K == 0 || J == 0 || cell == 0 || m > 4096 || cell * cell > r.remaining()) {
        throw std::runtime_error("corrupt checkpoint header: " + path.string());
    }
    ckpt.entropies.resize(m);
    for (auto &s : ckpt.entropies) {
        s = r.f64();
    }
    std::size_t words = checked_pow(K, J);
    std::size_t entries = cell * cell * words;
    if (entries * 16 + 8 != r.remaining()) {
        throw std::runtime_error("checkpoint payload size mismatch: " + path.string());
    }
    Eigen::MatrixXcd leaves(static_cast<Eigen::Index>(cell * cell), static_cast<Eigen::Index>(words));
    for (std::size_t i = 0; i < entries; i++) {
        double re = r.f64();
        double im = r.f64();
        leaves.data()[i] = cplx(re, im);
    }
    std::uint64_t expected = r.hash();
    if (r.u64() != expected) {
        throw std::runtime_error("checkpoint checksum mismatch: " + path.string());
    }
    ckpt.level = HistoryLevel::from_leaves(K, cell, dim, J, std::move(leaves));
    return ckpt;
}

}  // namespace qcat

#endif
