// SPDX-License-Identifier: Apache-2.0
//
// sibcast - system-information broadcast simulator for massive MIMO links
// Copyright (C) 2026 The sibcast authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SIBCAST_RNG_HPP
#define SIBCAST_RNG_HPP

#include "linalg.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace sibcast
{
    inline std::uint64_t splitmix64(std::uint64_t &state)
    {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // FNV-1a; used to turn scenario labels into stream identifiers.
    constexpr std::uint64_t stream_tag(std::string_view label)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : label)
        {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    // Seed for trial `index` of stream `stream` under a 64-bit master seed.
    // Depends only on the triple, never on which worker runs the trial.
    inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index)
    {
        std::uint64_t s = master;
        std::uint64_t a = splitmix64(s);
        s = a ^ stream;
        std::uint64_t b = splitmix64(s);
        s = b ^ (index * 0xD1B54A32D192ED03ULL);
        splitmix64(s);
        return splitmix64(s);
    }

    class RandomStream
    {
    public:
        explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
        RandomStream(std::uint64_t master, std::uint64_t stream, std::uint64_t index)
            : engine_(derive_seed(master, stream, index)) {}

        double gaussian() { return normal_(engine_); }
        double uniform() { return uniform_(engine_); }
        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }
        std::size_t index_below(std::size_t n)
        {
            return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
        }

        // CN(0, variance)
        cd complex_gaussian(double variance = 1.0)
        {
            const double s = std::sqrt(0.5 * variance);
            const double re = normal_(engine_);
            const double im = normal_(engine_);
            return {s * re, s * im};
        }

        CVec complex_gaussian_vector(Eigen::Index n, double variance = 1.0)
        {
            CVec v(n);
            for (Eigen::Index i = 0; i < n; ++i)
                v(i) = complex_gaussian(variance);
            return v;
        }

        CMat complex_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double variance = 1.0)
        {
            CMat m(rows, cols);
            for (Eigen::Index j = 0; j < cols; ++j)
                for (Eigen::Index i = 0; i < rows; ++i)
                    m(i, j) = complex_gaussian(variance);
            return m;
        }

        std::mt19937_64 &engine() { return engine_; }

    private:
        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_{0.0, 1.0};
        std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    };
}

#endif
