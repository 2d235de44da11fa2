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

#ifndef SIBCAST_PARALLEL_HPP
#define SIBCAST_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sibcast
{
    // Worker count: SIBCAST_WORKERS if set and positive, else the hardware concurrency.
    inline int default_workers()
    {
        if (const char *env = std::getenv("SIBCAST_WORKERS"))
        {
            try
            {
                const int n = std::stoi(env);
                if (n > 0)
                    return n;
            }
            catch (const std::exception &)
            {
            }
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    // Evaluates fn(i) for i in [0, n) on a pool of threads and returns the
    // results in index order. fn must derive all randomness from i, which makes
    // the output independent of the worker count.
    template <class T, class Fn>
    std::vector<T> run_trials(std::size_t n, Fn &&fn, int workers = 0)
    {
        std::vector<T> out(n);
        if (workers <= 0)
            workers = default_workers();
        const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(n, 1));
        if (w <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                out[i] = fn(i);
            return out;
        }
        std::exception_ptr failure;
        std::mutex failure_lock;
        std::vector<std::thread> pool;
        pool.reserve(w);
        for (std::size_t t = 0; t < w; ++t)
            pool.emplace_back(
                [&, t]
                {
                    try
                    {
                        // strided assignment balances trials whose cost drifts with i
                        for (std::size_t i = t; i < n; i += w)
                            out[i] = fn(i);
                    }
                    catch (...)
                    {
                        std::lock_guard<std::mutex> g(failure_lock);
                        if (!failure)
                            failure = std::current_exception();
                    }
                });
        for (auto &th : pool)
            th.join();
        if (failure)
            std::rethrow_exception(failure);
        return out;
    }
}

#endif
