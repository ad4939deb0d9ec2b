// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include "conewalk/threading.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace conewalk {

int resolve_threads(int requested)
{
    if (requested > 0)
        return requested;
    if (char const* env = std::getenv("CONEWALK_THREADS")) {
        int v = std::atoi(env);
        if (v > 0)
            return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_chunks(std::size_t nchunks,
                     int threads,
                     std::function<void(std::size_t)> const& fn)
{
    threads = resolve_threads(threads);
    if (threads <= 1 || nchunks <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c)
            fn(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= nchunks || failed.load())
                return;
            try {
                fn(c);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error)
                    first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::size_t nworkers = std::min<std::size_t>(threads, nchunks);
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (std::size_t i = 0; i < nworkers; ++i)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

}  // namespace conewalk
