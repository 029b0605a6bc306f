// SPDX-License-Identifier: Apache-2.0
#include "u6g/common.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace u6g {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_thread_count(unsigned n)
{
    if (n == 0)
        n = std::max(1u, std::thread::hardware_concurrency());
    g_threads = n;
}

unsigned thread_count() { return g_threads; }

namespace {
// nested calls run inline on the calling worker
thread_local bool tl_in_pool = false;
} // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
{
    unsigned workers = std::min<std::size_t>(g_threads.load(), n);
    if (workers <= 1 || tl_in_pool) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            tl_in_pool = true;
            for (;;) {
                std::size_t i = next++;
                if (i >= n)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lk(err_mu);
                    if (!err)
                        err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
}

} // namespace u6g
