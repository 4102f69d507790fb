#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace casimir_pulse {

// Calls fn(i) for i in [0, count), split into contiguous blocks across threads.
// Each index writes only its own output slot, so results do not depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1U, threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t block = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * block;
        const std::size_t end = std::min(count, begin + block);
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) {
                    fn(i);
                }
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

// Explicit request wins; otherwise CASIMIR_PULSE_THREADS; otherwise 1.
inline unsigned resolve_thread_count(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("CASIMIR_PULSE_THREADS")) {
        try {
            const long value = std::stol(env);
            if (value > 0) {
                return static_cast<unsigned>(value);
            }
        } catch (const std::exception&) {
        }
    }
    return 1;
}

} // namespace casimir_pulse
