#include "loadcast/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace loadcast {

int default_thread_count() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

void parallel_chunks(std::size_t n, std::size_t grain, int threads,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (grain == 0) grain = 1;
    const std::size_t chunk_count = (n + grain - 1) / grain;

    auto run_chunk = [&](std::size_t c) {
        const std::size_t begin = c * grain;
        const std::size_t end = std::min(begin + grain, n);
        fn(begin, end);
    };

    if (threads <= 1 || chunk_count == 1) {
        for (std::size_t c = 0; c < chunk_count; ++c) run_chunk(c);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunk_count) return;
            try {
                run_chunk(c);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const std::size_t worker_count =
        std::min<std::size_t>(static_cast<std::size_t>(threads), chunk_count);
    std::vector<std::thread> pool;
    pool.reserve(worker_count - 1);
    for (std::size_t i = 1; i < worker_count; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace loadcast
