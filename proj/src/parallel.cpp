#include "hwdd/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace hwdd {

unsigned workerCount() {
    unsigned n = 0;
    if (const char* env = std::getenv("HWDD_THREADS")) n = std::strtoul(env, nullptr, 10);
    if (n == 0) n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

namespace {
thread_local bool insideParallelRegion = false;
}

void parallelFor(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = workerCount();
    if (insideParallelRegion || workers <= 1 || n < 2 * workers) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            insideParallelRegion = true;
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(error);
}

}  // namespace hwdd
