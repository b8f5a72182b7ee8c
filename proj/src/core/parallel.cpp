#include "trisplat/core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace trisplat {
namespace {

int clamp_threads(int n) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (n <= 0) n = hw;
    return std::min(n, 256);
}

int initial_threads() {
    if (const char* env = std::getenv("TRISPLAT_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return clamp_threads(n);
    }
    return clamp_threads(0);
}

// Lazily started pool; workers pull chunk indices from a shared counter.
class Pool {
public:
    static Pool& instance() {
        static Pool pool;
        return pool;
    }

    void set_threads(int n) {
        std::lock_guard<std::mutex> lk(config_mutex_);
        threads_ = clamp_threads(n);
    }

    int threads() {
        std::lock_guard<std::mutex> lk(config_mutex_);
        return threads_;
    }

    void run(int64_t nchunks, const std::function<void(int64_t)>& chunk_fn) {
        int nthreads = threads();
        if (nchunks <= 1 || nthreads <= 1) {
            for (int64_t i = 0; i < nchunks; ++i) chunk_fn(i);
            return;
        }
        std::atomic<int64_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto worker = [&]() {
            for (;;) {
                int64_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= nchunks) return;
                try {
                    chunk_fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        };
        int spawn = static_cast<int>(std::min<int64_t>(nthreads, nchunks)) - 1;
        std::vector<std::thread> pool;
        pool.reserve(spawn);
        for (int i = 0; i < spawn; ++i) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
    }

private:
    std::mutex config_mutex_;
    int threads_ = initial_threads();
};

}  // namespace

void set_worker_threads(int n) { Pool::instance().set_threads(n); }

int worker_threads() { return Pool::instance().threads(); }

void parallel_for_chunks(int64_t n, const std::function<void(int64_t, int64_t)>& fn) {
    if (n <= 0) return;
    int nthreads = worker_threads();
    // Fixed chunking: ~4 chunks per thread, independent of runtime scheduling.
    int64_t chunks = std::min<int64_t>(n, std::max<int64_t>(1, int64_t(nthreads) * 4));
    int64_t chunk_size = (n + chunks - 1) / chunks;
    chunks = (n + chunk_size - 1) / chunk_size;
    Pool::instance().run(chunks, [&](int64_t c) {
        int64_t lo = c * chunk_size;
        int64_t hi = std::min(n, lo + chunk_size);
        fn(lo, hi);
    });
}

void parallel_for(int64_t n, const std::function<void(int64_t)>& fn) {
    parallel_for_chunks(n, [&](int64_t lo, int64_t hi) {
        for (int64_t i = lo; i < hi; ++i) fn(i);
    });
}

}  // namespace trisplat
