// admmloc: a persistent worker pool with bulk-synchronous parallel_for.
#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace admmloc {

/**
 * Fixed-size worker pool for bulk-synchronous phases. parallel_for splits
 * [0, count) into one contiguous chunk per worker (the calling thread takes
 * the first chunk) and returns only after every index has been processed.
 * Results never depend on the worker count as long as the body writes only
 * to its own index's slots.
 */
class WorkerPool {
public:
    /** threads <= 1 runs everything inline on the calling thread. */
    explicit WorkerPool(int threads);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    /** Total workers including the calling thread. */
    int size() const { return static_cast<int>(workers_.size()) + 1; }

    void parallel_for(int count, const std::function<void(int)>& body);

private:
    void worker_loop(int slot);
    void run_chunk(int slot) const;

    std::vector<std::thread> workers_;
    mutable std::mutex mutex_;
    std::condition_variable start_cv_;
    std::condition_variable done_cv_;
    std::uint64_t generation_ = 0;
    int unfinished_ = 0;
    int count_ = 0;
    const std::function<void(int)>* body_ = nullptr;
    bool stopping_ = false;
};

}  // namespace admmloc
