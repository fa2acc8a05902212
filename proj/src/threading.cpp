// admmloc: worker pool implementation.
#include "admmloc/threading.hpp"

#include <algorithm>

namespace admmloc {

WorkerPool::WorkerPool(int threads) {
    const int extra = std::max(0, threads - 1);
    workers_.reserve(extra);
    for (int slot = 1; slot <= extra; ++slot)
        workers_.emplace_back([this, slot] { worker_loop(slot); });
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        stopping_ = true;
        ++generation_;
    }
    start_cv_.notify_all();
    for (auto& t : workers_) t.join();
}

void WorkerPool::run_chunk(int slot) const {
    // Contiguous static partition: chunk boundaries depend only on the pool
    // size, and every index is processed exactly once.
    const int workers = static_cast<int>(workers_.size()) + 1;
    const int begin = static_cast<int>(static_cast<long>(count_) * slot / workers);
    const int end = static_cast<int>(static_cast<long>(count_) * (slot + 1) / workers);
    for (int i = begin; i < end; ++i) (*body_)(i);
}

void WorkerPool::worker_loop(int slot) {
    std::uint64_t seen = 0;
    for (;;) {
        {
            std::unique_lock<std::mutex> lock(mutex_);
            start_cv_.wait(lock, [&] { return generation_ != seen; });
            seen = generation_;
            if (stopping_) return;
        }
        run_chunk(slot);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            if (--unfinished_ == 0) done_cv_.notify_one();
        }
    }
}

void WorkerPool::parallel_for(int count, const std::function<void(int)>& body) {
    if (workers_.empty()) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    {
        std::lock_guard<std::mutex> lock(mutex_);
        count_ = count;
        body_ = &body;
        unfinished_ = static_cast<int>(workers_.size());
        ++generation_;
    }
    start_cv_.notify_all();
    run_chunk(0);
    std::unique_lock<std::mutex> lock(mutex_);
    done_cv_.wait(lock, [&] { return unfinished_ == 0; });
    body_ = nullptr;
}

}  // namespace admmloc
