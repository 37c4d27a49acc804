#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace aic {

// Persistent worker pool for data-parallel loops over contiguous index
// ranges. Work is partitioned statically by index, so a loop body that only
// touches state owned by its indices produces the same result for any worker
// count. With one worker everything runs inline on the caller.
class ThreadPool {
public:
    explicit ThreadPool(unsigned workers) : workers_(workers == 0 ? 1 : workers) {
        for (unsigned t = 1; t < workers_; ++t)
            threads_.emplace_back([this, t] { worker_loop(t); });
    }

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    ~ThreadPool() {
        {
            std::unique_lock lk(mu_);
            stop_ = true;
            ++epoch_;
        }
        cv_.notify_all();
        for (auto& th : threads_) th.join();
    }

    unsigned workers() const { return workers_; }

    // fn(begin, end) is invoked on disjoint chunks covering [0, n).
    void for_range(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
        if (n == 0) return;
        if (workers_ == 1 || n < 2) {
            fn(0, n);
            return;
        }
        {
            std::unique_lock lk(mu_);
            job_ = &fn;
            job_n_ = n;
            pending_ = workers_ - 1;
            ++epoch_;
        }
        cv_.notify_all();
        run_chunk(0, fn, n);
        std::unique_lock lk(mu_);
        done_cv_.wait(lk, [this] { return pending_ == 0; });
        job_ = nullptr;
    }

    void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn) {
        for_range(n, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) fn(i);
        });
    }

private:
    void run_chunk(unsigned t, const std::function<void(std::size_t, std::size_t)>& fn,
                   std::size_t n) {
        std::size_t chunk = (n + workers_ - 1) / workers_;
        std::size_t b = std::size_t(t) * chunk;
        std::size_t e = b + chunk < n ? b + chunk : n;
        if (b < e) fn(b, e);
    }

    void worker_loop(unsigned t) {
        std::uint64_t seen = 0;
        for (;;) {
            const std::function<void(std::size_t, std::size_t)>* job = nullptr;
            std::size_t n = 0;
            {
                std::unique_lock lk(mu_);
                cv_.wait(lk, [&] { return epoch_ != seen; });
                seen = epoch_;
                if (stop_) return;
                job = job_;
                n = job_n_;
            }
            if (job) run_chunk(t, *job, n);
            {
                std::unique_lock lk(mu_);
                if (--pending_ == 0) done_cv_.notify_all();
            }
        }
    }

    unsigned workers_;
    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::condition_variable done_cv_;
    const std::function<void(std::size_t, std::size_t)>* job_ = nullptr;
    std::size_t job_n_ = 0;
    unsigned pending_ = 0;
    std::uint64_t epoch_ = 0;
    bool stop_ = false;
};

}  // namespace aic
