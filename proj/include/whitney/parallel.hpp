#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace whitney {

/// Number of workers used when a caller passes jobs == 0.
inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Work is split into
/// contiguous blocks; callers write results into per-index slots and reduce in
/// index order afterwards, so results do not depend on the worker count.
template <typename Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body) {
    if (jobs == 0) jobs = default_jobs();
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    const std::size_t block = (count + jobs - 1) / jobs;
    for (unsigned w = 0; w < jobs; ++w) {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(count, lo + block);
        workers.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& worker : workers) worker.join();
    if (failure) std::rethrow_exception(failure);
}

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double value) {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value))
            carry_ += (sum_ - t) + value;
        else
            carry_ += (value - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

} // namespace whitney
