#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <string>

namespace conjlab {

/// Serial is the reference path; openmp splits independent samples across threads.
enum class Exec { serial, openmp };

Exec exec_from_string(const std::string& s);
std::string to_string(Exec e);
int available_threads();

/// Calls fn(i) for i in [0, n). Under Exec::openmp the calls run concurrently
/// and the first exception thrown by any of them is rethrown after the loop.
/// fn must write results into per-index slots so output order is independent
/// of scheduling.
template <class Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first;
    std::mutex m;
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(m);
            if (!first) first = std::current_exception();
        }
    }
    if (first) std::rethrow_exception(first);
}

}  // namespace conjlab
