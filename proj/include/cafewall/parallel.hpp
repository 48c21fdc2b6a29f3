#pragma once

#include <cstddef>
#include <functional>

namespace cafewall {

/// Worker count used by parallel_for. 0 restores the default (hardware concurrency).
void set_thread_count(unsigned n) noexcept;
[[nodiscard]] unsigned thread_count() noexcept;

/// Runs body(i) for i in [0, n). Iterations must write disjoint outputs; callers
/// get bit-identical results for any thread count. Nested calls run inline.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cafewall
