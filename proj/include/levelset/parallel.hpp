#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <vector>

namespace lsq {

enum class Execution { Serial, Parallel };

// Number of OpenMP threads for Parallel execution (0 keeps the runtime default).
void set_thread_count(int n);
int thread_count();

namespace detail {

// Captures the first exception thrown inside an OpenMP region and rethrows it
// on the calling thread.
class ExceptionSlot {
 public:
  template <typename F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
#pragma omp critical(lsq_exception_slot)
      if (!ptr_) ptr_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (ptr_) std::rethrow_exception(ptr_);
  }

 private:
  std::exception_ptr ptr_;
};

}  // namespace detail

// Calls f(i) for i in [0, n). Results must be written to per-index slots.
template <typename F>
void for_each_index(std::size_t n, Execution exec, F&& f) {
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  detail::ExceptionSlot slot;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < count; ++i) {
    slot.run([&] { f(static_cast<std::size_t>(i)); });
  }
  slot.rethrow();
}

// Sum of chunk(begin, end) over fixed-size chunks of [0, n). Chunk partials are
// combined in index order, so Serial and Parallel give bit-identical results.
template <typename F>
double chunked_sum(std::size_t n, std::size_t chunk, Execution exec, F&& partial) {
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = (n + chunk - 1) / chunk;
  std::vector<double> partials(chunks, 0.0);
  for_each_index(chunks, exec, [&](std::size_t c) {
    partials[c] = partial(c * chunk, std::min(n, (c + 1) * chunk));
  });
  double total = 0.0;
  for (double p : partials) total += p;
  return total;
}

// Vector-valued variant: partial(begin, end, out) accumulates into a zeroed
// buffer of length `dim`; buffers are then summed in chunk order into `out`.
template <typename F>
void chunked_vector_sum(std::size_t n, std::size_t chunk, std::size_t dim, Execution exec, F&& partial,
                        std::span<double> out) {
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = (n + chunk - 1) / chunk;
  std::vector<double> buffers(chunks * dim, 0.0);
  for_each_index(chunks, exec, [&](std::size_t c) {
    partial(c * chunk, std::min(n, (c + 1) * chunk), std::span<double>(buffers.data() + c * dim, dim));
  });
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t d = 0; d < dim; ++d) out[d] += buffers[c * dim + d];
  }
}

}  // namespace lsq
