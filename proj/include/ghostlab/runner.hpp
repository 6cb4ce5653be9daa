#ifndef GHOSTLAB_RUNNER_HPP
#define GHOSTLAB_RUNNER_HPP

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace ghostlab {

/// Frames are always sharded into fixed-size blocks, whatever the worker
/// count, and block results are merged back in block order. Floating-point
/// accumulation order is therefore a function of the frame count alone,
/// which makes runs bit-identical for any number of workers.
inline constexpr std::uint64_t kFrameBlock = 64;

/// Runs fn(state, frame) for frame in [0, n_frames) sharded over `workers`
/// threads. State needs a default constructor and merge(const State&).
template <class State, class FrameFn>
State run_frames(std::uint64_t n_frames, int workers, FrameFn&& fn) {
  const std::uint64_t n_blocks = (n_frames + kFrameBlock - 1) / kFrameBlock;
  if (n_blocks == 0) return State{};
  std::vector<State> blocks(static_cast<std::size_t>(n_blocks));

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&] {
    for (;;) {
      std::uint64_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= n_blocks) return;
      try {
        State& s = blocks[static_cast<std::size_t>(b)];
        const std::uint64_t lo = b * kFrameBlock;
        const std::uint64_t hi = std::min(lo + kFrameBlock, n_frames);
        for (std::uint64_t f = lo; f < hi; ++f) fn(s, f);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n_blocks);  // stop all workers
        return;
      }
    }
  };

  if (workers <= 1 || n_blocks <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    const int nthreads = int(std::min<std::uint64_t>(workers, n_blocks));
    pool.reserve(nthreads);
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  State total = std::move(blocks[0]);
  for (std::uint64_t b = 1; b < n_blocks; ++b)
    total.merge(blocks[static_cast<std::size_t>(b)]);
  return total;
}

}  // namespace ghostlab

#endif
