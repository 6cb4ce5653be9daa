#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ghostlab/runner.hpp"

using namespace ghostlab;

namespace {

struct SumState {
  double total = 0.0;
  std::vector<std::uint64_t> frames;
  void merge(const SumState& o) {
    total += o.total;
    frames.insert(frames.end(), o.frames.begin(), o.frames.end());
  }
};

SumState run_with(std::uint64_t n, int workers) {
  return run_frames<SumState>(n, workers, [](SumState& s, std::uint64_t f) {
    // non-associative accumulation: order changes the rounding
    s.total += 1.0 / double(f + 1);
    s.frames.push_back(f);
  });
}

}  // namespace

TEST_CASE("every frame runs exactly once, in block order after the merge") {
  SumState s = run_with(1000, 3);
  REQUIRE(s.frames.size() == 1000);
  for (std::uint64_t f = 0; f < 1000; ++f) CHECK(s.frames[f] == f);
}

TEST_CASE("results are bit-identical for any worker count") {
  const std::uint64_t n = 5000;  // not a multiple of the block size
  double ref = run_with(n, 1).total;
  for (int workers : {2, 4, 8}) {
    CHECK(run_with(n, workers).total == ref);  // exact, not approximate
  }
}

TEST_CASE("zero frames give a default state") {
  SumState s = run_with(0, 4);
  CHECK(s.total == 0.0);
  CHECK(s.frames.empty());
}

TEST_CASE("worker exceptions propagate to the caller") {
  auto boom = [] {
    run_frames<SumState>(500, 4, [](SumState&, std::uint64_t f) {
      if (f == 130) throw std::runtime_error("frame 130 failed");
    });
  };
  CHECK_THROWS_WITH_AS(boom(), "frame 130 failed", std::runtime_error);
}
