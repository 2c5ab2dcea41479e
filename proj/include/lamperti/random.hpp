#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace lamperti {

// A single random stream. Streams are keyed by (master seed, stream id):
// the engine is an mt19937_64 seeded through std::seed_seq with the six
// 32-bit words {lo(seed), hi(seed), lo(id), hi(id), lo(k), hi(k)} where k is
// 0 for the stream itself and child+1 for split(child). Replicate i of any
// experiment always uses stream id i, so results do not depend on how
// replicates are scheduled across threads.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t master_seed, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  /// Unit-rate exponential.
  double exponential() { return -std::log(uniform()); }
  double normal() { return normal_(engine_); }

  /// Derive an independent child stream; used when one replicate needs
  /// several logically separate sources (e.g. the hat-I draw and the
  /// forward path of a scene).
  RandomStream split(std::uint64_t child) const;

 private:
  RandomStream(std::uint64_t a, std::uint64_t b, std::uint64_t c);

  std::uint64_t master_;
  std::uint64_t id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

unsigned resolve_threads(unsigned requested);

// Runs body(i) for i in [0, n) on `threads` workers with a static block
// partition. body must only write to slot i of caller-owned storage.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  threads = std::min<unsigned>(resolve_threads(threads), n == 0 ? 1u : static_cast<unsigned>(std::min<std::size_t>(n, 1u << 16)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

}  // namespace lamperti
