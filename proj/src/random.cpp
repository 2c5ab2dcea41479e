#include "lamperti/random.hpp"

#include <cmath>

namespace lamperti {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t master, std::uint64_t id, std::uint64_t child) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(master), hi(master), lo(id), hi(id), lo(child), hi(child)};
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_(master_seed), id_(stream_id), engine_(seeded_engine(master_seed, stream_id, 0)) {}

RandomStream::RandomStream(std::uint64_t a, std::uint64_t b, std::uint64_t c)
    : master_(a), id_(b), engine_(seeded_engine(a, b, c)) {}

RandomStream RandomStream::split(std::uint64_t child) const {
  return RandomStream(master_, id_, child + 1);
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

}  // namespace lamperti
