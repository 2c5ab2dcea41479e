#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "lamperti/random.hpp"
#include "lamperti/stats.hpp"

namespace testing {

// Mean of n draws with its standard error.
inline lamperti::SampleSummary mc(std::size_t n, std::uint64_t seed, const std::function<double(lamperti::RandomStream&)>& draw) {
  std::vector<double> xs(n);
  lamperti::RandomStream rng(seed);
  for (auto& x : xs) x = draw(rng);
  return lamperti::summarize(xs);
}

inline bool within_se(const lamperti::SampleSummary& s, double target, double k = 3.0) {
  return std::abs(s.mean - target) <= k * s.std_error;
}

inline bool within_band(const lamperti::SampleSummary& s, double target) {
  return std::abs(s.mean - target) <= std::max(0.01 * std::abs(target), 3.0 * s.std_error);
}

}  // namespace testing
