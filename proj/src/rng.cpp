#include "qst/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace qst {

size_t RngStream::discrete(const std::vector<double>& weights) {
  std::vector<double> cum(weights.size());
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("negative weight");
    acc += weights[i];
    cum[i] = acc;
  }
  return discrete_from_cumulative(cum);
}

size_t RngStream::discrete_from_cumulative(const std::vector<double>& cumulative) {
  if (cumulative.empty() || cumulative.back() <= 0.0)
    throw std::invalid_argument("empty or zero-mass distribution");
  double x = uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
  if (it == cumulative.end()) --it;
  return static_cast<size_t>(it - cumulative.begin());
}

}  // namespace qst
