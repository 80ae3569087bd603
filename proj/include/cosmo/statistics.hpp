#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cosmo/params.hpp"

namespace cosmo {

/// Expected joint activations for every edge, laid out like Params::values():
/// entry e holds the running sum of the product of the units edge e connects.
struct EdgeStatistics {
  std::vector<double> sums;
  double count = 0.0;

  EdgeStatistics() = default;
  explicit EdgeStatistics(const Params& shape) : sums(shape.size(), 0.0) {}

  /// sums / count. Throws Error(usage) when count is zero.
  std::vector<double> mean() const;

  void merge(const EdgeStatistics& other);
};

}  // namespace cosmo
