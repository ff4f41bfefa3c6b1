#pragma once

#include <cstdint>
#include <vector>

#include "c23/types.hpp"

namespace c23::cli {

struct WorkloadSpec {
  std::vector<std::size_t> sizes;  // one entry per dataset
  double overlap = 0.0;            // fraction of each set drawn from a shared id pool
  CurveKey key_space = CurveKey{1} << 40;
  std::uint64_t seed = 1;
};

// Random datasets over a common universe. An id always maps to the same key.
std::vector<std::vector<Item>> make_workload(const WorkloadSpec& spec);

}  // namespace c23::cli
