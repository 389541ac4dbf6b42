#pragma once

#include "dmac/mdp.hpp"

#include <map>
#include <vector>

namespace dmac::testing {

// D_max = 2 scheduler from matrix rows (urgent bits 0..3) and columns (fresh
// arrival 1..3).
inline SchedulerPolicy matrix_policy(const std::vector<std::vector<int>>& rows) {
  std::map<SchedulerPolicy::Ticks, std::int64_t> table;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      table[{static_cast<std::int64_t>(r), static_cast<std::int64_t>(c + 1)}] = rows[r][c];
  return SchedulerPolicy(2, 1, table);
}

// Both users' schedulers designed on the equal-share TDMA curve, arrivals
// uniform on {1,2,3}, gains (10, 1).
inline SchedulerPolicy tdma_scheduler() { return matrix_policy({{1, 2, 2}, {2, 2, 2}, {2, 2, 2}, {3, 3, 3}}); }

// Expected result of the alternating refinement from the TDMA schedulers:
// user 1 sends 3 at state (2, 3); user 2 is unchanged.
inline SchedulerPolicy refined_scheduler_1() { return matrix_policy({{1, 2, 2}, {2, 2, 2}, {2, 2, 3}, {3, 3, 3}}); }
inline SchedulerPolicy refined_scheduler_2() { return tdma_scheduler(); }

}  // namespace dmac::testing
