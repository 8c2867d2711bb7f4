#pragma once

// Exhaustive SDTW reference for small integer-cost instances. Enumerates
// every step-conformant path from each last-row cell back to the first row
// and keeps the cheapest; ties resolve to the smallest end column and then
// to the first path in step-list depth-first order.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace warpq::testing {

struct OracleResult {
  long cost = 0;
  int a_star = 0;  // 1-based
  int b_star = 0;
  std::vector<std::pair<int, int>> path;  // forward, 1-based
};

inline std::optional<OracleResult> brute_force_sdtw(const std::vector<std::vector<long>>& cost,
                                                    const std::vector<std::pair<int, int>>& steps) {
  const int n_rows = static_cast<int>(cost.size());
  const int n_cols = static_cast<int>(cost.front().size());
  std::optional<OracleResult> best;
  std::vector<std::pair<int, int>> trail;

  std::function<void(int, int, long, int)> walk = [&](int n, int m, long acc, int end_col) {
    acc += cost[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
    trail.emplace_back(n + 1, m + 1);
    if (n == 0) {
      if (!best || acc < best->cost) {
        OracleResult r;
        r.cost = acc;
        r.b_star = end_col + 1;
        r.a_star = m + 1;
        r.path.assign(trail.rbegin(), trail.rend());
        best = std::move(r);
      }
    } else {
      for (const auto& [dr, dc] : steps) {
        const int pn = n - dr, pm = m - dc;
        if (pn >= 0 && pm >= 0) walk(pn, pm, acc, end_col);
      }
    }
    trail.pop_back();
  };

  for (int m = 0; m < n_cols; ++m) walk(n_rows - 1, m, 0, m);
  return best;
}

}  // namespace warpq::testing
