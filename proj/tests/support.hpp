#pragma once

#include <algorithm>
#include <random>
#include <string>

#include "nagtrace/polysys.hpp"
#include "nagtrace/tracker.hpp"

namespace testing {

inline std::string fixture(const std::string& name) { return std::string(FIXTURES) + "/" + name; }

inline nagtrace::Point random_point(int n, std::mt19937_64& rng) {
  nagtrace::Point z(n);
  for (int k = 0; k < n; ++k) z[k] = nagtrace::random_gaussian(rng);
  return z;
}

// Sorted real coordinates make point sets comparable regardless of path order.
inline bool same_points(std::vector<nagtrace::Point> a, std::vector<nagtrace::Point> b, double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& p : a) {
    bool hit = false;
    for (std::size_t j = 0; j < b.size() && !hit; ++j)
      if (!used[j] && nagtrace::max_norm(p - b[j]) < tol) used[j] = hit = true;
    if (!hit) return false;
  }
  return true;
}

}  // namespace testing
