#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/common/rng.hpp"

namespace apidomain {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

struct SplitPlan {
  std::size_t n_rows = 0;
  std::size_t n_splits = 0;
  double test_fraction = 0.0;
  std::uint64_t seed = 0;
  std::vector<Split> splits;

  bool operator==(const SplitPlan&) const = default;
};

inline bool operator==(const Split& a, const Split& b) { return a.train == b.train && a.test == b.test; }

inline constexpr std::size_t kMinSplitRows = 10;

/// round(fraction * n), kept within [1, n-1] so both sides are non-empty.
inline std::size_t test_size_for(std::size_t n_rows, double fraction) {
  auto t = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n_rows)));
  return std::clamp<std::size_t>(t, 1, n_rows - 1);
}

/// Independent random partitions; split i draws from its own derived stream.
/// Index lists are returned sorted.
inline SplitPlan shuffle_split(std::size_t n_rows, double test_fraction, std::size_t n_splits, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ParameterError("test fraction must lie strictly between 0 and 1");
  if (n_splits == 0) throw ParameterError("at least one split is required");
  if (n_rows < kMinSplitRows)
    throw DatasetTooSmallError("need at least " + std::to_string(kMinSplitRows) + " rows to split, got " +
                               std::to_string(n_rows));
  SplitPlan plan{n_rows, n_splits, test_fraction, seed, {}};
  const auto n_test = test_size_for(n_rows, test_fraction);
  std::vector<std::size_t> perm(n_rows);
  for (std::size_t s = 0; s < n_splits; ++s) {
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(derive_seed(seed, s));
    rng.shuffle(perm.begin(), perm.end());
    Split sp;
    sp.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    sp.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    std::sort(sp.test.begin(), sp.test.end());
    std::sort(sp.train.begin(), sp.train.end());
    plan.splits.push_back(std::move(sp));
  }
  return plan;
}

inline void to_json(nlohmann::json& j, const SplitPlan& p) {
  j = {{"n_rows", p.n_rows}, {"n_splits", p.n_splits}, {"test_fraction", p.test_fraction}, {"seed", p.seed}};
  auto arr = nlohmann::json::array();
  for (const auto& s : p.splits) arr.push_back({{"train", s.train}, {"test", s.test}});
  j["splits"] = std::move(arr);
}

}  // namespace apidomain
