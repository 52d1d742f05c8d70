#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "apidomain/common/error.hpp"

namespace apidomain {

/// Midranks (1-based) of `v`; tied values share the mean of their ranks.
inline std::vector<double> midranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mid;
    i = j + 1;
  }
  return r;
}

struct MannWhitneyResult {
  double u = 0.0;  // for the first sample
  double p = 1.0;  // two-sided
  bool significant(double alpha = 0.05) const { return p < alpha; }
};

namespace detail {

inline void check_mwu(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ParameterError("Mann-Whitney U needs two non-empty samples");
}

inline std::vector<double> pooled(std::span<const double> a, std::span<const double> b) {
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return all;
}

inline double u_from_ranks(const std::vector<double>& ranks, std::size_t n) {
  double ra = 0.0;
  for (std::size_t i = 0; i < n; ++i) ra += ranks[i];
  return ra - static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
}

}  // namespace detail

/// Two-sided test on the normal approximation with continuity and tie
/// correction, plus a one-term Edgeworth (kurtosis) correction. Variance and
/// fourth cumulant are the exact permutation moments of the rank sum given
/// the observed ties.
inline MannWhitneyResult mann_whitney_u_normal(std::span<const double> a, std::span<const double> b) {
  detail::check_mwu(a, b);
  const std::size_t n = a.size(), m = b.size(), N = n + m;
  const auto ranks = midranks(detail::pooled(a, b));
  MannWhitneyResult res;
  res.u = detail::u_from_ranks(ranks, n);
  const double mu = static_cast<double>(n) * static_cast<double>(m) / 2.0;

  // centered ranks and their power sums
  const double centre = (static_cast<double>(N) + 1.0) / 2.0;
  double P2 = 0.0, P4 = 0.0;
  for (double r : ranks) {
    const double c = r - centre;
    P2 += c * c;
    P4 += c * c * c * c;
  }
  // p_r = n(n-1)...(n-r+1) / N(N-1)...(N-r+1)
  double p[5] = {1, 0, 0, 0, 0};
  for (int r = 1; r <= 4; ++r)
    p[r] = (static_cast<int>(n) - r + 1 <= 0 || static_cast<int>(N) - r + 1 <= 0)
               ? 0.0
               : p[r - 1] * static_cast<double>(static_cast<int>(n) - r + 1) / static_cast<double>(static_cast<int>(N) - r + 1);
  const double es2 = (p[1] - p[2]) * P2;
  const double es4 = P4 * p[1] - 4 * P4 * p[2] + 3 * (P2 * P2 - P4) * p[2] + 6 * (2 * P4 - P2 * P2) * p[3] +
                     (3 * P2 * P2 - 6 * P4) * p[4];
  if (!(es2 > 0.0)) return res;  // every value tied
  const double sigma = std::sqrt(es2);
  const double k4 = es4 - 3.0 * es2 * es2;

  const double dev = std::abs(res.u - mu) - 0.5;
  if (dev <= 0.0) return res;
  const double z = dev / sigma;
  const double sf = 0.5 * std::erfc(z / std::numbers::sqrt2);
  const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double tail = sf + phi * (k4 / (24.0 * es2 * es2)) * (z * z * z - 3.0 * z);
  res.p = std::clamp(2.0 * tail, 0.0, 1.0);
  return res;
}

/// Exact permutation test: enumerates every assignment of the pooled
/// (mid)ranks to the first sample. Intended for small samples.
inline MannWhitneyResult mann_whitney_u_exact(std::span<const double> a, std::span<const double> b,
                                              std::uint64_t max_assignments = 20'000'000) {
  detail::check_mwu(a, b);
  const std::size_t n = a.size(), N = a.size() + b.size();
  const auto ranks = midranks(detail::pooled(a, b));
  // doubled midranks are integers, so the enumeration stays exact
  std::vector<std::int64_t> r2(N);
  for (std::size_t i = 0; i < N; ++i) r2[i] = static_cast<std::int64_t>(std::llround(2.0 * ranks[i]));
  double combos = 1.0;
  for (std::size_t i = 0; i < n; ++i) combos = combos * static_cast<double>(N - i) / static_cast<double>(i + 1);
  if (combos > static_cast<double>(max_assignments))
    throw ParameterError("exact Mann-Whitney enumeration too large (" + std::to_string(combos) + " assignments)");

  const std::int64_t base2 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n + 1);  // 2 * n(n+1)/2
  const std::int64_t mu4 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(N - n) * 2;  // 4 * nm/2
  std::int64_t obs2 = 0;
  for (std::size_t i = 0; i < n; ++i) obs2 += r2[i];
  const std::int64_t obs_dev = std::abs(2 * (obs2 - base2) - mu4);  // 4 * |U - mu|

  std::uint64_t total = 0, extreme = 0;
  std::vector<std::size_t> pick(n);
  // iterative lexicographic combinations
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  for (;;) {
    std::int64_t s = 0;
    for (auto i : pick) s += r2[i];
    ++total;
    if (std::abs(2 * (s - base2) - mu4) >= obs_dev) ++extreme;
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == N - n + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  MannWhitneyResult res;
  res.u = static_cast<double>(obs2 - base2) / 2.0;
  res.p = static_cast<double>(extreme) / static_cast<double>(total);
  return res;
}

/// Exact two-sided p from the permutation distribution of the rank sum,
/// counted by dynamic programming over doubled midranks (ties handled
/// exactly). Cost grows as N^3 * n, fine for the pooled sizes met in run
/// comparisons.
inline MannWhitneyResult mann_whitney_u_dp(std::span<const double> a, std::span<const double> b) {
  detail::check_mwu(a, b);
  const std::size_t n = a.size(), N = a.size() + b.size();
  const auto ranks = midranks(detail::pooled(a, b));
  std::vector<std::size_t> r2(N);
  std::size_t total2 = 0;
  for (std::size_t i = 0; i < N; ++i) {
    r2[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
    total2 += r2[i];
  }
  // ways[k][s]: subsets of size k with doubled rank sum s. Counts reach
  // C(N,n); long double holds that exactly enough at these sizes.
  std::vector<std::vector<long double>> ways(n + 1, std::vector<long double>(total2 + 1, 0.0L));
  ways[0][0] = 1.0L;
  std::size_t reach = 0;
  for (std::size_t i = 0; i < N; ++i) {
    reach += r2[i];
    for (std::size_t k = std::min(n, i + 1); k >= 1; --k)
      for (std::size_t s = reach; s >= r2[i]; --s) {
        ways[k][s] += ways[k - 1][s - r2[i]];
        if (s == r2[i]) break;
      }
  }
  const auto base2 = static_cast<std::int64_t>(n * (n + 1));
  const auto mu4 = static_cast<std::int64_t>(2 * n * (N - n));
  std::int64_t obs2 = 0;
  for (std::size_t i = 0; i < n; ++i) obs2 += static_cast<std::int64_t>(r2[i]);
  const std::int64_t obs_dev = std::abs(2 * (obs2 - base2) - mu4);
  long double all = 0.0L, extreme = 0.0L;
  for (std::size_t s = 0; s <= total2; ++s) {
    const auto w = ways[n][s];
    if (w == 0.0L) continue;
    all += w;
    if (std::abs(2 * (static_cast<std::int64_t>(s) - base2) - mu4) >= obs_dev) extreme += w;
  }
  MannWhitneyResult res;
  res.u = static_cast<double>(obs2 - base2) / 2.0;
  res.p = std::clamp(static_cast<double>(extreme / all), 0.0, 1.0);
  return res;
}

/// Pooled size up to which the default test is exact.
inline constexpr std::size_t kDpMannWhitneyLimit = 120;

/// Default test: exact (dynamic programming) for pooled sizes up to
/// kDpMannWhitneyLimit, the Edgeworth-corrected normal approximation above.
/// Small samples have a coarse null distribution no smooth approximation
/// follows (n=1, m=2 only admits p in {2/3, 1}), and heavy ties keep it
/// coarse well past n=m=10.
inline MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  detail::check_mwu(a, b);
  if (a.size() + b.size() <= kDpMannWhitneyLimit) return mann_whitney_u_dp(a, b);
  return mann_whitney_u_normal(a, b);
}

enum class EffectMagnitude { negligible, small, medium, large };

inline std::string to_string(EffectMagnitude m) {
  switch (m) {
    case EffectMagnitude::negligible: return "negligible";
    case EffectMagnitude::small: return "small";
    case EffectMagnitude::medium: return "medium";
    case EffectMagnitude::large: return "large";
  }
  return "?";
}

/// Romano et al. thresholds on |d|.
inline EffectMagnitude cliffs_magnitude(double d) {
  const double a = std::abs(d);
  if (a < 0.147) return EffectMagnitude::negligible;
  if (a < 0.33) return EffectMagnitude::small;
  if (a < 0.474) return EffectMagnitude::medium;
  return EffectMagnitude::large;
}

struct CliffsDelta {
  double d = 0.0;
  EffectMagnitude magnitude = EffectMagnitude::negligible;
};

/// (#{a > b} - #{a < b}) / (|a||b|), counted by binary search over sorted b.
inline CliffsDelta cliffs_delta(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ParameterError("Cliff's delta needs two non-empty samples");
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sb.begin(), sb.end());
  std::int64_t greater = 0, less = 0;
  for (double x : a) {
    less += static_cast<std::int64_t>(sb.end() - std::upper_bound(sb.begin(), sb.end(), x));
    greater += static_cast<std::int64_t>(std::lower_bound(sb.begin(), sb.end(), x) - sb.begin());
  }
  CliffsDelta out;
  out.d = static_cast<double>(greater - less) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
  out.magnitude = cliffs_magnitude(out.d);
  return out;
}

struct ComparisonResult {
  std::string metric;
  double u = 0.0;
  double p = 1.0;
  double cliff_delta = 0.0;
  EffectMagnitude magnitude = EffectMagnitude::negligible;
};

inline ComparisonResult compare_runs(std::string metric, std::span<const double> a, std::span<const double> b) {
  const auto mw = mann_whitney_u(a, b);
  const auto cd = cliffs_delta(a, b);
  return {std::move(metric), mw.u, mw.p, cd.d, cd.magnitude};
}

}  // namespace apidomain
