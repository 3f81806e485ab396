#pragma once

// Coincidence pairing: greedy nearest-first matching of T and L events whose
// time difference is at most W.
//
// Candidates are accepted in increasing (|t - t'|, t, t') order whenever both
// events are still unused. On a line the globally best remaining candidate is
// always a pair that is adjacent in the merged order of the remaining events,
// so a heap over adjacent pairs reproduces the full greedy in O(n log n)
// without materialising the O(n^2) candidate list. Gaps wider than W split
// the input into independent segments.

#include <algorithm>
#include <cstdint>
#include <queue>
#include <tuple>
#include <utility>
#include <vector>

#include "eprb/core.hpp"
#include "eprb/error.hpp"

namespace eprb {

enum class PairingPolicy { nearest_first };

struct PairingConfig {
  std::int64_t window_ns = 0;
  PairingPolicy policy = PairingPolicy::nearest_first;
};

struct MatchResult {
  std::vector<PairRecord> pairs;   // sorted by T event time
  std::uint64_t unmatched_left = 0;
  std::uint64_t unmatched_right = 0;
};

namespace detail {

inline void require_islands(const EventStream& left, const EventStream& right) {
  if (left.island() && *left.island() != Island::T) fail(ErrorKind::InvalidStream, "left stream must be island T");
  if (right.island() && *right.island() != Island::L) fail(ErrorKind::InvalidStream, "right stream must be island L");
}

struct MergedEvent {
  std::int64_t time;
  Island island;
  std::uint32_t index;  // into its own stream
};

inline std::vector<MergedEvent> merge_streams(const EventStream& left, const EventStream& right) {
  std::vector<MergedEvent> merged;
  merged.reserve(left.size() + right.size());
  std::size_t i = 0, j = 0;
  while (i < left.size() || j < right.size()) {
    const bool take_left = j == right.size() || (i < left.size() && left[i].time_ns <= right[j].time_ns);
    if (take_left) {
      merged.push_back({left[i].time_ns, Island::T, static_cast<std::uint32_t>(i)});
      ++i;
    } else {
      merged.push_back({right[j].time_ns, Island::L, static_cast<std::uint32_t>(j)});
      ++j;
    }
  }
  return merged;
}

}  // namespace detail

inline MatchResult match_pairs(const EventStream& left, const EventStream& right, const PairingConfig& config) {
  if (config.window_ns < 0) fail(ErrorKind::InvalidValue, "window must be nonnegative");
  detail::require_islands(left, right);
  if (left.size() > UINT32_MAX || right.size() > UINT32_MAX) fail(ErrorKind::TooLarge, "stream too long");

  const auto merged = detail::merge_streams(left, right);
  const std::int64_t W = config.window_ns;
  std::vector<std::int64_t> partner(left.size(), -1);  // left index -> right index

  // (distance, t_left, t_right, merged position of T, merged position of L)
  using Candidate = std::tuple<std::int64_t, std::int64_t, std::int64_t, std::size_t, std::size_t>;
  std::vector<std::size_t> prev, next;
  std::vector<bool> used;

  std::size_t begin = 0;
  while (begin < merged.size()) {
    std::size_t end = begin + 1;
    while (end < merged.size() && merged[end].time - merged[end - 1].time <= W) ++end;
    const std::size_t len = end - begin;
    if (len > 1) {
      // Local linked list over [begin, end); `len` marks "none".
      prev.assign(len, 0);
      next.assign(len, 0);
      used.assign(len, false);
      for (std::size_t k = 0; k < len; ++k) {
        prev[k] = k == 0 ? len : k - 1;
        next[k] = k + 1;
      }
      std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap;
      auto consider = [&](std::size_t p, std::size_t q) {
        if (p == len || q == len) return;
        const auto& ep = merged[begin + p];
        const auto& eq = merged[begin + q];
        if (ep.island == eq.island) return;
        const std::size_t t_pos = ep.island == Island::T ? p : q;
        const std::size_t l_pos = ep.island == Island::T ? q : p;
        const std::int64_t tt = merged[begin + t_pos].time;
        const std::int64_t tl = merged[begin + l_pos].time;
        const std::int64_t dist = tt > tl ? tt - tl : tl - tt;
        if (dist <= W) heap.emplace(dist, tt, tl, t_pos, l_pos);
      };
      for (std::size_t k = 0; k + 1 < len; ++k) consider(k, k + 1);
      while (!heap.empty()) {
        const auto [dist, tt, tl, t_pos, l_pos] = heap.top();
        heap.pop();
        if (used[t_pos] || used[l_pos]) continue;
        used[t_pos] = used[l_pos] = true;
        partner[merged[begin + t_pos].index] = merged[begin + l_pos].index;
        const std::size_t lo = std::min(t_pos, l_pos);
        const std::size_t hi = std::max(t_pos, l_pos);
        // lo and hi are adjacent; splice both out.
        const std::size_t before = prev[lo];
        const std::size_t after = next[hi];
        if (before != len) next[before] = after;
        if (after != len) prev[after] = before;
        consider(before, after);
      }
    }
    begin = end;
  }

  MatchResult result;
  std::uint64_t matched = 0;
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (partner[i] < 0) continue;
    result.pairs.emplace_back(left[i], right[static_cast<std::size_t>(partner[i])], W);
    ++matched;
  }
  result.unmatched_left = left.size() - matched;
  result.unmatched_right = right.size() - matched;
  return result;
}

struct CurvePoint {
  std::int64_t window_ns;
  std::uint64_t pairs;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

inline std::vector<CurvePoint> pair_count_curve(const EventStream& left, const EventStream& right,
                                                std::span<const std::int64_t> windows) {
  if (!std::is_sorted(windows.begin(), windows.end())) fail(ErrorKind::InvalidValue, "windows must be sorted ascending");
  std::vector<CurvePoint> out;
  out.reserve(windows.size());
  for (std::int64_t w : windows) out.push_back({w, match_pairs(left, right, {w}).pairs.size()});
  return out;
}

}  // namespace eprb
