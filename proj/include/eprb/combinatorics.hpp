#pragma once

// Counting: equal/unequal classes of one string of pairs, reachable class
// triples across Bell's three strings under explicit constraint models,
// domain counts, the nine setting pairings, time-topology checks of
// six-tuples and the counterfactual third entry.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "eprb/core.hpp"
#include "eprb/error.hpp"

namespace eprb {

inline constexpr std::uint64_t kEnumerationGuard = 10'000'000;

/// Classes e/u of one string of M pairs, sorted by e descending, obtained by
/// scanning all 2^M strings.
inline std::vector<CorrelationClass> enumerate_eu_classes(int M) {
  if (M < 1) fail(ErrorKind::InvalidValue, "M must be at least 1");
  if (M > 23) fail(ErrorKind::TooLarge, "2^M strings exceed the enumeration guard");
  std::vector<bool> seen(static_cast<std::size_t>(M) + 1, false);
  for (std::uint32_t s = 0; s < (1u << M); ++s) {
    // bit set = unequal
    seen[static_cast<std::size_t>(M - std::popcount(s))] = true;
  }
  std::vector<CorrelationClass> out;
  for (int e = M; e >= 0; --e) {
    if (seen[static_cast<std::size_t>(e)]) out.emplace_back(e, M);
  }
  return out;
}

enum class ConstraintModel { independent, shared, shared_identified };

inline std::string to_string(ConstraintModel m) {
  switch (m) {
    case ConstraintModel::independent: return "independent";
    case ConstraintModel::shared: return "shared";
    case ConstraintModel::shared_identified: return "shared-identified";
  }
  return "unknown";
}

inline ConstraintModel parse_constraint_model(std::string_view s) {
  if (s == "independent") return ConstraintModel::independent;
  if (s == "shared") return ConstraintModel::shared;
  if (s == "shared-identified") return ConstraintModel::shared_identified;
  fail(ErrorKind::InvalidValue, "model must be independent, shared or shared-identified, got '" + std::string(s) + "'");
}

/// Equal (true) / unequal (false) verdicts of the (a;b), (a;c), (b;c) pairs
/// of one trial.
using TrialPattern = std::array<bool, 3>;

inline std::string to_string(const TrialPattern& p) {
  std::string s;
  for (bool e : p) s += e ? 'e' : 'u';
  return s;
}

/// Per-trial patterns a model can realise, found by enumerating its hidden
/// outcome assignments.
///   independent: six free outcomes, one pair each.
///   shared: (sigma1, a; tau2, b) (sigma1, a; tau3, c) (sigma2, b; tau3, c).
///   shared-identified: as shared with tau2 = sigma2.
inline std::vector<TrialPattern> trial_patterns(ConstraintModel model) {
  std::set<TrialPattern> found;
  auto bit = [](unsigned v, int i) { return (v >> i) & 1u; };
  switch (model) {
    case ConstraintModel::independent:
      for (unsigned v = 0; v < 64; ++v) {
        found.insert({bit(v, 0) == bit(v, 1), bit(v, 2) == bit(v, 3), bit(v, 4) == bit(v, 5)});
      }
      break;
    case ConstraintModel::shared:
      for (unsigned v = 0; v < 16; ++v) {
        const unsigned s1 = bit(v, 0), s2 = bit(v, 1), t2 = bit(v, 2), t3 = bit(v, 3);
        found.insert({s1 == t2, s1 == t3, s2 == t3});
      }
      break;
    case ConstraintModel::shared_identified:
      for (unsigned v = 0; v < 8; ++v) {
        const unsigned s1 = bit(v, 0), s2 = bit(v, 1), t3 = bit(v, 2);
        found.insert({s1 == s2, s1 == t3, s2 == t3});
      }
      break;
  }
  // Descending so that "eee" comes first.
  return {found.rbegin(), found.rend()};
}

using ClassTriple = std::array<int, 3>;

/// Strategy 1: scan every sequence of M per-trial patterns.
inline std::set<ClassTriple> reachable_by_direct_scan(int M, const std::vector<TrialPattern>& patterns) {
  const std::size_t P = patterns.size();
  std::vector<std::size_t> digits(static_cast<std::size_t>(M), 0);
  std::set<ClassTriple> out;
  while (true) {
    ClassTriple counts{0, 0, 0};
    for (std::size_t d : digits) {
      for (int i = 0; i < 3; ++i) counts[i] += patterns[d][i] ? 1 : 0;
    }
    out.insert(counts);
    std::size_t pos = 0;
    while (pos < digits.size() && ++digits[pos] == P) digits[pos++] = 0;
    if (pos == digits.size()) break;
  }
  return out;
}

/// Strategy 2: the class triple depends only on the multiset of per-trial
/// patterns, so grow the set of reachable count vectors one trial at a time.
inline std::set<ClassTriple> reachable_by_multisets(int M, const std::vector<TrialPattern>& patterns) {
  const std::size_t side = static_cast<std::size_t>(M) + 1;
  auto at = [side](const ClassTriple& c) {
    return (static_cast<std::size_t>(c[0]) * side + static_cast<std::size_t>(c[1])) * side + static_cast<std::size_t>(c[2]);
  };
  std::vector<ClassTriple> frontier{{0, 0, 0}};
  std::vector<std::uint32_t> mark(side * side * side, 0);
  for (int trial = 0; trial < M; ++trial) {
    std::vector<ClassTriple> next;
    const auto stamp = static_cast<std::uint32_t>(trial + 1);
    for (const auto& c : frontier) {
      for (const auto& p : patterns) {
        ClassTriple n{c[0] + p[0], c[1] + p[1], c[2] + p[2]};
        auto& m = mark[at(n)];
        if (m != stamp) {
          m = stamp;
          next.push_back(n);
        }
      }
    }
    frontier = std::move(next);
  }
  return {frontier.begin(), frontier.end()};
}

/// Closed forms stated for the three models: (M+1)^3, 2(M+1)^2, (M+1)^2.
inline std::uint64_t stated_closed_form(int M, ConstraintModel model) {
  const auto m1 = static_cast<std::uint64_t>(M) + 1;
  switch (model) {
    case ConstraintModel::independent: return m1 * m1 * m1;
    case ConstraintModel::shared: return 2 * m1 * m1;
    case ConstraintModel::shared_identified: return m1 * m1;
  }
  return 0;
}

struct ClassCountReport {
  int M = 0;
  ConstraintModel model = ConstraintModel::independent;
  std::uint64_t enumerated_count = 0;
  std::optional<std::uint64_t> direct_scan_count;  // absent when beyond the guard
  std::uint64_t multiset_count = 0;
  std::optional<std::uint64_t> paper_closed_form;
  std::optional<bool> agrees;
  std::vector<TrialPattern> patterns;
};

inline ClassCountReport count_triple_classes(int M, ConstraintModel model) {
  if (M < 1) fail(ErrorKind::InvalidValue, "M must be at least 1");
  const auto side = static_cast<std::uint64_t>(M) + 1;
  if (side * side * side > kEnumerationGuard) {
    fail(ErrorKind::TooLarge, "M = " + std::to_string(M) + " exceeds the enumeration guard");
  }
  ClassCountReport r;
  r.M = M;
  r.model = model;
  r.patterns = trial_patterns(model);
  r.multiset_count = reachable_by_multisets(M, r.patterns).size();

  std::uint64_t product = 1;
  bool small = true;
  for (int i = 0; i < M && small; ++i) {
    product *= r.patterns.size();
    small = product <= kEnumerationGuard;
  }
  if (small) {
    r.direct_scan_count = reachable_by_direct_scan(M, r.patterns).size();
    if (*r.direct_scan_count != r.multiset_count) {
      fail(ErrorKind::Internal, "enumeration strategies disagree for M = " + std::to_string(M) + ", model " +
                                    to_string(model));
    }
  }
  r.enumerated_count = r.multiset_count;
  r.paper_closed_form = stated_closed_form(M, model);
  r.agrees = r.enumerated_count == *r.paper_closed_form;
  return r;
}

/// 2^(2n) joint assignments when each side has n settings.
inline std::uint64_t count_domains(int settings_per_side) {
  if (settings_per_side < 1 || settings_per_side > 31) fail(ErrorKind::InvalidValue, "settings per side must be 1..31");
  return std::uint64_t{1} << (2 * settings_per_side);
}

/// 4 joint outcomes for each of `pairings` unconstrained pairings; 4^9 for
/// the nine pairings of three settings per side.
inline std::uint64_t count_nonlocal_domains(int pairings = 9) {
  if (pairings < 0 || pairings > 31) fail(ErrorKind::InvalidValue, "pairings must be 0..31");
  return std::uint64_t{1} << (2 * pairings);
}

struct Pairing {
  SettingPair settings;
  bool time_correlated;

  friend bool operator==(const Pairing&, const Pairing&) = default;
};

/// All n^2 ordered setting pairs, row-major. The time-correlated ones are
/// those of the regrouped six-tuple: the k-th setting on T is paired with the
/// (k-1)-th (cyclically) on L, i.e. [a;c], [b;a], [c;b] for three settings.
inline std::vector<Pairing> enumerate_pairings(int settings_per_side = 3) {
  if (settings_per_side < 1 || settings_per_side > 4) fail(ErrorKind::InvalidValue, "settings per side must be 1..4");
  std::vector<Pairing> out;
  for (int x = 0; x < settings_per_side; ++x) {
    for (int y = 0; y < settings_per_side; ++y) {
      const bool correlated = y == (x + settings_per_side - 1) % settings_per_side;
      out.push_back({{label_from_index(x), label_from_index(y)}, correlated});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Time topology

struct TupleEntry {
  Island island;
  Label setting;
  std::int64_t time_ns;
  Outcome outcome;
};

/// Six entries (three per island) and the pairs claimed to be correlated,
/// as indices (T entry, L entry) into `entries`.
struct TopologyTuple {
  std::vector<TupleEntry> entries;
  std::vector<std::pair<std::size_t, std::size_t>> claimed_pairs;
  std::int64_t window_ns = 0;
};

enum class TopologyViolationKind { DuplicateTime, ReusedMeasurement, OutsideWindow };

inline std::string to_string(TopologyViolationKind k) {
  switch (k) {
    case TopologyViolationKind::DuplicateTime: return "DuplicateTime";
    case TopologyViolationKind::ReusedMeasurement: return "ReusedMeasurement";
    case TopologyViolationKind::OutsideWindow: return "OutsideWindow";
  }
  return "Unknown";
}

struct TopologyViolation {
  TopologyViolationKind kind;
  std::vector<std::size_t> entries;
};

/// Empty result means the tuple can be a set of actually measured pairs:
/// (i) no two entries share an (island, time), (ii) no (island, setting, time)
/// measurement serves two claimed pairs, (iii) every claimed pair lies inside
/// the window.
inline std::vector<TopologyViolation> validate_time_topology(const TopologyTuple& tuple) {
  const auto& e = tuple.entries;
  if (e.size() != 6) fail(ErrorKind::MalformedTuple, "six-tuple needs 6 entries, got " + std::to_string(e.size()));
  if (std::count_if(e.begin(), e.end(), [](const TupleEntry& x) { return x.island == Island::T; }) != 3) {
    fail(ErrorKind::MalformedTuple, "six-tuple needs exactly 3 entries per island");
  }
  if (tuple.window_ns < 0) fail(ErrorKind::MalformedTuple, "window must be nonnegative");
  for (const auto& [t, l] : tuple.claimed_pairs) {
    if (t >= e.size() || l >= e.size()) fail(ErrorKind::MalformedTuple, "claimed pair index out of range");
    if (e[t].island != Island::T || e[l].island != Island::L) {
      fail(ErrorKind::MalformedTuple, "claimed pair must join a T entry with an L entry");
    }
  }

  std::vector<TopologyViolation> out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      if (e[i].island == e[j].island && e[i].time_ns == e[j].time_ns) {
        out.push_back({TopologyViolationKind::DuplicateTime, {i, j}});
      }
    }
  }

  using Key = std::tuple<Island, Label, std::int64_t>;
  std::map<Key, std::vector<std::size_t>> uses;
  for (const auto& [t, l] : tuple.claimed_pairs) {
    uses[{e[t].island, e[t].setting, e[t].time_ns}].push_back(t);
    uses[{e[l].island, e[l].setting, e[l].time_ns}].push_back(l);
  }
  for (const auto& [key, who] : uses) {
    if (who.size() > 1) out.push_back({TopologyViolationKind::ReusedMeasurement, who});
  }

  for (const auto& [t, l] : tuple.claimed_pairs) {
    const std::int64_t dt = e[t].time_ns > e[l].time_ns ? e[t].time_ns - e[l].time_ns : e[l].time_ns - e[t].time_ns;
    if (dt > tuple.window_ns) out.push_back({TopologyViolationKind::OutsideWindow, {t, l}});
  }
  return out;
}

inline TupleEntry entry_of(const DetectionEvent& ev) { return {ev.island, ev.setting, ev.time_ns, ev.outcome}; }

/// A genuine Bell triple laid out as a six-tuple with its three matched pairs.
inline TopologyTuple six_tuple_of(const BellTriple& triple) {
  TopologyTuple t;
  const std::array<const PairRecord*, 3> pairs{&triple.ab(), &triple.ac(), &triple.bc()};
  for (const auto* p : pairs) t.entries.push_back(entry_of(p->left()));
  for (const auto* p : pairs) t.entries.push_back(entry_of(p->right()));
  for (std::size_t i = 0; i < 3; ++i) {
    t.claimed_pairs.emplace_back(i, i + 3);
    t.window_ns = std::max(t.window_ns, pairs[i]->window_ns());
  }
  return t;
}

/// Regroups three matched pairs [a;c] (time h), [b;a] (time i), [c;b]
/// (time j) into one entry per setting per island,
///   (a,t_h / b,t_i / c,t_j ; a,t_i' / b,t_j' / c,t_h'),
/// and claims the Bell pairings (a;b), (a;c), (b;c) on it, or all nine
/// pairings when `all_nine` is set.
inline TopologyTuple regroup_by_settings(const PairRecord& ac, const PairRecord& ba, const PairRecord& cb,
                                         bool all_nine = false) {
  if (ac.settings() != SettingPair{Label::a, Label::c} || ba.settings() != SettingPair{Label::b, Label::a} ||
      cb.settings() != SettingPair{Label::c, Label::b}) {
    fail(ErrorKind::InvalidValue, "regrouping needs pairs with settings [a;c], [b;a], [c;b]");
  }
  TopologyTuple t;
  t.entries = {entry_of(ac.left()), entry_of(ba.left()), entry_of(cb.left()),
               entry_of(ba.right()), entry_of(cb.right()), entry_of(ac.right())};
  t.window_ns = std::max({ac.window_ns(), ba.window_ns(), cb.window_ns()});
  // entries 0..2 are T a,b,c and 3..5 are L a,b,c
  if (all_nine) {
    for (std::size_t x = 0; x < 3; ++x) {
      for (std::size_t y = 0; y < 3; ++y) t.claimed_pairs.emplace_back(x, 3 + y);
    }
  } else {
    t.claimed_pairs = {{0, 4}, {0, 5}, {1, 5}};
  }
  return t;
}

// ---------------------------------------------------------------------------
// Counterfactual augmentation

/// The "?" entry added to a measured pair: its setting is known, its island,
/// time and outcome are not.
struct CounterfactualEntry {
  Label setting;
  std::optional<Island> origin;
  std::optional<std::int64_t> time_ns;
  std::optional<Outcome> outcome;
};

/// A measured pair plus a counterfactual third entry. Deliberately not a
/// PairRecord, so it cannot be tallied.
class AugmentedTriple {
 public:
  AugmentedTriple(PairRecord measured, CounterfactualEntry extra) : measured_(std::move(measured)), extra_(extra) {}

  const PairRecord& measured() const noexcept { return measured_; }
  const CounterfactualEntry& extra() const noexcept { return extra_; }

 private:
  PairRecord measured_;
  CounterfactualEntry extra_;
};

inline AugmentedTriple augment_triple(const PairRecord& pair, Label extra_setting) {
  if (extra_setting == pair.left().setting || extra_setting == pair.right().setting) {
    fail(ErrorKind::SettingCollision, "extra setting '" + to_string(extra_setting) + "' already measured in the pair");
  }
  return {pair, CounterfactualEntry{extra_setting, std::nullopt, std::nullopt, std::nullopt}};
}

}  // namespace eprb
