#pragma once

// Aggregation of matched pairs into tallies and the estimators built on them:
// correlations, equal fractions, the Bell-Wigner inequality, CHSH, window
// sweeps and the cross-trial re-pairing experiment.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "eprb/core.hpp"
#include "eprb/error.hpp"
#include "eprb/inequality_form.hpp"
#include "eprb/pairing.hpp"
#include "eprb/random.hpp"
#include "eprb/rational.hpp"

namespace eprb {

inline TallyTable tally(std::span<const PairRecord> pairs, std::uint64_t unmatched_left = 0,
                        std::uint64_t unmatched_right = 0) {
  std::map<SettingPair, CellCounts> counts;
  for (const auto& p : pairs) counts[p.settings()].add(p.left().outcome, p.right().outcome);
  return TallyTable(std::move(counts), unmatched_left, unmatched_right);
}

inline TallyTable tally(const MatchResult& match) {
  return tally(match.pairs, match.unmatched_left, match.unmatched_right);
}

namespace detail {

inline const CellCounts& nonempty_cell(const TallyTable& t, SettingPair p) {
  auto it = t.counts().find(p);
  if (it == t.counts().end() || it->second.total() == 0) {
    fail(ErrorKind::EmptyCell, "no pairs with settings " + to_string(p));
  }
  return it->second;
}

inline double fraction(std::uint64_t part, std::uint64_t total) {
  return static_cast<double>(part) / static_cast<double>(total);
}

}  // namespace detail

inline Rational correlation_exact(const TallyTable& t, Label x, Label y) {
  const auto& c = detail::nonempty_cell(t, {x, y});
  return Rational(BigInt(c.pp + c.mm) - BigInt(c.pm + c.mp), BigInt(c.total()));
}

/// E = (N++ + N-- - N+- - N-+) / N for the setting pair (x;y).
inline double correlation(const TallyTable& t, Label x, Label y) {
  const auto& c = detail::nonempty_cell(t, {x, y});
  const double same = static_cast<double>(c.pp + c.mm);
  const double diff = static_cast<double>(c.pm + c.mp);
  return (same - diff) / static_cast<double>(c.total());
}

inline Rational equal_fraction_exact(const TallyTable& t, Label x, Label y) {
  const auto& c = detail::nonempty_cell(t, {x, y});
  return Rational(BigInt(c.pp + c.mm), BigInt(c.total()));
}

inline double equal_fraction(const TallyTable& t, Label x, Label y) {
  const auto& c = detail::nonempty_cell(t, {x, y});
  return detail::fraction(c.pp + c.mm, c.total());
}

enum class InequalityKind { bell_wigner, chsh };

inline std::string to_string(InequalityKind k) { return k == InequalityKind::bell_wigner ? "bell-wigner" : "chsh"; }

inline InequalityKind parse_inequality_kind(std::string_view s) {
  if (s == "bell-wigner") return InequalityKind::bell_wigner;
  if (s == "chsh") return InequalityKind::chsh;
  fail(ErrorKind::InvalidValue, "inequality kind must be bell-wigner or chsh, got '" + std::string(s) + "'");
}

/// `statistic` is lhs - rhs for bell-wigner and S for chsh; `violated` is
/// the point-estimate verdict, with the standard error reported beside it.
struct InequalityReport {
  InequalityKind kind = InequalityKind::bell_wigner;
  std::optional<double> lhs;
  std::optional<double> rhs;
  double statistic = 0.0;
  double standard_error = 0.0;
  bool violated = false;
  std::map<SettingPair, std::uint64_t> pair_counts;
};

inline InequalityReport bell_wigner(const TallyTable& t, const std::array<Label, 3>& ordering, Convention convention) {
  const SettingPair zy{ordering[2], ordering[1]};
  const auto terms = bell_wigner_terms(ordering, convention, t.total(zy) > 0);
  const auto& c1 = detail::nonempty_cell(t, terms[0].pair);
  const auto& c2 = detail::nonempty_cell(t, terms[1].pair);
  const auto& c3 = detail::nonempty_cell(t, terms[2].pair);
  const double p1 = detail::fraction(c1.get(terms[0].cell[0], terms[0].cell[1]), c1.total());
  const double p2 = detail::fraction(c2.get(terms[1].cell[0], terms[1].cell[1]), c2.total());
  const double p3 = detail::fraction(c3.get(terms[2].cell[0], terms[2].cell[1]), c3.total());

  InequalityReport r;
  r.kind = InequalityKind::bell_wigner;
  r.lhs = p1;
  r.rhs = p2 + p3;
  r.statistic = p1 - (p2 + p3);
  r.standard_error = std::sqrt(p1 * (1 - p1) / static_cast<double>(c1.total()) +
                               p2 * (1 - p2) / static_cast<double>(c2.total()) +
                               p3 * (1 - p3) / static_cast<double>(c3.total()));
  r.violated = r.statistic > 0.0;
  r.pair_counts = {{terms[0].pair, c1.total()}, {terms[1].pair, c2.total()}, {terms[2].pair, c3.total()}};
  return r;
}

/// S = E(a,b) - E(a,d) + E(c,b) + E(c,d).
inline InequalityReport chsh(const TallyTable& t, const std::array<Label, 4>& ordering) {
  const auto pairs = chsh_pairs(ordering);
  constexpr std::array<double, 4> sign{1.0, -1.0, 1.0, 1.0};
  InequalityReport r;
  r.kind = InequalityKind::chsh;
  double var = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double e = correlation(t, pairs[i].left, pairs[i].right);
    const auto n = t.total(pairs[i]);
    r.statistic += sign[i] * e;
    var += (1.0 - e * e) / static_cast<double>(n);
    r.pair_counts[pairs[i]] = n;
  }
  r.standard_error = std::sqrt(var);
  r.violated = std::abs(r.statistic) > 2.0;
  return r;
}

struct InequalitySpec {
  InequalityKind kind = InequalityKind::chsh;
  std::vector<Label> ordering;
  Convention convention = Convention::anti;

  void validate() const {
    const std::size_t need = kind == InequalityKind::bell_wigner ? 3 : 4;
    if (ordering.size() != need) {
      fail(ErrorKind::InvalidValue, to_string(kind) + " needs an ordering of " + std::to_string(need) + " settings");
    }
  }
};

inline InequalityReport evaluate(const TallyTable& t, const InequalitySpec& spec) {
  spec.validate();
  const auto& o = spec.ordering;
  if (spec.kind == InequalityKind::bell_wigner) return bell_wigner(t, {o[0], o[1], o[2]}, spec.convention);
  return chsh(t, {o[0], o[1], o[2], o[3]});
}

struct SweepRow {
  std::int64_t window_ns;
  std::uint64_t pairs;
  std::optional<double> statistic;  // empty when an input cell had no pairs
  std::optional<double> standard_error;
  bool violated;
};

inline std::vector<SweepRow> sweep_window(const EventStream& left, const EventStream& right,
                                          std::span<const std::int64_t> windows, const InequalitySpec& spec) {
  spec.validate();
  if (windows.empty()) fail(ErrorKind::InvalidValue, "sweep needs at least one window");
  if (!std::is_sorted(windows.begin(), windows.end())) fail(ErrorKind::InvalidValue, "windows must be sorted ascending");
  std::vector<SweepRow> rows;
  for (std::int64_t w : windows) {
    const auto match = match_pairs(left, right, {w});
    SweepRow row{w, match.pairs.size(), std::nullopt, std::nullopt, false};
    try {
      const auto report = evaluate(tally(match), spec);
      row.statistic = report.statistic;
      row.standard_error = report.standard_error;
      row.violated = report.violated;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptyCell) throw;
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string sweep_to_csv(std::span<const SweepRow> rows) {
  std::string out = "window_ns,pairs,statistic,stderr,violated\n";
  for (const auto& r : rows) {
    out += std::to_string(r.window_ns) + "," + std::to_string(r.pairs) + ",";
    out += r.statistic ? format_double(*r.statistic) : "EmptyCell";
    out += ",";
    out += r.standard_error ? format_double(*r.standard_error) : "EmptyCell";
    out += r.violated ? ",true\n" : ",false\n";
  }
  return out;
}

/// Keeps every pair's setting pair and left outcome but re-permutes the
/// right outcomes uniformly within each setting-pair class, destroying the
/// time pairing.
inline TallyTable repair_across_trials(std::span<const PairRecord> pairs, std::uint64_t seed) {
  if (pairs.empty()) fail(ErrorKind::InvalidValue, "re-pairing needs at least one pair");
  std::map<SettingPair, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < pairs.size(); ++i) classes[pairs[i].settings()].push_back(i);

  Rng rng(seed, Stream::Repair);
  std::map<SettingPair, CellCounts> counts;
  for (const auto& [setting, members] : classes) {
    std::vector<Outcome> right;
    right.reserve(members.size());
    for (std::size_t i : members) right.push_back(pairs[i].right().outcome);
    rng.shuffle(std::span<Outcome>(right));
    auto& cell = counts[setting];
    for (std::size_t k = 0; k < members.size(); ++k) cell.add(pairs[members[k]].left().outcome, right[k]);
  }
  return TallyTable(std::move(counts), 0, 0);
}

}  // namespace eprb
