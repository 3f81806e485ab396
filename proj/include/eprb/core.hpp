#pragma once

// Shared vocabulary: settings, detection events, matched pairs, Bell triples,
// hidden-variable domains and outcome tallies. Every type validates its
// invariants in its constructor and is immutable afterwards.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eprb/error.hpp"
#include "eprb/rational.hpp"

namespace eprb {

// ---------------------------------------------------------------------------
// Settings

enum class Label : std::uint8_t { a = 0, b = 1, c = 2, d = 3 };

inline constexpr std::array<Label, 4> kAllLabels{Label::a, Label::b, Label::c, Label::d};

constexpr int index_of(Label l) noexcept { return static_cast<int>(l); }
constexpr char to_char(Label l) noexcept { return static_cast<char>('a' + index_of(l)); }
inline std::string to_string(Label l) { return std::string(1, to_char(l)); }

inline Label label_from_index(int i) {
  if (i < 0 || i > 3) fail(ErrorKind::InvalidValue, "setting index out of range: " + std::to_string(i));
  return static_cast<Label>(i);
}

inline Label parse_label(std::string_view s) {
  if (s.size() != 1 || s[0] < 'a' || s[0] > 'd') {
    fail(ErrorKind::InvalidValue, "setting label must be one of a,b,c,d, got '" + std::string(s) + "'");
  }
  return static_cast<Label>(s[0] - 'a');
}

/// A measurement direction on the measurement plane. The angle representation
/// keeps the direction a unit vector by construction.
class Setting {
 public:
  Setting(Label label, double angle_deg) : label_(label), angle_deg_(angle_deg) {
    if (!(angle_deg >= 0.0 && angle_deg < 360.0)) {
      fail(ErrorKind::InvalidValue, "setting angle must lie in [0, 360), got " + std::to_string(angle_deg));
    }
  }

  Label label() const noexcept { return label_; }
  double angle_deg() const noexcept { return angle_deg_; }

  friend bool operator==(const Setting&, const Setting&) = default;

 private:
  Label label_;
  double angle_deg_;
};

/// The settings of one configuration; labels are pairwise distinct.
class SettingSet {
 public:
  SettingSet() = default;
  explicit SettingSet(std::vector<Setting> settings) : settings_(std::move(settings)) {
    for (std::size_t i = 0; i < settings_.size(); ++i) {
      for (std::size_t j = i + 1; j < settings_.size(); ++j) {
        if (settings_[i].label() == settings_[j].label()) {
          fail(ErrorKind::InvalidValue, "duplicate setting label '" + to_string(settings_[i].label()) + "'");
        }
      }
    }
  }

  std::span<const Setting> all() const noexcept { return settings_; }
  std::size_t size() const noexcept { return settings_.size(); }
  bool contains(Label l) const noexcept {
    return std::any_of(settings_.begin(), settings_.end(), [l](const Setting& s) { return s.label() == l; });
  }
  const Setting& at(Label l) const {
    for (const auto& s : settings_) {
      if (s.label() == l) return s;
    }
    fail(ErrorKind::InvalidValue, "setting '" + to_string(l) + "' not configured");
  }
  double angle_deg(Label l) const { return at(l).angle_deg(); }

 private:
  std::vector<Setting> settings_;
};

// ---------------------------------------------------------------------------
// Events

enum class Island : std::uint8_t { T = 0, L = 1 };

constexpr char to_char(Island i) noexcept { return i == Island::T ? 'T' : 'L'; }

inline Island parse_island(std::string_view s) {
  if (s == "T") return Island::T;
  if (s == "L") return Island::L;
  fail(ErrorKind::InvalidValue, "island must be T or L, got '" + std::string(s) + "'");
}

enum class Outcome : std::int8_t { plus = 1, minus = -1 };

constexpr int value(Outcome o) noexcept { return static_cast<int>(o); }
constexpr Outcome flip(Outcome o) noexcept { return o == Outcome::plus ? Outcome::minus : Outcome::plus; }
constexpr char to_char(Outcome o) noexcept { return o == Outcome::plus ? '+' : '-'; }

inline Outcome outcome_from_int(long long v) {
  if (v == 1) return Outcome::plus;
  if (v == -1) return Outcome::minus;
  fail(ErrorKind::BadOutcome, "outcome must be +1 or -1, got " + std::to_string(v));
}

/// Whether equal settings on the two islands give equal ("equal") or
/// opposite ("anti") outcomes.
enum class Convention { equal, anti };

inline Convention parse_convention(std::string_view s) {
  if (s == "equal") return Convention::equal;
  if (s == "anti") return Convention::anti;
  fail(ErrorKind::InvalidValue, "convention must be 'equal' or 'anti', got '" + std::string(s) + "'");
}
inline std::string to_string(Convention c) { return c == Convention::equal ? "equal" : "anti"; }

struct DetectionEvent {
  Island island;
  std::int64_t time_ns;
  Label setting;
  Outcome outcome;

  friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

/// An event as read from outside, before validation. The outcome is a plain
/// integer so that bad values can be reported rather than rejected on read.
struct RawEvent {
  Island island;
  std::int64_t time_ns;
  Label setting;
  long long outcome;
};

enum class ViolationKind { NonMonotonicTime, MixedIsland, BadOutcome, NegativeTime };

constexpr std::string_view to_string(ViolationKind k) noexcept {
  switch (k) {
    case ViolationKind::NonMonotonicTime: return "NonMonotonicTime";
    case ViolationKind::MixedIsland: return "MixedIsland";
    case ViolationKind::BadOutcome: return "BadOutcome";
    case ViolationKind::NegativeTime: return "NegativeTime";
  }
  return "Unknown";
}

struct StreamViolation {
  ViolationKind kind;
  std::size_t index;

  friend bool operator==(const StreamViolation&, const StreamViolation&) = default;
};

struct StreamValidation;

StreamValidation validate_stream(std::span<const RawEvent> events);

/// A time-sorted single-island stream. Only obtainable through
/// validate_stream, so holding one means the invariants were checked.
class EventStream {
 public:
  EventStream() = default;

  std::span<const DetectionEvent> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  const DetectionEvent& operator[](std::size_t i) const { return events_[i]; }
  /// Empty streams have no island.
  std::optional<Island> island() const noexcept {
    if (events_.empty()) return std::nullopt;
    return events_.front().island;
  }

  friend bool operator==(const EventStream&, const EventStream&) = default;

  /// Validates typed events; throws InvalidStream listing the first violation.
  static EventStream from_events(std::vector<DetectionEvent> events);

 private:
  explicit EventStream(std::vector<DetectionEvent> events) : events_(std::move(events)) {}
  friend StreamValidation validate_stream(std::span<const RawEvent> events);

  std::vector<DetectionEvent> events_;
};

struct StreamValidation {
  std::optional<EventStream> stream;
  std::vector<StreamViolation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

namespace detail {

template <typename Event, typename OutcomeOk>
std::vector<StreamViolation> check_stream(std::span<const Event> events, OutcomeOk outcome_ok) {
  std::vector<StreamViolation> out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (e.time_ns < 0) out.push_back({ViolationKind::NegativeTime, i});
    if (i > 0 && e.island != events[0].island) out.push_back({ViolationKind::MixedIsland, i});
    if (i > 0 && e.time_ns <= events[i - 1].time_ns) out.push_back({ViolationKind::NonMonotonicTime, i});
    if (!outcome_ok(e)) out.push_back({ViolationKind::BadOutcome, i});
  }
  return out;
}

}  // namespace detail

inline StreamValidation validate_stream(std::span<const RawEvent> events) {
  StreamValidation result;
  result.violations =
      detail::check_stream(events, [](const RawEvent& e) { return e.outcome == 1 || e.outcome == -1; });
  if (!result.ok()) return result;
  std::vector<DetectionEvent> typed;
  typed.reserve(events.size());
  for (const auto& e : events) {
    typed.push_back({e.island, e.time_ns, e.setting, e.outcome == 1 ? Outcome::plus : Outcome::minus});
  }
  result.stream = EventStream(std::move(typed));
  return result;
}

inline EventStream EventStream::from_events(std::vector<DetectionEvent> events) {
  auto violations = detail::check_stream(std::span<const DetectionEvent>(events), [](const DetectionEvent& e) {
    return e.outcome == Outcome::plus || e.outcome == Outcome::minus;
  });
  if (!violations.empty()) {
    fail(ErrorKind::InvalidStream, std::string(to_string(violations.front().kind)) + " at index " +
                                       std::to_string(violations.front().index));
  }
  return EventStream(std::move(events));
}

// ---------------------------------------------------------------------------
// Pairs

struct SettingPair {
  Label left;
  Label right;

  friend auto operator<=>(const SettingPair&, const SettingPair&) = default;
};

inline std::string to_string(SettingPair p) { return to_string(p.left) + ";" + to_string(p.right); }

inline SettingPair parse_setting_pair(std::string_view s) {
  auto semi = s.find(';');
  if (semi == std::string_view::npos) fail(ErrorKind::InvalidValue, "setting pair must look like 'x;y', got '" + std::string(s) + "'");
  return {parse_label(s.substr(0, semi)), parse_label(s.substr(semi + 1))};
}

/// A time-matched pair [s, j, t; s', j', t'].
class PairRecord {
 public:
  PairRecord(const DetectionEvent& left, const DetectionEvent& right, std::int64_t window_ns)
      : left_(left), right_(right), window_ns_(window_ns) {
    if (left.island != Island::T || right.island != Island::L) {
      fail(ErrorKind::InvalidValue, "pair must join a T event (left) with an L event (right)");
    }
    if (window_ns < 0) fail(ErrorKind::InvalidValue, "window must be nonnegative");
    if (time_difference() > window_ns) {
      fail(ErrorKind::InvalidValue, "pair time difference " + std::to_string(time_difference()) +
                                        " exceeds window " + std::to_string(window_ns));
    }
  }

  const DetectionEvent& left() const noexcept { return left_; }
  const DetectionEvent& right() const noexcept { return right_; }
  std::int64_t window_ns() const noexcept { return window_ns_; }
  SettingPair settings() const noexcept { return {left_.setting, right_.setting}; }
  std::int64_t time_difference() const noexcept {
    return left_.time_ns > right_.time_ns ? left_.time_ns - right_.time_ns : right_.time_ns - left_.time_ns;
  }

  friend bool operator==(const PairRecord&, const PairRecord&) = default;

 private:
  DetectionEvent left_;
  DetectionEvent right_;
  std::int64_t window_ns_;
};

/// Bell's six-tuple: pairs with settings (a;b), (a;c), (b;c) taken from the
/// disjoint trial ranges k <= M < l <= 2M < m <= 3M.
class BellTriple {
 public:
  BellTriple(PairRecord ab, PairRecord ac, PairRecord bc, std::int64_t k, std::int64_t l, std::int64_t m,
             std::int64_t trials_per_pair)
      : ab_(std::move(ab)), ac_(std::move(ac)), bc_(std::move(bc)), k_(k), l_(l), m_(m), trials_(trials_per_pair) {
    if (ab_.settings() != SettingPair{Label::a, Label::b} || ac_.settings() != SettingPair{Label::a, Label::c} ||
        bc_.settings() != SettingPair{Label::b, Label::c}) {
      fail(ErrorKind::InvalidValue, "Bell triple needs settings (a;b), (a;c), (b;c)");
    }
    const std::int64_t M = trials_per_pair;
    if (M < 1 || !(1 <= k && k <= M && M < l && l <= 2 * M && 2 * M < m && m <= 3 * M)) {
      fail(ErrorKind::InvalidValue, "Bell triple indices must satisfy 1 <= k <= M < l <= 2M < m <= 3M");
    }
    const std::array<DetectionEvent, 6> ev{ab_.left(), ac_.left(), bc_.left(), ab_.right(), ac_.right(), bc_.right()};
    for (std::size_t i = 0; i < ev.size(); ++i) {
      for (std::size_t j = i + 1; j < ev.size(); ++j) {
        if (ev[i].island == ev[j].island && ev[i].time_ns == ev[j].time_ns) {
          fail(ErrorKind::InvalidValue, "Bell triple events must be pairwise distinct");
        }
      }
    }
  }

  const PairRecord& ab() const noexcept { return ab_; }
  const PairRecord& ac() const noexcept { return ac_; }
  const PairRecord& bc() const noexcept { return bc_; }
  std::int64_t k() const noexcept { return k_; }
  std::int64_t l() const noexcept { return l_; }
  std::int64_t m() const noexcept { return m_; }
  std::int64_t trials_per_pair() const noexcept { return trials_; }

 private:
  PairRecord ab_, ac_, bc_;
  std::int64_t k_, l_, m_, trials_;
};

// ---------------------------------------------------------------------------
// Hidden-variable domains

/// One symbol (sigma_1..sigma_n; tau_1..tau_n). Bit i set means sigma_{i+1}
/// is -1, bit n+i set means tau_{i+1} is -1; index 0 is all plus.
class Domain {
 public:
  Domain(int settings_per_side, std::uint32_t index) : n_(settings_per_side), index_(index) {
    if (n_ < 1 || n_ > 4) fail(ErrorKind::InvalidValue, "settings per side must be 1..4");
    if (index_ >= (1u << (2 * n_))) fail(ErrorKind::InvalidValue, "domain index out of range");
  }

  int settings_per_side() const noexcept { return n_; }
  std::uint32_t index() const noexcept { return index_; }
  Outcome sigma(int i) const noexcept { return (index_ >> i) & 1u ? Outcome::minus : Outcome::plus; }
  Outcome tau(int i) const noexcept { return (index_ >> (n_ + i)) & 1u ? Outcome::minus : Outcome::plus; }
  bool identified() const noexcept {
    const std::uint32_t mask = (1u << n_) - 1u;
    return (index_ & mask) == ((index_ >> n_) & mask);
  }

  std::string symbol() const {
    std::string s;
    for (int i = 0; i < n_; ++i) s += to_char(sigma(i));
    s += ';';
    for (int i = 0; i < n_; ++i) s += to_char(tau(i));
    return s;
  }

  static Domain parse(std::string_view symbol) {
    auto semi = symbol.find(';');
    if (semi == std::string_view::npos || semi == 0 || semi * 2 + 1 != symbol.size() || semi > 4) {
      fail(ErrorKind::InvalidValue, "domain symbol must look like '+-+;++-', got '" + std::string(symbol) + "'");
    }
    const int n = static_cast<int>(semi);
    std::uint32_t index = 0;
    for (int i = 0; i < 2 * n; ++i) {
      char ch = symbol[i < n ? i : i + 1];
      if (ch == '-') {
        index |= 1u << i;
      } else if (ch != '+') {
        fail(ErrorKind::InvalidValue, "domain symbol entries must be '+' or '-'");
      }
    }
    return Domain(n, index);
  }

  /// The identified domain with sigma = tau = the given bits.
  static Domain identified_from_bits(int settings_per_side, std::uint32_t sigma_bits) {
    return Domain(settings_per_side, sigma_bits | (sigma_bits << settings_per_side));
  }

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  int n_;
  std::uint32_t index_;
};

/// Nonnegative exact weights on the 2^(2n) domains that sum to one.
class WignerDomainDistribution {
 public:
  WignerDomainDistribution(int settings_per_side, std::vector<Rational> weights)
      : n_(settings_per_side), weights_(std::move(weights)) {
    if (n_ < 1 || n_ > 4) fail(ErrorKind::InvalidValue, "settings per side must be 1..4");
    if (weights_.size() != (std::size_t{1} << (2 * n_))) {
      fail(ErrorKind::InvalidValue, "expected " + std::to_string(std::size_t{1} << (2 * n_)) + " domain weights, got " +
                                        std::to_string(weights_.size()));
    }
    Rational sum = 0;
    for (const auto& w : weights_) {
      if (w < 0) fail(ErrorKind::InvalidValue, "domain weights must be nonnegative");
      sum += w;
    }
    if (sum != 1) fail(ErrorKind::InvalidValue, "domain weights must sum to 1, got " + to_fraction_string(sum));
  }

  static WignerDomainDistribution uniform(int settings_per_side = 3) {
    const std::size_t count = std::size_t{1} << (2 * settings_per_side);
    return {settings_per_side, std::vector<Rational>(count, Rational(1, static_cast<long>(count)))};
  }

  static WignerDomainDistribution point_mass(const Domain& d) {
    std::vector<Rational> w(std::size_t{1} << (2 * d.settings_per_side()), Rational(0));
    w[d.index()] = 1;
    return {d.settings_per_side(), std::move(w)};
  }

  /// Uniform over the 2^n domains with tau = sigma.
  static WignerDomainDistribution identified_uniform(int settings_per_side = 3) {
    std::vector<Rational> w(std::size_t{1} << (2 * settings_per_side), Rational(0));
    const std::uint32_t count = 1u << settings_per_side;
    for (std::uint32_t bits = 0; bits < count; ++bits) {
      w[Domain::identified_from_bits(settings_per_side, bits).index()] = Rational(1, count);
    }
    return {settings_per_side, std::move(w)};
  }

  int settings_per_side() const noexcept { return n_; }
  std::size_t size() const noexcept { return weights_.size(); }
  const Rational& weight(std::uint32_t index) const { return weights_.at(index); }
  const Rational& weight(const Domain& d) const { return weights_.at(d.index()); }
  std::span<const Rational> weights() const noexcept { return weights_; }
  Domain domain(std::uint32_t index) const { return Domain(n_, index); }

  /// True when every domain with tau != sigma has zero weight.
  bool supported_on_identified() const {
    for (std::uint32_t i = 0; i < weights_.size(); ++i) {
      if (weights_[i] != 0 && !Domain(n_, i).identified()) return false;
    }
    return true;
  }

  friend bool operator==(const WignerDomainDistribution&, const WignerDomainDistribution&) = default;

 private:
  int n_;
  std::vector<Rational> weights_;
};

// ---------------------------------------------------------------------------
// Tallies

struct CellCounts {
  std::uint64_t pp = 0, pm = 0, mp = 0, mm = 0;

  std::uint64_t total() const noexcept { return pp + pm + mp + mm; }
  std::uint64_t get(Outcome s, Outcome s2) const noexcept {
    if (s == Outcome::plus) return s2 == Outcome::plus ? pp : pm;
    return s2 == Outcome::plus ? mp : mm;
  }
  void add(Outcome s, Outcome s2, std::uint64_t n = 1) noexcept {
    if (s == Outcome::plus) {
      (s2 == Outcome::plus ? pp : pm) += n;
    } else {
      (s2 == Outcome::plus ? mp : mm) += n;
    }
  }

  friend bool operator==(const CellCounts&, const CellCounts&) = default;
};

/// Outcome counts N(s, s') per setting pair plus the unmatched event counts.
class TallyTable {
 public:
  TallyTable() = default;
  TallyTable(std::map<SettingPair, CellCounts> counts, std::uint64_t unmatched_left, std::uint64_t unmatched_right)
      : counts_(std::move(counts)), unmatched_left_(unmatched_left), unmatched_right_(unmatched_right) {}

  const std::map<SettingPair, CellCounts>& counts() const noexcept { return counts_; }
  CellCounts cell(SettingPair p) const {
    auto it = counts_.find(p);
    return it == counts_.end() ? CellCounts{} : it->second;
  }
  std::uint64_t total(SettingPair p) const { return cell(p).total(); }
  std::uint64_t unmatched_left() const noexcept { return unmatched_left_; }
  std::uint64_t unmatched_right() const noexcept { return unmatched_right_; }
  std::uint64_t total_pairs() const noexcept {
    std::uint64_t n = 0;
    for (const auto& [_, c] : counts_) n += c.total();
    return n;
  }

  friend bool operator==(const TallyTable&, const TallyTable&) = default;

 private:
  std::map<SettingPair, CellCounts> counts_;
  std::uint64_t unmatched_left_ = 0;
  std::uint64_t unmatched_right_ = 0;
};

/// e equal and u = M - e unequal outcomes in a string of M pairs.
class CorrelationClass {
 public:
  CorrelationClass(int equal_count, int trials) : equal_(equal_count), unequal_(trials - equal_count) {
    if (trials < 1 || equal_count < 0 || equal_count > trials) {
      fail(ErrorKind::InvalidValue, "correlation class needs 0 <= e <= M");
    }
  }

  int equal_count() const noexcept { return equal_; }
  int unequal_count() const noexcept { return unequal_; }
  int trials() const noexcept { return equal_ + unequal_; }
  std::string to_string() const { return std::to_string(equal_) + "/" + std::to_string(unequal_); }

  friend bool operator==(const CorrelationClass&, const CorrelationClass&) = default;

 private:
  int equal_;
  int unequal_;
};

}  // namespace eprb
