#pragma once

// Does a set of measured pairwise tables admit one joint distribution over
// the hidden-variable domains? Decided exactly by phase-1 simplex; every
// answer carries a witness that is re-checked by substitution before it is
// returned.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eprb/core.hpp"
#include "eprb/error.hpp"
#include "eprb/inequality_form.hpp"
#include "eprb/rational.hpp"
#include "eprb/simplex.hpp"

namespace eprb {

/// Cells in the order pp, pm, mp, mm.
using ProbabilityTable = std::array<Rational, 4>;

inline constexpr std::array<std::array<Outcome, 2>, 4> kCellOrder{{{Outcome::plus, Outcome::plus},
                                                                   {Outcome::plus, Outcome::minus},
                                                                   {Outcome::minus, Outcome::plus},
                                                                   {Outcome::minus, Outcome::minus}}};
inline constexpr std::array<const char*, 4> kCellNames{"pp", "pm", "mp", "mm"};

constexpr std::size_t cell_index(Outcome s, Outcome s2) noexcept {
  return (s == Outcome::plus ? 0u : 2u) + (s2 == Outcome::plus ? 0u : 1u);
}

class PairwiseTables {
 public:
  PairwiseTables(int settings_per_side, std::map<SettingPair, ProbabilityTable> tables)
      : n_(settings_per_side), tables_(std::move(tables)) {
    if (n_ < 1 || n_ > 4) fail(ErrorKind::InvalidValue, "settings per side must be 1..4");
    if (tables_.empty()) fail(ErrorKind::InvalidValue, "at least one measured pair is required");
    for (const auto& [pair, t] : tables_) {
      if (index_of(pair.left) >= n_ || index_of(pair.right) >= n_) {
        fail(ErrorKind::InvalidValue, "pair " + to_string(pair) + " outside " + std::to_string(n_) + " settings");
      }
      Rational sum = 0;
      for (const auto& p : t) {
        if (p < 0) fail(ErrorKind::InvalidValue, "negative probability in table " + to_string(pair));
        sum += p;
      }
      if (sum != 1) fail(ErrorKind::InvalidValue, "table " + to_string(pair) + " sums to " + to_fraction_string(sum));
    }
  }

  /// Normalises counts to exact frequencies. Pairs with no counts are
  /// skipped; if `settings_per_side` is 0 it is inferred from the labels.
  static PairwiseTables from_tally(const TallyTable& t, int settings_per_side = 0,
                                   const std::vector<SettingPair>& only = {}) {
    std::map<SettingPair, ProbabilityTable> tables;
    int n = 0;
    for (const auto& [pair, c] : t.counts()) {
      if (c.total() == 0) continue;
      if (!only.empty() && std::find(only.begin(), only.end(), pair) == only.end()) continue;
      const BigInt total(c.total());
      tables[pair] = {Rational(BigInt(c.pp), total), Rational(BigInt(c.pm), total), Rational(BigInt(c.mp), total),
                      Rational(BigInt(c.mm), total)};
      n = std::max({n, index_of(pair.left) + 1, index_of(pair.right) + 1});
    }
    for (const auto& p : only) {
      if (!tables.count(p)) fail(ErrorKind::EmptyCell, "no pairs with settings " + to_string(p));
    }
    return {settings_per_side > 0 ? settings_per_side : n, std::move(tables)};
  }

  int settings_per_side() const noexcept { return n_; }
  const std::map<SettingPair, ProbabilityTable>& tables() const noexcept { return tables_; }
  const ProbabilityTable& at(SettingPair p) const {
    auto it = tables_.find(p);
    if (it == tables_.end()) fail(ErrorKind::EmptyCell, "table " + to_string(p) + " not measured");
    return it->second;
  }
  const Rational& p(SettingPair pair, Outcome s, Outcome s2) const { return at(pair)[cell_index(s, s2)]; }
  std::vector<SettingPair> measured_pairs() const {
    std::vector<SettingPair> out;
    for (const auto& [p, _] : tables_) out.push_back(p);
    return out;
  }

  friend bool operator==(const PairwiseTables&, const PairwiseTables&) = default;

 private:
  int n_;
  std::map<SettingPair, ProbabilityTable> tables_;
};

/// The L outcome a domain prescribes for setting y: tau_y in the equal
/// convention, -tau_y in the anti convention.
inline Outcome observed_right(const Domain& d, Label y, Convention c) {
  const Outcome t = d.tau(index_of(y));
  return c == Convention::equal ? t : flip(t);
}

inline PairwiseTables marginalize(const WignerDomainDistribution& d, const std::vector<SettingPair>& measured,
                                  bool identify_equal_settings, Convention convention = Convention::equal) {
  if (identify_equal_settings && !d.supported_on_identified()) {
    fail(ErrorKind::SupportViolation, "identification requested but weight sits on domains with tau != sigma");
  }
  std::map<SettingPair, ProbabilityTable> tables;
  for (const auto& pair : measured) {
    if (index_of(pair.left) >= d.settings_per_side() || index_of(pair.right) >= d.settings_per_side()) {
      fail(ErrorKind::InvalidValue, "pair " + to_string(pair) + " has no slot in the domain symbols");
    }
    ProbabilityTable t{Rational(0), Rational(0), Rational(0), Rational(0)};
    for (std::uint32_t i = 0; i < d.size(); ++i) {
      if (d.weight(i) == 0) continue;
      const Domain dom = d.domain(i);
      t[cell_index(dom.sigma(index_of(pair.left)), observed_right(dom, pair.right, convention))] += d.weight(i);
    }
    tables[pair] = t;
  }
  return {d.settings_per_side(), std::move(tables)};
}

enum class FeasibilityStatus { feasible, infeasible };

struct FarkasCertificate {
  std::vector<std::string> row_labels;  // "total" or "x;y:cell"
  std::vector<Rational> y;
  Rational y_dot_b;
};

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::infeasible;
  std::optional<WignerDomainDistribution> witness;
  std::optional<FarkasCertificate> certificate;
  bool identified = false;
  Convention convention = Convention::equal;
};

namespace detail {

struct FeasibilitySystem {
  std::vector<std::uint32_t> columns;  // domain index of each LP variable
  lp::Matrix A;
  std::vector<Rational> b;
  std::vector<std::string> labels;
};

inline FeasibilitySystem build_system(const PairwiseTables& t, bool identify, Convention convention) {
  const int n = t.settings_per_side();
  FeasibilitySystem sys;
  if (identify) {
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) sys.columns.push_back(Domain::identified_from_bits(n, bits).index());
  } else {
    for (std::uint32_t i = 0; i < (1u << (2 * n)); ++i) sys.columns.push_back(i);
  }
  const std::size_t cols = sys.columns.size();
  sys.A.emplace_back(cols, Rational(1));
  sys.b.emplace_back(1);
  sys.labels.emplace_back("total");
  for (const auto& [pair, table] : t.tables()) {
    for (std::size_t cell = 0; cell < 4; ++cell) {
      std::vector<Rational> row(cols, Rational(0));
      for (std::size_t j = 0; j < cols; ++j) {
        const Domain dom(n, sys.columns[j]);
        if (dom.sigma(index_of(pair.left)) == kCellOrder[cell][0] &&
            observed_right(dom, pair.right, convention) == kCellOrder[cell][1]) {
          row[j] = 1;
        }
      }
      sys.A.push_back(std::move(row));
      sys.b.push_back(table[cell]);
      sys.labels.push_back(to_string(pair) + ":" + kCellNames[cell]);
    }
  }
  return sys;
}

}  // namespace detail

inline FeasibilityResult joint_feasibility(const PairwiseTables& t, bool identify_equal_settings,
                                           Convention convention = Convention::equal) {
  const auto sys = detail::build_system(t, identify_equal_settings, convention);
  const auto solved = lp::solve_feasibility(sys.A, sys.b);
  FeasibilityResult r;
  r.status = solved.feasible ? FeasibilityStatus::feasible : FeasibilityStatus::infeasible;
  r.identified = identify_equal_settings;
  r.convention = convention;
  if (solved.feasible) {
    if (!lp::verify_solution(sys.A, sys.b, solved.solution)) fail(ErrorKind::Internal, "LP solution failed re-substitution");
    const int n = t.settings_per_side();
    std::vector<Rational> weights(std::size_t{1} << (2 * n), Rational(0));
    for (std::size_t j = 0; j < sys.columns.size(); ++j) weights[sys.columns[j]] = solved.solution[j];
    WignerDomainDistribution witness(n, std::move(weights));
    if (marginalize(witness, t.measured_pairs(), identify_equal_settings, convention) != t) {
      fail(ErrorKind::Internal, "witness does not reproduce the tables");
    }
    r.witness = std::move(witness);
  } else {
    if (!lp::verify_farkas(sys.A, sys.b, solved.farkas)) fail(ErrorKind::Internal, "Farkas certificate failed verification");
    Rational yb = 0;
    for (std::size_t i = 0; i < sys.b.size(); ++i) yb += solved.farkas[i] * sys.b[i];
    r.certificate = FarkasCertificate{sys.labels, solved.farkas, yb};
  }
  return r;
}

/// Applies a certificate's separating functional to other tables with the
/// same measured pairs: y_total + sum of y_cell * p_cell.
inline Rational certificate_value(const FarkasCertificate& cert, const PairwiseTables& t) {
  Rational v = 0;
  for (std::size_t i = 0; i < cert.row_labels.size(); ++i) {
    const auto& label = cert.row_labels[i];
    if (label == "total") {
      v += cert.y[i];
      continue;
    }
    const auto colon = label.find(':');
    const SettingPair pair = parse_setting_pair(label.substr(0, colon));
    const std::string cell = label.substr(colon + 1);
    for (std::size_t c = 0; c < 4; ++c) {
      if (cell == kCellNames[c]) v += cert.y[i] * t.at(pair)[c];
    }
  }
  return v;
}

/// Exact lhs - rhs of the Bell-Wigner bound, with the same cells as the
/// sampled estimator.
inline Rational wigner_residual(const PairwiseTables& t, const std::array<Label, 3>& ordering, Convention convention) {
  const bool have_zy = t.tables().count(SettingPair{ordering[2], ordering[1]}) > 0;
  Rational r = 0;
  int sign = 1;
  for (const auto& term : bell_wigner_terms(ordering, convention, have_zy)) {
    r += sign * t.p(term.pair, term.cell[0], term.cell[1]);
    sign = -1;
  }
  return r;
}

}  // namespace eprb
