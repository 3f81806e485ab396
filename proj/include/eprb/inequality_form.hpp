#pragma once

#include <array>

#include "eprb/core.hpp"

namespace eprb {

/// One probability in the Bell-Wigner bound: a cell of one setting pair.
struct BellWignerTerm {
  SettingPair pair;
  std::array<Outcome, 2> cell;
};

/// Terms of P(x,y) <= P(x,z) + P(z,y) for ordering (x, y, z). In the anti
/// convention each P is the ++ cell; in the equal convention the right-hand
/// outcome is flipped, so it is the +- cell. When the (z;y) table was not
/// measured, the last term is read from (y;z) with the cell mirrored, which
/// is the same event once equal settings are identified.
inline std::array<BellWignerTerm, 3> bell_wigner_terms(const std::array<Label, 3>& o, Convention c,
                                                       bool have_zy = true) {
  const Outcome r = c == Convention::anti ? Outcome::plus : Outcome::minus;
  const std::array<Outcome, 2> cell{Outcome::plus, r};
  const std::array<Outcome, 2> mirrored{flip(r), Outcome::minus};
  return {BellWignerTerm{{o[0], o[1]}, cell}, BellWignerTerm{{o[0], o[2]}, cell},
          have_zy ? BellWignerTerm{{o[2], o[1]}, cell} : BellWignerTerm{{o[1], o[2]}, mirrored}};
}

/// Pairs read by CHSH for ordering (a, b, c, d): (a;b), (a;d), (c;b), (c;d).
inline std::array<SettingPair, 4> chsh_pairs(const std::array<Label, 4>& o) {
  return {SettingPair{o[0], o[1]}, SettingPair{o[0], o[3]}, SettingPair{o[2], o[1]}, SettingPair{o[2], o[3]}};
}

}  // namespace eprb
