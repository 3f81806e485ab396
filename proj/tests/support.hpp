#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "eprb/eprb.hpp"

namespace eprb::test {

/// Kind of the eprb::Error thrown by f, or nullopt when f returns.
template <typename F>
std::optional<ErrorKind> thrown_kind(F&& f) {
  try {
    std::invoke(std::forward<F>(f));
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline DetectionEvent ev(Island island, std::int64_t t, Label setting, Outcome o) { return {island, t, setting, o}; }

/// A random valid stream: gaps drawn from [1, max_gap], settings from `labels`.
inline EventStream random_stream(Rng& rng, Island island, std::size_t n, std::int64_t max_gap,
                                 std::vector<Label> labels = {Label::a, Label::b, Label::c}) {
  std::vector<DetectionEvent> events;
  std::int64_t t = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_gap)));
  for (std::size_t i = 0; i < n; ++i) {
    const Label l = labels[rng.below(labels.size())];
    events.push_back({island, t, l, rng.bernoulli(0.5) ? Outcome::plus : Outcome::minus});
    t += rng.between(1, max_gap);
  }
  return EventStream::from_events(std::move(events));
}

inline std::vector<Setting> angles(std::initializer_list<double> degrees) {
  std::vector<Setting> out;
  int i = 0;
  for (double d : degrees) out.emplace_back(label_from_index(i++), d);
  return out;
}

/// Random weights over all 2^(2n) domains, or over the identified ones only.
inline WignerDomainDistribution random_distribution(Rng& rng, int n, bool identified, long max_weight = 9) {
  const std::size_t count = std::size_t{1} << (2 * n);
  std::vector<BigInt> raw(count, 0);
  BigInt sum = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    if (identified && !Domain(n, i).identified()) continue;
    // Zero about a third of the support so that degenerate tables show up.
    const auto w = rng.below(3) == 0 ? 0 : rng.between(1, max_weight);
    raw[i] = w;
    sum += w;
  }
  if (sum == 0) {
    raw[Domain::identified_from_bits(n, 0).index()] = 1;
    sum = 1;
  }
  std::vector<Rational> weights;
  for (const auto& w : raw) weights.emplace_back(w, sum);
  return {n, std::move(weights)};
}

}  // namespace eprb::test
