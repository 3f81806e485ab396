#pragma once

// Event-stream generators for the two stations. Each generator is a pure
// function of its SourceConfig (seed included). Settings are drawn per
// emission; detection time is the emission time plus optional delay and
// uniform jitter.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eprb/core.hpp"
#include "eprb/error.hpp"
#include "eprb/random.hpp"

namespace eprb {

enum class SourceKind { singlet, wigner_domain, local_delay };

inline std::string to_string(SourceKind k) {
  switch (k) {
    case SourceKind::singlet: return "singlet";
    case SourceKind::wigner_domain: return "wigner-domain";
    case SourceKind::local_delay: return "local-delay";
  }
  return "unknown";
}

inline SourceKind parse_source_kind(std::string_view s) {
  if (s == "singlet") return SourceKind::singlet;
  if (s == "wigner-domain") return SourceKind::wigner_domain;
  if (s == "local-delay") return SourceKind::local_delay;
  fail(ErrorKind::ConfigParse, "kind must be singlet, wigner-domain or local-delay, got '" + std::string(s) + "'");
}

struct DelayModel {
  std::int64_t max_delay_ns = 0;
  double delay_exponent = 0.0;
};

struct SourceConfig {
  SourceKind kind = SourceKind::singlet;
  SettingSet settings;
  // Per-station restrictions of `settings`; both default to all of them.
  std::optional<std::vector<Label>> left_settings;
  std::optional<std::vector<Label>> right_settings;
  // Exactly one of these is set. pairs_per_combination emits every
  // (left, right) combination that many times in a shuffled order.
  std::optional<std::uint64_t> pairs_per_combination;
  std::optional<std::uint64_t> total_pairs;
  std::int64_t emission_period_ns = 1000;
  std::int64_t jitter_ns = 0;
  std::optional<DelayModel> delay;                          // local-delay only
  std::optional<WignerDomainDistribution> domain_weights;   // wigner-domain only
  Convention convention = Convention::anti;
  std::uint64_t seed = 0;

  std::vector<Label> left_labels() const { return station_labels(left_settings); }
  std::vector<Label> right_labels() const { return station_labels(right_settings); }

  std::uint64_t emission_count() const {
    if (total_pairs) return *total_pairs;
    return *pairs_per_combination * left_labels().size() * right_labels().size();
  }

  void validate() const {
    auto bad = [](const std::string& what) { fail(ErrorKind::ConfigParse, what); };
    if (settings.size() == 0) bad("settings must not be empty");
    for (const auto* side : {&left_settings, &right_settings}) {
      if (!side->has_value()) continue;
      if ((*side)->empty()) bad("station setting lists must not be empty");
      for (Label l : **side) {
        if (!settings.contains(l)) bad("station setting '" + to_string(l) + "' is not in settings");
      }
    }
    if (pairs_per_combination.has_value() == total_pairs.has_value()) {
      bad("exactly one of pairs_per_combination and total_pairs must be given");
    }
    if ((pairs_per_combination && *pairs_per_combination == 0) || (total_pairs && *total_pairs == 0)) {
      bad("pair counts must be positive");
    }
    if (emission_period_ns <= 0) bad("emission_period_ns must be positive");
    if (jitter_ns < 0) bad("jitter_ns must be nonnegative");
    if (emission_period_ns <= 2 * jitter_ns) bad("emission_period_ns must exceed 2 * jitter_ns");
    if ((kind == SourceKind::local_delay) != delay.has_value()) {
      bad("max_delay_ns and delay_exponent are required for local-delay and only for it");
    }
    if (delay && (delay->max_delay_ns < 0 || !(delay->delay_exponent >= 0.0))) {
      bad("max_delay_ns and delay_exponent must be nonnegative");
    }
    if ((kind == SourceKind::wigner_domain) != domain_weights.has_value()) {
      bad("domain_weights are required for wigner-domain and only for it");
    }
    if (domain_weights) {
      for (const auto& s : settings.all()) {
        if (index_of(s.label()) >= domain_weights->settings_per_side()) {
          bad("setting '" + to_string(s.label()) + "' has no slot in the domain symbols");
        }
      }
    }
  }

 private:
  std::vector<Label> station_labels(const std::optional<std::vector<Label>>& restriction) const {
    if (restriction) return *restriction;
    std::vector<Label> out;
    for (const auto& s : settings.all()) out.push_back(s.label());
    return out;
  }
};

struct SourceOutput {
  EventStream left;   // Tenerife
  EventStream right;  // La Palma
};

namespace detail {

struct Emission {
  Label left;
  Label right;
};

inline std::vector<Emission> draw_schedule(const SourceConfig& cfg) {
  const auto left = cfg.left_labels();
  const auto right = cfg.right_labels();
  std::vector<Emission> schedule;
  if (cfg.total_pairs) {
    Rng rng_t(cfg.seed, Stream::StationT);
    Rng rng_l(cfg.seed, Stream::StationL);
    schedule.resize(*cfg.total_pairs);
    for (auto& e : schedule) e.left = left[rng_t.below(left.size())];
    for (auto& e : schedule) e.right = right[rng_l.below(right.size())];
    return schedule;
  }
  schedule.reserve(cfg.emission_count());
  for (Label x : left) {
    for (Label y : right) {
      for (std::uint64_t k = 0; k < *cfg.pairs_per_combination; ++k) schedule.push_back({x, y});
    }
  }
  Rng rng(cfg.seed, Stream::Schedule);
  rng.shuffle(std::span<Emission>(schedule));
  return schedule;
}

inline void require_kind(const SourceConfig& cfg, SourceKind kind) {
  if (cfg.kind != kind) {
    fail(ErrorKind::ConfigMismatch, "generator for " + to_string(kind) + " given a " + to_string(cfg.kind) + " config");
  }
  cfg.validate();
}

inline double radians(double deg) { return deg * std::numbers::pi / 180.0; }

/// Sorts by time and resolves exact collisions by pushing later events
/// forward one nanosecond, so the stream is strictly increasing.
inline EventStream finish_stream(std::vector<DetectionEvent> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const DetectionEvent& x, const DetectionEvent& y) { return x.time_ns < y.time_ns; });
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].time_ns <= events[i - 1].time_ns) events[i].time_ns = events[i - 1].time_ns + 1;
  }
  return EventStream::from_events(std::move(events));
}

/// Jitters are drawn per station, after the schedule, so that neither
/// station's randomness depends on the other's.
inline std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> draw_jitter(const SourceConfig& cfg,
                                                                                   std::size_t n) {
  Rng rng_t(cfg.seed ^ 0x5EEDULL, Stream::StationT);
  Rng rng_l(cfg.seed ^ 0x5EEDULL, Stream::StationL);
  std::vector<std::int64_t> jt(n, 0), jl(n, 0);
  if (cfg.jitter_ns > 0) {
    for (auto& j : jt) j = rng_t.between(0, cfg.jitter_ns);
    for (auto& j : jl) j = rng_l.between(0, cfg.jitter_ns);
  }
  return {std::move(jt), std::move(jl)};
}

}  // namespace detail

/// P(s = s') for the singlet in the anti convention at angle difference theta.
inline double singlet_equal_probability(double theta_deg) {
  const double half = detail::radians(theta_deg) / 2.0;
  return std::sin(half) * std::sin(half);
}

inline SourceOutput generate_singlet(const SourceConfig& cfg) {
  detail::require_kind(cfg, SourceKind::singlet);
  const auto schedule = detail::draw_schedule(cfg);
  const auto [jt, jl] = detail::draw_jitter(cfg, schedule.size());
  Rng source(cfg.seed, Stream::Source);
  std::vector<DetectionEvent> left, right;
  left.reserve(schedule.size());
  right.reserve(schedule.size());
  for (std::size_t n = 0; n < schedule.size(); ++n) {
    const auto [x, y] = schedule[n];
    const double theta = cfg.settings.angle_deg(x) - cfg.settings.angle_deg(y);
    const Outcome s = source.bernoulli(0.5) ? Outcome::plus : Outcome::minus;
    Outcome s2 = source.bernoulli(singlet_equal_probability(theta)) ? s : flip(s);
    if (cfg.convention == Convention::equal) s2 = flip(s2);
    const std::int64_t t0 = static_cast<std::int64_t>(n) * cfg.emission_period_ns;
    left.push_back({Island::T, t0 + jt[n], x, s});
    right.push_back({Island::L, t0 + jl[n], y, s2});
  }
  return {detail::finish_stream(std::move(left)), detail::finish_stream(std::move(right))};
}

/// Maps exact domain weights to a floating cumulative table.
class DomainSampler {
 public:
  explicit DomainSampler(const WignerDomainDistribution& d) : n_(d.settings_per_side()) {
    double acc = 0.0;
    for (const auto& w : d.weights()) {
      acc += to_double(w);
      cumulative_.push_back(acc);
    }
    // The last positive-weight domain absorbs the rounding slack.
    for (std::size_t i = cumulative_.size(); i-- > 0;) {
      if (d.weights()[i] != 0) {
        for (std::size_t j = i; j < cumulative_.size(); ++j) cumulative_[j] = 1.0;
        break;
      }
    }
  }

  Domain draw(Rng& rng) const {
    const double u = rng.uniform01();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return Domain(n_, static_cast<std::uint32_t>(it - cumulative_.begin()));
  }

 private:
  int n_;
  std::vector<double> cumulative_;
};

inline SourceOutput generate_wigner_domain(const SourceConfig& cfg) {
  detail::require_kind(cfg, SourceKind::wigner_domain);
  const auto schedule = detail::draw_schedule(cfg);
  const auto [jt, jl] = detail::draw_jitter(cfg, schedule.size());
  const DomainSampler sampler(*cfg.domain_weights);
  Rng source(cfg.seed, Stream::Source);
  std::vector<DetectionEvent> left, right;
  left.reserve(schedule.size());
  right.reserve(schedule.size());
  for (std::size_t n = 0; n < schedule.size(); ++n) {
    const auto [x, y] = schedule[n];
    const Domain dom = sampler.draw(source);
    const Outcome s = dom.sigma(index_of(x));
    Outcome s2 = dom.tau(index_of(y));
    if (cfg.convention == Convention::anti) s2 = flip(s2);
    const std::int64_t t0 = static_cast<std::int64_t>(n) * cfg.emission_period_ns;
    left.push_back({Island::T, t0 + jt[n], x, s});
    right.push_back({Island::L, t0 + jl[n], y, s2});
  }
  return {detail::finish_stream(std::move(left)), detail::finish_stream(std::move(right))};
}

/// One station of the local-delay model. It sees only its own setting, the
/// hidden angle carried by the particle and its own jitter.
inline DetectionEvent local_delay_station(Island island, const Setting& setting, double lambda_rad,
                                          std::int64_t emission_time_ns, std::int64_t jitter_ns,
                                          const DelayModel& model, Convention convention) {
  const double offset = detail::radians(setting.angle_deg()) - lambda_rad;
  const double weight = std::pow(std::abs(std::sin(offset)), model.delay_exponent);
  const auto delay = static_cast<std::int64_t>(std::floor(static_cast<double>(model.max_delay_ns) * weight));
  Outcome o = std::cos(offset) >= 0.0 ? Outcome::plus : Outcome::minus;
  if (island == Island::L && convention == Convention::anti) o = flip(o);
  return {island, emission_time_ns + delay + jitter_ns, setting.label(), o};
}

inline SourceOutput generate_local_delay(const SourceConfig& cfg) {
  detail::require_kind(cfg, SourceKind::local_delay);
  const auto schedule = detail::draw_schedule(cfg);
  const auto [jt, jl] = detail::draw_jitter(cfg, schedule.size());
  Rng source(cfg.seed, Stream::Source);
  std::vector<DetectionEvent> left, right;
  left.reserve(schedule.size());
  right.reserve(schedule.size());
  for (std::size_t n = 0; n < schedule.size(); ++n) {
    const double lambda = source.uniform01() * 2.0 * std::numbers::pi;
    const std::int64_t t0 = static_cast<std::int64_t>(n) * cfg.emission_period_ns;
    left.push_back(local_delay_station(Island::T, cfg.settings.at(schedule[n].left), lambda, t0, jt[n], *cfg.delay,
                                       cfg.convention));
    right.push_back(local_delay_station(Island::L, cfg.settings.at(schedule[n].right), lambda, t0, jl[n], *cfg.delay,
                                        cfg.convention));
  }
  return {detail::finish_stream(std::move(left)), detail::finish_stream(std::move(right))};
}

inline SourceOutput generate(const SourceConfig& cfg) {
  switch (cfg.kind) {
    case SourceKind::singlet: return generate_singlet(cfg);
    case SourceKind::wigner_domain: return generate_wigner_domain(cfg);
    case SourceKind::local_delay: return generate_local_delay(cfg);
  }
  fail(ErrorKind::Internal, "unknown source kind");
}

}  // namespace eprb
