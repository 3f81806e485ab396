#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "support.hpp"

using namespace eprb;
using eprb::test::thrown_kind;

namespace {

SourceConfig singlet_config(std::vector<Setting> settings, std::uint64_t total, std::uint64_t seed = 1) {
  SourceConfig cfg;
  cfg.kind = SourceKind::singlet;
  cfg.settings = SettingSet(std::move(settings));
  cfg.total_pairs = total;
  cfg.emission_period_ns = 100;
  cfg.jitter_ns = 3;
  cfg.seed = seed;
  return cfg;
}

TallyTable pair_and_tally(const SourceConfig& cfg) {
  const auto out = generate(cfg);
  return tally(match_pairs(out.left, out.right, {cfg.jitter_ns}));
}

// Expected P(s = s') for a singlet pair at relative angle theta, from
// E[s s'] = -cos(theta) in the anti convention.
double equal_probability_oracle(double theta_deg, Convention c) {
  const double e = -std::cos(theta_deg * std::numbers::pi / 180.0);
  const double p = (1.0 + e) / 2.0;
  return c == Convention::anti ? p : 1.0 - p;
}

}  // namespace

TEST_CASE("singlet at equal settings is perfectly anticorrelated") {
  auto cfg = singlet_config({Setting(Label::a, 30)}, 1000);
  const auto t = pair_and_tally(cfg);
  REQUIRE(t.total({Label::a, Label::a}) == 1000);
  CHECK(equal_fraction(t, Label::a, Label::a) == 0.0);
  cfg.convention = Convention::equal;
  CHECK(equal_fraction(pair_and_tally(cfg), Label::a, Label::a) == 1.0);
}

TEST_CASE("singlet equal fraction at 120 degrees") {
  auto cfg = singlet_config({Setting(Label::a, 0), Setting(Label::b, 120)}, 1'000'000);
  cfg.left_settings = std::vector{Label::a};
  cfg.right_settings = std::vector{Label::b};
  const auto t = pair_and_tally(cfg);
  const double n = static_cast<double>(t.total({Label::a, Label::b}));
  REQUIRE(n == 1e6);
  const double sigma = std::sqrt(0.75 * 0.25 / n);
  CHECK(std::abs(equal_fraction(t, Label::a, Label::b) - 0.75) < 3 * sigma);
}

TEST_CASE("singlet outcome frequencies over a grid of angle differences") {
  const std::array<double, 8> thetas{0, 22.5, 45, 60, 90, 120, 157.5, 180};
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    auto cfg = singlet_config({Setting(Label::a, 10), Setting(Label::b, 10 + thetas[i])}, 1'000'000, 100 + i);
    cfg.left_settings = std::vector{Label::a};
    cfg.right_settings = std::vector{Label::b};
    cfg.convention = i % 2 == 0 ? Convention::anti : Convention::equal;
    const auto t = pair_and_tally(cfg);
    const auto c = t.cell({Label::a, Label::b});
    const double n = static_cast<double>(c.total());
    const double p = equal_probability_oracle(thetas[i], cfg.convention);
    // Each of the four cells, against p/2 and (1-p)/2.
    const std::array<double, 4> expected{p / 2, (1 - p) / 2, (1 - p) / 2, p / 2};
    const std::array<double, 4> seen{double(c.pp), double(c.pm), double(c.mp), double(c.mm)};
    for (int k = 0; k < 4; ++k) {
      const double sigma = std::sqrt(std::max(expected[k] * (1 - expected[k]), 1e-12) / n);
      INFO("theta " << thetas[i] << " cell " << k);
      CHECK(std::abs(seen[k] / n - expected[k]) <= 4 * sigma + 1e-12);
    }
  }
}

TEST_CASE("singlet helper matches the oracle") {
  for (double theta = 0; theta < 360; theta += 7.5) {
    CHECK(singlet_equal_probability(theta) == Catch::Approx(equal_probability_oracle(theta, Convention::anti)).margin(1e-12));
  }
}

TEST_CASE("generators are deterministic in the seed") {
  auto cfg = singlet_config(test::angles({0, 45, 90}), 5000, 9);
  const auto a = generate(cfg);
  const auto b = generate(cfg);
  CHECK(a.left == b.left);
  CHECK(a.right == b.right);
  cfg.seed = 10;
  const auto c = generate(cfg);
  CHECK_FALSE((a.left == c.left && a.right == c.right));
}

TEST_CASE("wrong kind is rejected") {
  auto cfg = singlet_config(test::angles({0, 45}), 10);
  CHECK(thrown_kind([&] { generate_local_delay(cfg); }) == ErrorKind::ConfigMismatch);
  CHECK(thrown_kind([&] { generate_wigner_domain(cfg); }) == ErrorKind::ConfigMismatch);
  cfg.jitter_ns = 50;
  CHECK(thrown_kind([&] { generate_singlet(cfg); }) == ErrorKind::ConfigParse);
}

TEST_CASE("wigner-domain degenerate and identified distributions") {
  SourceConfig cfg;
  cfg.kind = SourceKind::wigner_domain;
  cfg.settings = SettingSet(test::angles({0, 60, 120}));
  cfg.total_pairs = 2000;
  cfg.convention = Convention::equal;
  cfg.domain_weights = WignerDomainDistribution::point_mass(Domain::parse("+++;+++"));
  const auto out = generate(cfg);
  for (const auto& e : out.left.events()) CHECK(e.outcome == Outcome::plus);
  for (const auto& e : out.right.events()) CHECK(e.outcome == Outcome::plus);

  cfg.domain_weights = WignerDomainDistribution::identified_uniform();
  const auto t = pair_and_tally(cfg);
  for (Label l : {Label::a, Label::b, Label::c}) {
    REQUIRE(t.total({l, l}) > 0);
    CHECK(equal_fraction(t, l, l) == 1.0);
  }
}

TEST_CASE("wigner-domain tables converge to the exact marginals") {
  Rng rng(77);
  const std::vector<SettingPair> measured{{Label::a, Label::b}, {Label::a, Label::c}, {Label::c, Label::b}};
  for (int trial = 0; trial < 6; ++trial) {
    SourceConfig cfg;
    cfg.kind = SourceKind::wigner_domain;
    cfg.settings = SettingSet(test::angles({0, 60, 120}));
    cfg.left_settings = std::vector{Label::a, Label::c};
    cfg.right_settings = std::vector{Label::b, Label::c};
    cfg.pairs_per_combination = 100'000;
    cfg.convention = trial % 2 ? Convention::anti : Convention::equal;
    cfg.seed = 500 + trial;
    const auto d = trial == 0 ? WignerDomainDistribution::uniform() : test::random_distribution(rng, 3, trial % 3 == 0);
    cfg.domain_weights = d;
    const auto t = pair_and_tally(cfg);
    const auto exact = marginalize(d, measured, false, cfg.convention);
    const double tol = trial == 0 ? 3.0 : 4.0;
    for (const auto& pair : measured) {
      const auto c = t.cell(pair);
      REQUIRE(c.total() == 100'000);
      const std::array<double, 4> seen{double(c.pp), double(c.pm), double(c.mp), double(c.mm)};
      for (std::size_t k = 0; k < 4; ++k) {
        const double p = to_double(exact.at(pair)[k]);
        if (trial == 0) CHECK(p == 0.25);
        const double sigma = std::sqrt(p * (1 - p) / 1e5);
        INFO("trial " << trial << " pair " << to_string(pair) << " cell " << k);
        CHECK(std::abs(seen[k] / 1e5 - p) <= tol * sigma + 1e-12);
      }
    }
  }
}

TEST_CASE("local-delay T stream ignores everything on the L side") {
  SourceConfig cfg;
  cfg.kind = SourceKind::local_delay;
  cfg.settings = SettingSet(test::angles({0, 45, 90, 135}));
  cfg.left_settings = std::vector{Label::a, Label::c};
  cfg.right_settings = std::vector{Label::b, Label::d};
  cfg.total_pairs = 20000;
  cfg.emission_period_ns = 10000;
  cfg.jitter_ns = 2;
  cfg.delay = DelayModel{1000, 4.0};
  cfg.seed = 3;
  const auto base = generate(cfg);

  auto scrambled = cfg;
  scrambled.settings = SettingSet({Setting(Label::a, 0), Setting(Label::b, 300), Setting(Label::c, 90),
                                   Setting(Label::d, 17)});
  scrambled.right_settings = std::vector{Label::d, Label::b, Label::a};
  const auto other = generate(scrambled);
  CHECK(other.left == base.left);
  CHECK_FALSE(other.right == base.right);
}

TEST_CASE("local-delay without delays obeys the CHSH bound") {
  SourceConfig cfg;
  cfg.kind = SourceKind::local_delay;
  cfg.settings = SettingSet(test::angles({0, 45, 90, 135}));
  cfg.left_settings = std::vector{Label::a, Label::c};
  cfg.right_settings = std::vector{Label::b, Label::d};
  cfg.total_pairs = 1'000'000;
  cfg.emission_period_ns = 100;
  cfg.jitter_ns = 0;
  cfg.delay = DelayModel{0, 4.0};
  cfg.seed = 8;
  const auto t = pair_and_tally(cfg);
  CHECK(t.total_pairs() == 1'000'000);
  const auto r = chsh(t, {Label::a, Label::b, Label::c, Label::d});
  CHECK(std::abs(r.statistic) <= 2 + 3 * r.standard_error);
}

TEST_CASE("local-delay station function") {
  const DelayModel model{1000, 2.0};
  const Setting s(Label::a, 90);
  // lambda 0: |sin 90| = 1 -> full delay; cos 90 = 0 counts as +.
  const auto e = local_delay_station(Island::T, s, 0.0, 5000, 1, model, Convention::anti);
  CHECK(e.time_ns == 6001);
  CHECK(e.outcome == Outcome::plus);
  const auto l = local_delay_station(Island::L, Setting(Label::b, 0), 0.0, 5000, 0, model, Convention::anti);
  CHECK(l.time_ns == 5000);
  CHECK(l.outcome == Outcome::minus);
}

TEST_CASE("generated streams are valid for random configs") {
  Rng rng(2718);
  for (int trial = 0; trial < 60; ++trial) {
    SourceConfig cfg;
    cfg.kind = static_cast<SourceKind>(rng.below(3));
    const int n = static_cast<int>(rng.between(1, 4));
    std::vector<Setting> settings;
    for (int i = 0; i < n; ++i) settings.emplace_back(label_from_index(i), static_cast<double>(rng.below(360)));
    cfg.settings = SettingSet(settings);
    if (rng.bernoulli(0.5)) {
      cfg.total_pairs = rng.between(1, 3000);
    } else {
      cfg.pairs_per_combination = rng.between(1, 200);
    }
    cfg.emission_period_ns = rng.between(1, 500);
    cfg.jitter_ns = rng.between(0, (cfg.emission_period_ns - 1) / 2);
    cfg.convention = rng.bernoulli(0.5) ? Convention::anti : Convention::equal;
    cfg.seed = rng.next_u64();
    if (cfg.kind == SourceKind::local_delay) cfg.delay = DelayModel{rng.between(0, 3000), rng.uniform01() * 6};
    if (cfg.kind == SourceKind::wigner_domain) cfg.domain_weights = test::random_distribution(rng, std::max(n, 1), false);
    const auto out = generate(cfg);
    REQUIRE(out.left.size() == cfg.emission_count());
    REQUIRE(out.right.size() == cfg.emission_count());
    for (const auto* s : {&out.left, &out.right}) {
      for (std::size_t i = 1; i < s->size(); ++i) REQUIRE((*s)[i - 1].time_ns < (*s)[i].time_ns);
    }
    CHECK(*out.left.island() == Island::T);
    CHECK(*out.right.island() == Island::L);
  }
}
