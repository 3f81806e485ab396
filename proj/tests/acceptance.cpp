// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "eprb/eprb.hpp"
#include "eprb/io.hpp"

using namespace eprb;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = EPRB_SOURCE_DIR;

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict r{false, ""};
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > budget_s) {
    r.pass = false;
    r.detail += " [over time budget]";
  }
  if (!r.pass) ++failures;
  std::ostringstream t;
  t.precision(2);
  t << std::fixed << secs;
  std::cout << (r.pass ? "PASS" : "FAIL") << " " << id << " " << name << ": " << r.detail << " (" << t.str() << " s of "
            << budget_s << ")" << std::endl;
}

std::string fmt(double v, int digits = 5) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

SourceConfig source(SourceKind kind, std::vector<Setting> settings, std::vector<Label> left, std::vector<Label> right,
                    std::uint64_t per_combination, std::uint64_t seed) {
  SourceConfig cfg;
  cfg.kind = kind;
  cfg.settings = SettingSet(std::move(settings));
  cfg.left_settings = std::move(left);
  cfg.right_settings = std::move(right);
  cfg.pairs_per_combination = per_combination;
  cfg.emission_period_ns = 100;
  cfg.jitter_ns = 3;
  cfg.seed = seed;
  return cfg;
}

TallyTable run(const SourceConfig& cfg) {
  const auto out = generate(cfg);
  return tally(match_pairs(out.left, out.right, {cfg.jitter_ns}));
}

ProbabilityTable agreeing(const Rational& q) { return {q / 2, (1 - q) / 2, (1 - q) / 2, q / 2}; }

Rational random_weight(Rng& rng) { return Rational(BigInt(rng.between(0, 9))); }

WignerDomainDistribution random_identified(Rng& rng) {
  std::vector<Rational> w(64, Rational(0));
  Rational sum = 0;
  for (std::uint32_t bits = 0; bits < 8; ++bits) {
    const auto x = random_weight(rng);
    w[Domain::identified_from_bits(3, bits).index()] = x;
    sum += x;
  }
  if (sum == 0) {
    w[0] = 1;
    sum = 1;
  }
  for (auto& x : w) x /= sum;
  return {3, std::move(w)};
}

struct GoldenRow {
  std::int64_t window;
  std::uint64_t pairs;
  double s;
  double se;
};

std::vector<GoldenRow> read_golden_sweep(const fs::path& path) {
  std::vector<GoldenRow> rows;
  const auto text = io::read_file(path);
  bool header = true;
  for (auto line : io::split_lines(text)) {
    if (header || io::blank(line)) {
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    f.push_back(cur);
    rows.push_back({std::stoll(f[0]), std::stoull(f[1]), std::stod(f[2]), std::stod(f[3])});
  }
  return rows;
}

}  // namespace

int main() {
  std::cout << "acceptance: " << io::kToolVersion << std::endl;

  criterion(1, "single-pair classes for M = 3", 1.0, [] {
    const auto classes = enumerate_eu_classes(3);
    const auto j = io::to_json(count_triple_classes(3, ConstraintModel::independent), classes);
    const auto expected = io::json::array({"3/0", "2/1", "1/2", "0/3"});
    return Verdict{j["eu_classes"] == expected && j["eu_class_count"] == 4, "eu_classes = " + j["eu_classes"].dump()};
  });

  criterion(2, "(M+1)^3 by direct scan, M = 1..4", 10.0, [] {
    bool ok = true;
    std::string d;
    for (int M = 1; M <= 4; ++M) {
      const auto r = count_triple_classes(M, ConstraintModel::independent);
      const auto want = static_cast<std::uint64_t>((M + 1) * (M + 1) * (M + 1));
      ok = ok && r.direct_scan_count && *r.direct_scan_count == want && r.enumerated_count == want;
      d += "M=" + std::to_string(M) + ":" + std::to_string(r.direct_scan_count.value_or(0)) + " ";
    }
    return Verdict{ok, d};
  });

  criterion(3, "enumeration strategies agree, M = 1..6, all models", 30.0, [] {
    bool ok = true;
    std::string d;
    for (auto model : {ConstraintModel::independent, ConstraintModel::shared, ConstraintModel::shared_identified}) {
      d += to_string(model) + "[";
      for (int M = 1; M <= 6; ++M) {
        const auto r = count_triple_classes(M, model);
        ok = ok && r.direct_scan_count && *r.direct_scan_count == r.multiset_count;
        d += std::to_string(r.enumerated_count) + "/" + std::to_string(r.paper_closed_form.value_or(0));
        if (M < 6) d += " ";
      }
      d += "] ";
    }
    return Verdict{ok, d + "(count/stated closed form, comparison only)"};
  });

  criterion(4, "domain counts", 1.0, [] {
    const auto a = count_domains(3);
    const auto b = count_nonlocal_domains();
    return Verdict{a == 64 && b == 262144, std::to_string(a) + ", " + std::to_string(b)};
  });

  criterion(5, "pairings", 1.0, [] {
    const auto p = enumerate_pairings();
    std::vector<std::string> flagged;
    for (const auto& x : p) {
      if (x.time_correlated) flagged.push_back(to_string(x.settings));
    }
    std::sort(flagged.begin(), flagged.end());
    const bool ok = p.size() == 9 && flagged == std::vector<std::string>{"a;c", "b;a", "c;b"};
    std::string d = std::to_string(p.size()) + " pairings, flagged";
    for (const auto& f : flagged) d += " [" + f + "]";
    return Verdict{ok, d};
  });

  criterion(6, "time topology on 1000 randomized instances", 60.0, [] {
    auto cfg = source(SourceKind::singlet, {Setting(Label::a, 0), Setting(Label::b, 60), Setting(Label::c, 120)},
                      {Label::a, Label::b, Label::c}, {Label::a, Label::b, Label::c}, 2000, 606);
    const auto out = generate(cfg);
    const auto pairs = match_pairs(out.left, out.right, {cfg.jitter_ns}).pairs;
    std::map<SettingPair, std::vector<std::size_t>> by;
    for (std::size_t i = 0; i < pairs.size(); ++i) by[pairs[i].settings()].push_back(i);
    Rng rng(6, Stream::Schedule);
    auto pick = [&](Label x, Label y) -> const PairRecord& {
      const auto& v = by.at({x, y});
      return pairs[v[rng.below(v.size())]];
    };
    int genuine_ok = 0, regroup_flagged = 0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
      const BellTriple triple(pick(Label::a, Label::b), pick(Label::a, Label::c), pick(Label::b, Label::c), 1, 2, 3, 1);
      if (validate_time_topology(six_tuple_of(triple)).empty()) ++genuine_ok;
      const auto regrouped =
          regroup_by_settings(pick(Label::a, Label::c), pick(Label::b, Label::a), pick(Label::c, Label::b), i % 2 == 1);
      if (!validate_time_topology(regrouped).empty()) ++regroup_flagged;
    }
    return Verdict{genuine_ok == n && regroup_flagged == n,
                    "genuine ok " + std::to_string(genuine_ok) + "/" + std::to_string(n) + ", regroupings flagged " +
                        std::to_string(regroup_flagged) + "/" + std::to_string(n)};
  });

  criterion(7, "Wigner bound violated by the singlet", 60.0, [] {
    // a = 0, c = 60, b = 120
    const auto t = run(source(SourceKind::singlet, {Setting(Label::a, 0), Setting(Label::b, 120), Setting(Label::c, 60)},
                              {Label::a, Label::c}, {Label::b, Label::c}, 1'000'000, 7));
    const auto r = bell_wigner(t, {Label::a, Label::b, Label::c}, Convention::anti);
    const bool sampled = std::abs(r.statistic - 0.125) <= 3 * r.standard_error;

    const SettingPair ab{Label::a, Label::b}, ac{Label::a, Label::c}, cb{Label::c, Label::b};
    const PairwiseTables exact(3, {{ab, agreeing(Rational(3, 4))}, {ac, agreeing(Rational(1, 4))}, {cb, agreeing(Rational(1, 4))}});
    const auto residual = wigner_residual(exact, {Label::a, Label::b, Label::c}, Convention::anti);
    const auto with_id = joint_feasibility(exact, true, Convention::anti);
    const auto without = joint_feasibility(exact, false, Convention::anti);
    const bool cert = with_id.status == FeasibilityStatus::infeasible && with_id.certificate &&
                      lp::verify_farkas(detail::build_system(exact, true, Convention::anti).A,
                                        detail::build_system(exact, true, Convention::anti).b, with_id.certificate->y);
    const bool ok = sampled && residual == Rational(1, 8) && cert && without.status == FeasibilityStatus::feasible;
    return Verdict{ok, "sampled residual " + fmt(r.statistic) + " +- " + fmt(r.standard_error, 3) + " (N=" +
                            std::to_string(t.total(ab)) + "/pair), exact " + to_fraction_string(residual) +
                            ", identified " + (cert ? "infeasible, certificate verified" : "NOT certified") +
                            ", unidentified " +
                            (without.status == FeasibilityStatus::feasible ? "feasible" : "infeasible")};
  });

  criterion(8, "identified domain distributions never violate", 300.0, [] {
    Rng rng(8);
    int sampled_ok = 0, exact_ok = 0;
    double worst = -1e9;
    const std::vector<SettingPair> measured{{Label::a, Label::b}, {Label::a, Label::c}, {Label::c, Label::b}};
    for (int i = 0; i < 100; ++i) {
      const auto d = random_identified(rng);
      const auto conv = i % 2 ? Convention::anti : Convention::equal;
      auto cfg = source(SourceKind::wigner_domain, {Setting(Label::a, 0), Setting(Label::b, 120), Setting(Label::c, 60)},
                        {Label::a, Label::c}, {Label::b, Label::c}, 100'000, 800 + i);
      cfg.domain_weights = d;
      cfg.convention = conv;
      const auto r = bell_wigner(run(cfg), {Label::a, Label::b, Label::c}, conv);
      worst = std::max(worst, r.standard_error > 0 ? r.statistic / r.standard_error : (r.statistic > 0 ? 1e9 : 0));
      if (r.statistic <= 4 * r.standard_error) ++sampled_ok;
      if (wigner_residual(marginalize(d, measured, true, conv), {Label::a, Label::b, Label::c}, conv) <= 0) ++exact_ok;
    }
    return Verdict{sampled_ok == 100 && exact_ok == 100,
                    "sampled within 4 sigma " + std::to_string(sampled_ok) + "/100 (max z " + fmt(worst, 3) +
                        "), exact residual <= 0 " + std::to_string(exact_ok) + "/100"};
  });

  criterion(9, "CHSH: singlet near 2 sqrt 2, local-delay bounded at max window", 120.0, [] {
    const auto t = run(source(SourceKind::singlet,
                              {Setting(Label::a, 0), Setting(Label::b, 45), Setting(Label::c, 90), Setting(Label::d, 135)},
                              {Label::a, Label::c}, {Label::b, Label::d}, 1'000'000, 9));
    const auto q = chsh(t, {Label::a, Label::b, Label::c, Label::d});
    const bool quantum = std::abs(std::abs(q.statistic) - 2 * std::numbers::sqrt2) <= 3 * q.standard_error;

    const auto cfg = io::parse_source_config(io::read_file(kRoot / "configs" / "local_delay_chsh.json"));
    const auto out = generate(cfg);
    const std::int64_t max_window = cfg.delay->max_delay_ns + 2 * cfg.jitter_ns;
    const auto match = match_pairs(out.left, out.right, {max_window});
    const auto l = chsh(tally(match), {Label::a, Label::b, Label::c, Label::d});
    const bool local = std::abs(l.statistic) <= 2 + 3 * l.standard_error;
    return Verdict{quantum && local, "singlet S " + fmt(q.statistic) + " +- " + fmt(q.standard_error, 3) +
                                          "; local-delay W=" + std::to_string(max_window) + " S " + fmt(l.statistic) +
                                          " +- " + fmt(l.standard_error, 3) + " (" + std::to_string(match.pairs.size()) +
                                          " pairs)"};
  });

  criterion(10, "window dependence of the shipped local-delay config", 120.0, [] {
    const auto cfg = io::parse_source_config(io::read_file(kRoot / "configs" / "local_delay_chsh.json"));
    const auto golden = read_golden_sweep(kRoot / "tests" / "golden" / "local_delay_sweep.csv");
    std::vector<std::int64_t> windows;
    for (const auto& g : golden) windows.push_back(g.window);
    const auto out = generate(cfg);
    const auto rows = sweep_window(out.left, out.right, windows,
                                   {InequalityKind::chsh, {Label::a, Label::b, Label::c, Label::d}, Convention::anti});
    bool monotone = true, near_golden = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].pairs < rows[i - 1].pairs) monotone = false;
      if (!rows[i].statistic) {
        near_golden = false;
        continue;
      }
      // Statistical tolerance: 3 combined standard errors, pair counts within 1%.
      const double tol = 3 * std::hypot(*rows[i].standard_error, golden[i].se);
      if (std::abs(*rows[i].statistic - golden[i].s) > tol) near_golden = false;
      if (std::abs(double(rows[i].pairs) - double(golden[i].pairs)) > 0.01 * double(golden[i].pairs)) near_golden = false;
    }
    const auto& first = rows.front();
    const auto& last = rows.back();
    const bool small_violates = first.statistic && std::abs(*first.statistic) > 2;
    const bool large_bounded = last.statistic && std::abs(*last.statistic) <= 2 + 3 * *last.standard_error;
    std::string curve;
    for (const auto& r : rows) curve += std::to_string(r.window_ns) + ":" + fmt(r.statistic.value_or(0), 4) + " ";
    return Verdict{monotone && near_golden && small_violates && large_bounded,
                    "S(W) " + curve + (monotone ? "pairs monotone" : "pairs NOT monotone") +
                        (near_golden ? ", matches golden" : ", differs from golden")};
  });

  criterion(11, "re-pairing halves the equal fraction", 60.0, [] {
    auto cfg = source(SourceKind::wigner_domain, {Setting(Label::a, 0)}, {Label::a}, {Label::a}, 100'000, 11);
    cfg.domain_weights = WignerDomainDistribution::identified_uniform(1);
    cfg.convention = Convention::equal;
    const auto out = generate(cfg);
    const auto pairs = match_pairs(out.left, out.right, {cfg.jitter_ns}).pairs;
    const double before = equal_fraction(tally(pairs), Label::a, Label::a);
    const auto after_t = repair_across_trials(pairs, 11);
    const double after = equal_fraction(after_t, Label::a, Label::a);
    const double n = static_cast<double>(pairs.size());
    const double sigma = std::sqrt(0.25 / n);
    return Verdict{before == 1.0 && std::abs(after - 0.5) <= 4 * sigma && pairs.size() == 100'000,
                    "equal fraction " + fmt(before) + " -> " + fmt(after) + " (4 sigma = " + fmt(4 * sigma, 3) + ")"};
  });

  criterion(12, "every stage is byte-identical on re-run", 120.0, [] {
    const auto cfg_text = io::read_file(kRoot / "configs" / "singlet_bell.json");
    auto stages = [&] {
      std::vector<std::string> digests;
      auto cfg = io::parse_source_config(cfg_text);
      cfg.seed = 42;
      const auto out = generate(cfg);
      digests.push_back(io::sha256_hex(io::events_to_jsonl(out.left)));
      digests.push_back(io::sha256_hex(io::events_to_jsonl(out.right)));
      const auto left = io::events_from_jsonl(io::events_to_jsonl(out.left));
      const auto right = io::events_from_jsonl(io::events_to_jsonl(out.right));
      const auto match = match_pairs(left, right, {20});
      digests.push_back(io::sha256_hex(io::pairs_to_jsonl(match.pairs)));
      const auto t = tally(io::pairs_from_jsonl(io::pairs_to_jsonl(match.pairs)), match.unmatched_left, match.unmatched_right);
      digests.push_back(io::sha256_hex(io::to_json(t).dump(2)));
      digests.push_back(io::sha256_hex(
          io::to_json(bell_wigner(t, {Label::a, Label::b, Label::c}, Convention::anti)).dump(2)));
      const std::vector<std::int64_t> windows{0, 5, 20, 100};
      digests.push_back(io::sha256_hex(sweep_to_csv(sweep_window(
          left, right, windows, {InequalityKind::bell_wigner, {Label::a, Label::b, Label::c}, Convention::anti}))));
      digests.push_back(io::sha256_hex(io::to_json(count_triple_classes(4, ConstraintModel::shared), enumerate_eu_classes(4)).dump(2)));
      const auto tables = PairwiseTables::from_tally(t, 0, {{Label::a, Label::b}, {Label::a, Label::c}, {Label::c, Label::b}});
      digests.push_back(io::sha256_hex(io::to_json(joint_feasibility(tables, true, Convention::anti)).dump(2)));
      digests.push_back(io::sha256_hex(io::to_json(repair_across_trials(match.pairs, 42)).dump(2)));
      digests.push_back(io::sha256_hex(io::events_to_jsonl(io::ingest_raw("10 a 1\n20 b -1\n", Island::T))));
      return digests;
    };
    const auto first = stages();
    const auto second = stages();
    const auto golden = io::json::parse(io::read_file(kRoot / "tests" / "golden" / "simulate_singlet_seed42.json"));
    const bool golden_ok = golden["outputs"]["T"] == first[0] && golden["outputs"]["L"] == first[1] &&
                           golden["config_digest"] == io::sha256_hex(cfg_text);
    return Verdict{first == second && golden_ok, std::to_string(first.size()) + " stage digests " +
                                                      (first == second ? "identical" : "DIFFER") +
                                                      (golden_ok ? ", simulate matches golden manifest"
                                                                 : ", simulate differs from golden manifest")};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
