// Command-line front end: each subcommand reads files, calls one library
// operation and writes its artifact plus a manifest.
//
// Exit codes: 0 success, 2 usage or config error, 3 data-format error,
// 4 internal invariant violation.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eprb/eprb.hpp"
#include "eprb/io.hpp"

namespace fs = std::filesystem;
using eprb::io::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

int exit_code_for(eprb::ErrorKind kind) {
  using K = eprb::ErrorKind;
  switch (kind) {
    case K::ConfigParse:
    case K::ConfigMismatch:
    case K::InvalidValue:
    case K::TooLarge:
      return kExitUsage;
    case K::Internal:
      return kExitInternal;
    default:
      return kExitData;
  }
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = s.find(',', start);
    out.push_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<eprb::Label> parse_ordering(const std::string& s) {
  std::vector<eprb::Label> out;
  for (const auto& part : split_commas(s)) out.push_back(eprb::parse_label(part));
  return out;
}

std::vector<std::int64_t> parse_windows(const std::string& s) {
  std::vector<std::int64_t> out;
  for (const auto& part : split_commas(s)) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(part, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != part.size() || v < 0) {
      eprb::fail(eprb::ErrorKind::InvalidValue, "window '" + part + "' is not a nonnegative integer");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<eprb::Label> default_ordering(eprb::InequalityKind kind) {
  using eprb::Label;
  if (kind == eprb::InequalityKind::bell_wigner) return {Label::a, Label::b, Label::c};
  return {Label::a, Label::b, Label::c, Label::d};
}

class Timer {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_manifest(const fs::path& path, eprb::io::RunManifest m, const Timer& timer) {
  m.wall_time_ms = timer.elapsed_ms();
  eprb::io::atomic_write(path, eprb::io::to_json(m).dump(2) + "\n");
}

void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    eprb::io::atomic_write(out, text);
  }
}

eprb::EventStream load_events(const std::string& path) {
  return eprb::io::detail::with_context(path, [&] { return eprb::io::events_from_jsonl(eprb::io::read_file(path)); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-tagged EPRB experiment laboratory"};
  app.require_subcommand(1);

  // simulate
  std::string sim_config, sim_out;
  std::optional<std::uint64_t> sim_seed;
  auto* simulate = app.add_subcommand("simulate", "Generate the two stations' event streams from a source config");
  simulate->add_option("--config", sim_config, "Source config JSON")->required();
  simulate->add_option("--out", sim_out, "Output prefix; writes <P>.T.jsonl, <P>.L.jsonl and <P>.manifest.json")->required();
  simulate->add_option("--seed", sim_seed, "Overrides the config's seed");

  // pair
  std::string pair_left, pair_right, pair_out;
  std::int64_t pair_window = 0;
  auto* pair = app.add_subcommand("pair", "Match T and L events within a coincidence window");
  pair->add_option("--left", pair_left, "T event file")->required();
  pair->add_option("--right", pair_right, "L event file")->required();
  pair->add_option("--window-ns", pair_window, "Coincidence window W in ns")->required()->check(CLI::NonNegativeNumber);
  pair->add_option("--out", pair_out, "Pairs JSON Lines file")->required();

  // tally
  std::string tally_pairs, tally_out;
  auto* tally = app.add_subcommand("tally", "Count outcomes per setting pair");
  tally->add_option("--pairs", tally_pairs, "Pairs file")->required();
  tally->add_option("--out", tally_out, "Tally JSON")->required();

  // inequalities
  std::string ineq_tally, ineq_kind, ineq_ordering, ineq_convention = "anti", ineq_out;
  auto* inequalities = app.add_subcommand("inequalities", "Evaluate the Bell-Wigner or CHSH inequality on a tally");
  inequalities->add_option("--tally", ineq_tally, "Tally JSON")->required();
  inequalities->add_option("--kind", ineq_kind, "bell-wigner or chsh")->required();
  inequalities->add_option("--ordering", ineq_ordering, "Setting labels, e.g. a,b,c or a,b,c,d");
  inequalities->add_option("--convention", ineq_convention, "equal or anti")->capture_default_str();
  inequalities->add_option("--out", ineq_out, "Write the report here instead of stdout");

  // sweep
  std::string sweep_left, sweep_right, sweep_windows, sweep_kind, sweep_out, sweep_ordering, sweep_convention = "anti";
  auto* sweep = app.add_subcommand("sweep", "Evaluate an inequality across coincidence windows (CSV)");
  sweep->add_option("--left", sweep_left, "T event file")->required();
  sweep->add_option("--right", sweep_right, "L event file")->required();
  sweep->add_option("--windows", sweep_windows, "Ascending windows W1,W2,...")->required();
  sweep->add_option("--kind", sweep_kind, "bell-wigner or chsh")->required();
  sweep->add_option("--out", sweep_out, "CSV output")->required();
  sweep->add_option("--ordering", sweep_ordering, "Setting labels");
  sweep->add_option("--convention", sweep_convention, "equal or anti")->capture_default_str();

  // enumerate
  int enum_m = 0;
  std::string enum_model = "independent";
  auto* enumerate = app.add_subcommand("enumerate", "Count reachable correlation classes");
  enumerate->add_option("--M", enum_m, "Pairs per setting-pair string")->required();
  enumerate->add_option("--model", enum_model, "independent, shared or shared-identified")->capture_default_str();

  // pairings
  int pairings_n = 3;
  auto* pairings = app.add_subcommand("pairings", "List the setting pairings and which are time-correlated");
  pairings->add_option("--settings-per-side", pairings_n, "Settings per island")->capture_default_str();

  // feasibility
  std::string feas_tables, feas_convention = "anti", feas_pairs, feas_out;
  bool feas_identify = false;
  auto* feasibility = app.add_subcommand("feasibility", "Decide whether the tables admit a joint domain distribution");
  feasibility->add_option("--tables", feas_tables, "Tally JSON or probabilities JSON")->required();
  feasibility->add_flag("--identify-equal-settings", feas_identify, "Require tau = sigma (8 domains)");
  feasibility->add_option("--convention", feas_convention, "equal or anti")->capture_default_str();
  feasibility->add_option("--pairs", feas_pairs, "Restrict to these measured pairs, e.g. a;b,a;c,b;c");
  feasibility->add_option("--out", feas_out, "Write the result here instead of stdout");

  // ingest
  std::string ingest_raw, ingest_island, ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Convert a 't_ns setting outcome' text file into an event file");
  ingest->add_option("--raw", ingest_raw, "Whitespace-separated input")->required();
  ingest->add_option("--island", ingest_island, "T or L")->required()->check(CLI::IsMember({"T", "L"}));
  ingest->add_option("--out", ingest_out, "Event JSON Lines file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kExitUsage;
  }

  try {
    const Timer timer;
    eprb::io::RunManifest manifest;

    if (simulate->parsed()) {
      const std::string text = eprb::io::read_file(sim_config);
      auto cfg = eprb::io::parse_source_config(text);
      if (sim_seed) cfg.seed = *sim_seed;
      const auto out = eprb::generate(cfg);
      const fs::path t_path = sim_out + ".T.jsonl", l_path = sim_out + ".L.jsonl";
      eprb::io::atomic_write(t_path, eprb::io::events_to_jsonl(out.left));
      eprb::io::atomic_write(l_path, eprb::io::events_to_jsonl(out.right));
      manifest.command = "simulate";
      manifest.arguments = {{"config", sim_config}, {"out", sim_out}};
      manifest.config_digest = eprb::io::sha256_hex(text);
      manifest.seed = cfg.seed;
      manifest.inputs = {eprb::io::describe_file(sim_config)};
      manifest.outputs = {eprb::io::describe_file(t_path), eprb::io::describe_file(l_path)};
      write_manifest(sim_out + ".manifest.json", manifest, timer);
    } else if (pair->parsed()) {
      const auto left = load_events(pair_left);
      const auto right = load_events(pair_right);
      const auto match = eprb::match_pairs(left, right, {pair_window});
      eprb::io::atomic_write(pair_out, eprb::io::pairs_to_jsonl(match.pairs));
      manifest.command = "pair";
      manifest.arguments = {{"left", pair_left}, {"right", pair_right}, {"window_ns", pair_window}, {"out", pair_out}};
      manifest.inputs = {eprb::io::describe_file(pair_left), eprb::io::describe_file(pair_right)};
      manifest.outputs = {eprb::io::describe_file(pair_out)};
      manifest.extra = {{"pairs", match.pairs.size()},
                        {"unmatched_left", match.unmatched_left},
                        {"unmatched_right", match.unmatched_right}};
      write_manifest(eprb::io::manifest_path_for(pair_out), manifest, timer);
    } else if (tally->parsed()) {
      const auto pairs = eprb::io::detail::with_context(
          tally_pairs, [&] { return eprb::io::pairs_from_jsonl(eprb::io::read_file(tally_pairs)); });
      std::uint64_t ul = 0, ur = 0;
      // Unmatched counts live in the pairing manifest, when there is one.
      const auto pair_manifest = eprb::io::manifest_path_for(tally_pairs);
      if (fs::exists(pair_manifest)) {
        const json m = json::parse(eprb::io::read_file(pair_manifest), nullptr, false);
        if (m.is_object() && m.contains("extra") && m["extra"].contains("unmatched_left")) {
          ul = m["extra"]["unmatched_left"].get<std::uint64_t>();
          ur = m["extra"]["unmatched_right"].get<std::uint64_t>();
        }
      }
      const auto table = eprb::tally(pairs, ul, ur);
      eprb::io::atomic_write(tally_out, eprb::io::to_json(table).dump(2) + "\n");
      manifest.command = "tally";
      manifest.arguments = {{"pairs", tally_pairs}, {"out", tally_out}};
      manifest.inputs = {eprb::io::describe_file(tally_pairs)};
      manifest.outputs = {eprb::io::describe_file(tally_out)};
      write_manifest(eprb::io::manifest_path_for(tally_out), manifest, timer);
    } else if (inequalities->parsed()) {
      const auto table = eprb::io::detail::with_context(
          ineq_tally, [&] { return eprb::io::tally_from_json(json::parse(eprb::io::read_file(ineq_tally))); });
      eprb::InequalitySpec spec;
      spec.kind = eprb::parse_inequality_kind(ineq_kind);
      spec.ordering = ineq_ordering.empty() ? default_ordering(spec.kind) : parse_ordering(ineq_ordering);
      spec.convention = eprb::parse_convention(ineq_convention);
      json report = eprb::io::to_json(eprb::evaluate(table, spec));
      report["convention"] = eprb::to_string(spec.convention);
      emit(report, ineq_out);
    } else if (sweep->parsed()) {
      const auto left = load_events(sweep_left);
      const auto right = load_events(sweep_right);
      eprb::InequalitySpec spec;
      spec.kind = eprb::parse_inequality_kind(sweep_kind);
      spec.ordering = sweep_ordering.empty() ? default_ordering(spec.kind) : parse_ordering(sweep_ordering);
      spec.convention = eprb::parse_convention(sweep_convention);
      const auto windows = parse_windows(sweep_windows);
      const auto rows = eprb::sweep_window(left, right, windows, spec);
      eprb::io::atomic_write(sweep_out, eprb::sweep_to_csv(rows));
      manifest.command = "sweep";
      manifest.arguments = {{"left", sweep_left}, {"right", sweep_right}, {"windows", sweep_windows},
                            {"kind", sweep_kind},  {"out", sweep_out}};
      manifest.inputs = {eprb::io::describe_file(sweep_left), eprb::io::describe_file(sweep_right)};
      manifest.outputs = {eprb::io::describe_file(sweep_out)};
      write_manifest(eprb::io::manifest_path_for(sweep_out), manifest, timer);
    } else if (enumerate->parsed()) {
      const auto model = eprb::parse_constraint_model(enum_model);
      const auto report = eprb::count_triple_classes(enum_m, model);
      const auto classes = enum_m <= 23 ? eprb::enumerate_eu_classes(enum_m) : std::vector<eprb::CorrelationClass>{};
      emit(eprb::io::to_json(report, classes), "");
    } else if (pairings->parsed()) {
      emit(eprb::io::to_json(eprb::enumerate_pairings(pairings_n)), "");
    } else if (feasibility->parsed()) {
      std::vector<eprb::SettingPair> only;
      if (!feas_pairs.empty()) {
        for (const auto& p : split_commas(feas_pairs)) only.push_back(eprb::parse_setting_pair(p));
      }
      const auto tables = eprb::io::detail::with_context(
          feas_tables, [&] { return eprb::io::tables_from_json(json::parse(eprb::io::read_file(feas_tables)), only); });
      const auto result = eprb::joint_feasibility(tables, feas_identify, eprb::parse_convention(feas_convention));
      emit(eprb::io::to_json(result), feas_out);
    } else if (ingest->parsed()) {
      const auto island = eprb::parse_island(ingest_island);
      const auto stream = eprb::io::detail::with_context(
          ingest_raw, [&] { return eprb::io::ingest_raw(eprb::io::read_file(ingest_raw), island); });
      eprb::io::atomic_write(ingest_out, eprb::io::events_to_jsonl(stream));
      manifest.command = "ingest";
      manifest.arguments = {{"raw", ingest_raw}, {"island", ingest_island}, {"out", ingest_out}};
      manifest.inputs = {eprb::io::describe_file(ingest_raw)};
      manifest.outputs = {eprb::io::describe_file(ingest_out)};
      write_manifest(eprb::io::manifest_path_for(ingest_out), manifest, timer);
    }
  } catch (const eprb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "error: FormatError: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
