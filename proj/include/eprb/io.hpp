#pragma once

// File formats: JSON Lines event and pair files, tally / probability tables,
// source configs, report JSON, digests, manifests and raw time-tag ingestion.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eprb/combinatorics.hpp"
#include "eprb/core.hpp"
#include "eprb/error.hpp"
#include "eprb/feasibility.hpp"
#include "eprb/pairing.hpp"
#include "eprb/sources.hpp"
#include "eprb/statistics.hpp"
#include "json.hpp"

namespace eprb::io {

using nlohmann::json;

inline constexpr const char* kToolVersion = "eprb-lab 1.0.0";

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes via a temporary file and rename so readers never see partial output.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorKind::IoError, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::IoError, "cannot rename onto '" + path.string() + "': " + ec.message());
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::Internal, "SHA-256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

inline std::string file_digest(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

/// Splits into lines, tolerating a trailing newline and CRLF.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

inline bool blank(std::string_view line) { return line.find_first_not_of(" \t") == std::string_view::npos; }

// ---------------------------------------------------------------------------
// Event streams

inline std::string to_json_line(const DetectionEvent& e) {
  std::string s = "{\"island\":\"";
  s += to_char(e.island);
  s += "\",\"t_ns\":";
  s += std::to_string(e.time_ns);
  s += ",\"setting\":\"";
  s += to_char(e.setting);
  s += "\",\"outcome\":";
  s += e.outcome == Outcome::plus ? "1" : "-1";
  s += "}\n";
  return s;
}

inline std::string events_to_jsonl(const EventStream& stream) {
  std::string out;
  out.reserve(stream.size() * 56);
  for (const auto& e : stream.events()) out += to_json_line(e);
  return out;
}

namespace detail {

inline json parse_line(std::string_view line, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::FormatError, "line " + std::to_string(line_no) + ": " + e.what());
  }
}

inline void require_keys(const json& j, std::initializer_list<const char*> keys, std::size_t line_no) {
  if (!j.is_object() || j.size() != keys.size()) {
    fail(ErrorKind::FormatError, "line " + std::to_string(line_no) + ": expected an object with exactly " +
                                     std::to_string(keys.size()) + " keys");
  }
  for (const char* k : keys) {
    if (!j.contains(k)) fail(ErrorKind::FormatError, "line " + std::to_string(line_no) + ": missing key '" + k + "'");
  }
}

inline std::int64_t integer_field(const json& j, const char* key, std::size_t line_no) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) {
    fail(ErrorKind::FormatError, "line " + std::to_string(line_no) + ": '" + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

inline std::string string_field(const json& j, const char* key, std::size_t line_no) {
  const auto& v = j.at(key);
  if (!v.is_string()) fail(ErrorKind::FormatError, "line " + std::to_string(line_no) + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

/// Runs f, re-raising library errors as FormatError prefixed with `where`.
template <typename F>
auto with_context(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::FormatError) throw;
    fail(ErrorKind::FormatError, where + ": " + e.what());
  }
}

template <typename F>
auto with_line(std::size_t line_no, F&& f) {
  return with_context("line " + std::to_string(line_no), std::forward<F>(f));
}

inline EventStream validated(const std::vector<RawEvent>& raw, const std::vector<std::size_t>& line_of) {
  auto v = validate_stream(raw);
  if (!v.ok()) {
    std::string msg;
    for (const auto& bad : v.violations) {
      if (!msg.empty()) msg += "; ";
      msg += std::string(to_string(bad.kind)) + " at line " + std::to_string(line_of[bad.index]);
    }
    fail(ErrorKind::FormatError, msg);
  }
  return std::move(*v.stream);
}

}  // namespace detail

inline EventStream events_from_jsonl(std::string_view text) {
  std::vector<RawEvent> raw;
  std::vector<std::size_t> line_of;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const std::size_t line_no = i + 1;
    const json j = detail::parse_line(lines[i], line_no);
    detail::require_keys(j, {"island", "t_ns", "setting", "outcome"}, line_no);
    raw.push_back(detail::with_line(line_no, [&] {
      return RawEvent{parse_island(detail::string_field(j, "island", line_no)), detail::integer_field(j, "t_ns", line_no),
                      parse_label(detail::string_field(j, "setting", line_no)), detail::integer_field(j, "outcome", line_no)};
    }));
    line_of.push_back(line_no);
  }
  return detail::validated(raw, line_of);
}

/// Ingests a whitespace-separated "t_ns setting outcome" file for one island.
/// Blank lines and lines starting with '#' are skipped.
inline EventStream ingest_raw(std::string_view text, Island island) {
  std::vector<RawEvent> raw;
  std::vector<std::size_t> line_of;
  const auto lines = split_lines(text);
  std::int64_t last = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (blank(line) || line.find_first_not_of(" \t") == line.find('#')) continue;
    const std::size_t line_no = i + 1;
    std::istringstream in{std::string(line)};
    std::string t, setting, outcome, extra;
    if (!(in >> t >> setting >> outcome) || (in >> extra)) {
      fail(ErrorKind::FormatError, "line " + std::to_string(line_no) + ": expected 't_ns setting outcome'");
    }
    RawEvent ev = detail::with_line(line_no, [&] {
      std::size_t used = 0;
      long long tv = 0, ov = 0;
      try {
        tv = std::stoll(t, &used);
        if (used != t.size()) throw std::invalid_argument("t");
        ov = std::stoll(outcome, &used);
        if (used != outcome.size()) throw std::invalid_argument("outcome");
      } catch (const std::logic_error&) {
        fail(ErrorKind::FormatError, "line " + std::to_string(line_no) + ": non-integer field");
      }
      return RawEvent{island, tv, parse_label(setting), ov};
    });
    if (!raw.empty() && ev.time_ns <= last) {
      fail(ErrorKind::FormatError, "line " + std::to_string(line_no) + ": timestamp " + std::to_string(ev.time_ns) +
                                       " does not increase (previous " + std::to_string(last) + ")");
    }
    last = ev.time_ns;
    raw.push_back(ev);
    line_of.push_back(line_no);
  }
  return detail::validated(raw, line_of);
}

// ---------------------------------------------------------------------------
// Pairs

inline std::string pairs_to_jsonl(std::span<const PairRecord> pairs) {
  std::string out;
  out.reserve(pairs.size() * 150);
  for (const auto& p : pairs) {
    out += "{\"t_left_ns\":" + std::to_string(p.left().time_ns) + ",\"t_right_ns\":" + std::to_string(p.right().time_ns) +
           ",\"setting_left\":\"" + to_char(p.left().setting) + "\",\"setting_right\":\"" + to_char(p.right().setting) +
           "\",\"outcome_left\":" + std::to_string(value(p.left().outcome)) +
           ",\"outcome_right\":" + std::to_string(value(p.right().outcome)) +
           ",\"window_ns\":" + std::to_string(p.window_ns()) + "}\n";
  }
  return out;
}

inline std::vector<PairRecord> pairs_from_jsonl(std::string_view text) {
  std::vector<PairRecord> pairs;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const std::size_t n = i + 1;
    const json j = detail::parse_line(lines[i], n);
    detail::require_keys(
        j, {"t_left_ns", "t_right_ns", "setting_left", "setting_right", "outcome_left", "outcome_right", "window_ns"}, n);
    pairs.push_back(detail::with_line(n, [&] {
      const DetectionEvent left{Island::T, detail::integer_field(j, "t_left_ns", n),
                                parse_label(detail::string_field(j, "setting_left", n)),
                                outcome_from_int(detail::integer_field(j, "outcome_left", n))};
      const DetectionEvent right{Island::L, detail::integer_field(j, "t_right_ns", n),
                                 parse_label(detail::string_field(j, "setting_right", n)),
                                 outcome_from_int(detail::integer_field(j, "outcome_right", n))};
      return PairRecord(left, right, detail::integer_field(j, "window_ns", n));
    }));
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Tallies and probability tables

inline json to_json(const TallyTable& t) {
  json j = json::object();
  for (const auto& [pair, c] : t.counts()) j[to_string(pair)] = {{"pp", c.pp}, {"pm", c.pm}, {"mp", c.mp}, {"mm", c.mm}};
  j["unmatched_left"] = t.unmatched_left();
  j["unmatched_right"] = t.unmatched_right();
  return j;
}

inline bool is_pair_key(const std::string& key) { return key.find(';') != std::string::npos; }

inline TallyTable tally_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::FormatError, "tally must be a JSON object");
  std::map<SettingPair, CellCounts> counts;
  std::uint64_t ul = 0, ur = 0;
  for (const auto& [key, v] : j.items()) {
    if (key == "unmatched_left" || key == "unmatched_right") {
      if (!v.is_number_unsigned()) fail(ErrorKind::FormatError, "'" + key + "' must be a nonnegative integer");
      (key == "unmatched_left" ? ul : ur) = v.get<std::uint64_t>();
      continue;
    }
    if (!is_pair_key(key)) fail(ErrorKind::FormatError, "unexpected tally key '" + key + "'");
    const SettingPair pair = detail::with_context("key '" + key + "'", [&] { return parse_setting_pair(key); });
    if (!v.is_object() || v.size() != 4) fail(ErrorKind::FormatError, "tally entry '" + key + "' needs pp, pm, mp, mm");
    CellCounts c;
    for (auto [name, slot] : {std::pair{"pp", &c.pp}, {"pm", &c.pm}, {"mp", &c.mp}, {"mm", &c.mm}}) {
      if (!v.contains(name) || !v.at(name).is_number_unsigned()) {
        fail(ErrorKind::FormatError, "tally entry '" + key + "' needs a nonnegative integer '" + name + "'");
      }
      *slot = v.at(name).get<std::uint64_t>();
    }
    counts[pair] = c;
  }
  return TallyTable(std::move(counts), ul, ur);
}

inline std::string rational_json_string(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  fail(ErrorKind::FormatError, where + " must be a fraction string \"p/q\" or an integer");
}

/// Either a tally object (normalised to exact frequencies) or
/// {"settings_per_side": n, "probabilities": {"x;y": {"pp": "p/q", ...}}}.
inline PairwiseTables tables_from_json(const json& j, const std::vector<SettingPair>& only = {}) {
  if (!j.is_object()) fail(ErrorKind::FormatError, "tables must be a JSON object");
  if (!j.contains("probabilities")) return PairwiseTables::from_tally(tally_from_json(j), 0, only);
  std::map<SettingPair, ProbabilityTable> tables;
  int n = 0;
  for (const auto& [key, v] : j.at("probabilities").items()) {
    const SettingPair pair = detail::with_context("key '" + key + "'", [&] { return parse_setting_pair(key); });
    if (!only.empty() && std::find(only.begin(), only.end(), pair) == only.end()) continue;
    ProbabilityTable t;
    for (std::size_t c = 0; c < 4; ++c) {
      if (!v.contains(kCellNames[c])) fail(ErrorKind::FormatError, "table '" + key + "' missing '" + kCellNames[c] + "'");
      const auto text = rational_json_string(v.at(kCellNames[c]), "table '" + key + "'");
      t[c] = detail::with_context("table '" + key + "'", [&] { return parse_rational(text); });
    }
    tables[pair] = t;
    n = std::max({n, index_of(pair.left) + 1, index_of(pair.right) + 1});
  }
  if (j.contains("settings_per_side")) n = j.at("settings_per_side").get<int>();
  return detail::with_context("tables", [&] { return PairwiseTables(n, std::move(tables)); });
}

inline json to_json(const PairwiseTables& t) {
  json probs = json::object();
  for (const auto& [pair, table] : t.tables()) {
    json cell = json::object();
    for (std::size_t c = 0; c < 4; ++c) cell[kCellNames[c]] = to_fraction_string(table[c]);
    probs[to_string(pair)] = cell;
  }
  return {{"settings_per_side", t.settings_per_side()}, {"probabilities", probs}};
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const InequalityReport& r) {
  json j = {{"name", to_string(r.kind)},
            {"statistic", r.statistic},
            {"standard_error", r.standard_error},
            {"violated", r.violated}};
  if (r.lhs) j["lhs"] = *r.lhs;
  if (r.rhs) j["rhs"] = *r.rhs;
  if (r.kind == InequalityKind::chsh) j["S"] = r.statistic;
  json counts = json::object();
  for (const auto& [pair, n] : r.pair_counts) counts[to_string(pair)] = n;
  j["pair_counts"] = counts;
  return j;
}

inline json to_json(const ClassCountReport& r, const std::vector<CorrelationClass>& eu_classes) {
  json patterns = json::array();
  for (const auto& p : r.patterns) patterns.push_back(to_string(p));
  json classes = json::array();
  for (const auto& c : eu_classes) classes.push_back(c.to_string());
  json j = {{"M", r.M},
            {"model", to_string(r.model)},
            {"enumerated_count", r.enumerated_count},
            {"multiset_count", r.multiset_count},
            {"trial_patterns", patterns},
            {"eu_classes", classes},
            {"eu_class_count", eu_classes.size()}};
  j["direct_scan_count"] = r.direct_scan_count ? json(*r.direct_scan_count) : json(nullptr);
  j["paper_closed_form"] = r.paper_closed_form ? json(*r.paper_closed_form) : json(nullptr);
  j["agrees"] = r.agrees ? json(*r.agrees) : json("not-applicable");
  return j;
}

inline json to_json(const std::vector<Pairing>& pairings) {
  json out = json::array();
  for (const auto& p : pairings) out.push_back({{"pairing", to_string(p.settings)}, {"time_correlated", p.time_correlated}});
  return out;
}

inline json to_json(const FeasibilityResult& r) {
  json j = {{"status", r.status == FeasibilityStatus::feasible ? "feasible" : "infeasible"},
            {"identify_equal_settings", r.identified},
            {"convention", to_string(r.convention)},
            {"verified", true}};
  if (r.witness) {
    json w = json::object();
    for (std::uint32_t i = 0; i < r.witness->size(); ++i) {
      if (r.witness->weight(i) != 0) w[r.witness->domain(i).symbol()] = to_fraction_string(r.witness->weight(i));
    }
    j["witness"] = w;
  }
  if (r.certificate) {
    json y = json::object();
    for (std::size_t i = 0; i < r.certificate->y.size(); ++i) y[r.certificate->row_labels[i]] = to_fraction_string(r.certificate->y[i]);
    j["certificate"] = {{"y", y}, {"y_dot_b", to_fraction_string(r.certificate->y_dot_b)}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// Source configs

namespace detail {

inline std::string byte_to_line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <typename T>
T config_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::ConfigParse, std::string("field '") + key + "' has the wrong type");
  }
}

inline std::vector<Label> label_list(const json& j, const char* key) {
  if (!j.at(key).is_array()) fail(ErrorKind::ConfigParse, std::string("field '") + key + "' must be a list of labels");
  std::vector<Label> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_string()) fail(ErrorKind::ConfigParse, std::string("field '") + key + "' must be a list of labels");
    try {
      out.push_back(parse_label(v.get<std::string>()));
    } catch (const Error& e) {
      fail(ErrorKind::ConfigParse, std::string("field '") + key + "': " + e.what());
    }
  }
  return out;
}

inline WignerDomainDistribution parse_domain_weights(const json& v) {
  try {
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "uniform") return WignerDomainDistribution::uniform(3);
      if (s == "identified-uniform") return WignerDomainDistribution::identified_uniform(3);
      fail(ErrorKind::ConfigParse, "field 'domain_weights': unknown shorthand '" + s + "'");
    }
    if (!v.is_object() || v.empty()) fail(ErrorKind::ConfigParse, "field 'domain_weights' must be a nonempty object");
    int n = 0;
    std::vector<std::pair<Domain, Rational>> entries;
    for (const auto& [symbol, w] : v.items()) {
      const Domain d = Domain::parse(symbol);
      if (n != 0 && d.settings_per_side() != n) fail(ErrorKind::ConfigParse, "domain symbols must all have the same length");
      n = d.settings_per_side();
      entries.emplace_back(d, parse_rational(rational_json_string(w, "domain weight '" + symbol + "'")));
    }
    std::vector<Rational> weights(std::size_t{1} << (2 * n), Rational(0));
    for (const auto& [d, w] : entries) weights[d.index()] = w;
    return WignerDomainDistribution(n, std::move(weights));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigParse) throw;
    fail(ErrorKind::ConfigParse, std::string("field 'domain_weights': ") + e.what());
  }
}

}  // namespace detail

inline SourceConfig source_config_from_json(const json& j) {
  using detail::config_field;
  if (!j.is_object()) fail(ErrorKind::ConfigParse, "config must be a JSON object");
  static const std::set<std::string> known{"kind", "settings", "left_settings", "right_settings", "pairs_per_combination",
                                           "total_pairs", "emission_period_ns", "jitter_ns", "max_delay_ns",
                                           "delay_exponent", "domain_weights", "convention", "seed"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) fail(ErrorKind::ConfigParse, "unknown field '" + key + "'");
  }
  for (const char* key : {"kind", "settings", "emission_period_ns"}) {
    if (!j.contains(key)) fail(ErrorKind::ConfigParse, std::string("missing field '") + key + "'");
  }
  SourceConfig cfg;
  cfg.kind = parse_source_kind(config_field<std::string>(j, "kind"));
  if (!j.at("settings").is_array()) fail(ErrorKind::ConfigParse, "field 'settings' must be a list");
  std::vector<Setting> settings;
  for (std::size_t i = 0; i < j.at("settings").size(); ++i) {
    const auto& s = j.at("settings")[i];
    const std::string where = "field 'settings[" + std::to_string(i) + "]'";
    if (!s.is_object() || !s.contains("label") || !s.contains("angle_deg") || s.size() != 2) {
      fail(ErrorKind::ConfigParse, where + " needs exactly 'label' and 'angle_deg'");
    }
    try {
      settings.emplace_back(parse_label(s.at("label").get<std::string>()), s.at("angle_deg").get<double>());
    } catch (const Error& e) {
      fail(ErrorKind::ConfigParse, where + ": " + e.what());
    } catch (const json::exception&) {
      fail(ErrorKind::ConfigParse, where + " has the wrong type");
    }
  }
  try {
    cfg.settings = SettingSet(std::move(settings));
  } catch (const Error& e) {
    fail(ErrorKind::ConfigParse, std::string("field 'settings': ") + e.what());
  }
  if (j.contains("left_settings")) cfg.left_settings = detail::label_list(j, "left_settings");
  if (j.contains("right_settings")) cfg.right_settings = detail::label_list(j, "right_settings");
  if (j.contains("pairs_per_combination")) cfg.pairs_per_combination = config_field<std::uint64_t>(j, "pairs_per_combination");
  if (j.contains("total_pairs")) cfg.total_pairs = config_field<std::uint64_t>(j, "total_pairs");
  cfg.emission_period_ns = config_field<std::int64_t>(j, "emission_period_ns");
  if (j.contains("jitter_ns")) cfg.jitter_ns = config_field<std::int64_t>(j, "jitter_ns");
  if (j.contains("max_delay_ns") || j.contains("delay_exponent")) {
    if (!j.contains("max_delay_ns") || !j.contains("delay_exponent")) {
      fail(ErrorKind::ConfigParse, "max_delay_ns and delay_exponent must be given together");
    }
    cfg.delay = DelayModel{config_field<std::int64_t>(j, "max_delay_ns"), config_field<double>(j, "delay_exponent")};
  }
  if (j.contains("domain_weights")) cfg.domain_weights = detail::parse_domain_weights(j.at("domain_weights"));
  if (j.contains("convention")) {
    try {
      cfg.convention = parse_convention(config_field<std::string>(j, "convention"));
    } catch (const Error& e) {
      fail(ErrorKind::ConfigParse, std::string("field 'convention': ") + e.what());
    }
  }
  if (j.contains("seed")) cfg.seed = config_field<std::uint64_t>(j, "seed");
  cfg.validate();
  return cfg;
}

inline SourceConfig parse_source_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigParse, detail::byte_to_line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  return source_config_from_json(j);
}

// ---------------------------------------------------------------------------
// Manifests

struct FileEntry {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  json arguments = json::object();
  std::optional<std::string> config_digest;
  std::optional<std::uint64_t> seed;
  std::vector<FileEntry> inputs;
  std::vector<FileEntry> outputs;
  json extra = json::object();
  double wall_time_ms = 0.0;
};

inline FileEntry describe_file(const std::filesystem::path& path) { return {path.string(), file_digest(path)}; }

inline json to_json(const RunManifest& m) {
  auto files = [](const std::vector<FileEntry>& v) {
    json out = json::array();
    for (const auto& f : v) out.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return out;
  };
  json j = {{"command", m.command},
            {"arguments", m.arguments},
            {"inputs", files(m.inputs)},
            {"outputs", files(m.outputs)},
            {"tool_version", kToolVersion},
            {"wall_time_ms", m.wall_time_ms}};
  j["config_digest"] = m.config_digest ? json(*m.config_digest) : json(nullptr);
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  if (!m.extra.empty()) j["extra"] = m.extra;
  return j;
}

inline std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  auto p = output;
  p += ".manifest.json";
  return p;
}

}  // namespace eprb::io
