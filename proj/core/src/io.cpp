#include "pseg/io.hpp"

#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "pseg/errors.hpp"

namespace pseg {

using json = nlohmann::ordered_json;

const char* version() noexcept { return "0.1.0"; }

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw DataError(path + ": " + msg); }

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

const json& field(const json& obj, const std::string& path, const char* name) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(name);
  if (it == obj.end()) fail(path.empty() ? name : path + "." + name, "missing required field");
  return *it;
}

std::string sub(const std::string& path, const char* name) { return path.empty() ? name : path + "." + name; }
std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

long long as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long long>();
}

std::uint64_t as_u64(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    fail(path, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

void check_version(const json& root) {
  const long long v = as_int(field(root, "", "schema_version"), "schema_version");
  if (v != kSchemaVersion)
    throw DataError("unsupported schema_version " + std::to_string(v) + " (this build reads version " +
                    std::to_string(kSchemaVersion) + ")");
}

GridSpec read_grid(const json& root) {
  const json& g = field(root, "", "grid");
  const long long n = as_int(field(g, "grid", "n"), "grid.n");
  const long long px = as_int(field(g, "grid", "image_px"), "grid.image_px");
  try {
    return GridSpec(static_cast<int>(n), static_cast<int>(px));
  } catch (const ContractError& e) {
    fail("grid", e.what());
  }
}

json write_grid(const GridSpec& g) { return json{{"n", g.n()}, {"image_px", g.image_px()}}; }

int read_cell(const json& v, const std::string& path, const GridSpec& grid) {
  as_array(v, path);
  if (v.size() != 2) fail(path, "expected [column, row]");
  const long long x = as_int(v[0], idx(path, 0));
  const long long y = as_int(v[1], idx(path, 1));
  if (x < 0 || y < 0 || x >= grid.n() || y >= grid.n())
    fail(path, "cell [" + std::to_string(x) + ", " + std::to_string(y) + "] is outside the " +
                   std::to_string(grid.n()) + "x" + std::to_string(grid.n()) + " grid");
  return grid.index(static_cast<int>(x), static_cast<int>(y));
}

json write_cell(int cell, const GridSpec& grid) { return json::array({grid.col(cell), grid.row(cell)}); }

json write_provenance(const Provenance& p) {
  json cfg;
  try {
    cfg = json::parse(p.config_json.empty() ? "{}" : p.config_json);
  } catch (const json::parse_error&) {
    cfg = p.config_json;
  }
  return json{{"command", p.command},
              {"config", cfg},
              {"seed", p.seed},
              {"version", p.version.empty() ? std::string(version()) : p.version}};
}

Provenance read_provenance(const json& root) {
  Provenance p;
  const auto it = root.find("provenance");
  if (it == root.end() || it->is_null()) return p;
  const json& pv = *it;
  if (!pv.is_object()) fail("provenance", "expected an object");
  if (pv.contains("command")) p.command = as_string(pv["command"], "provenance.command");
  if (pv.contains("config")) p.config_json = pv["config"].dump();
  if (pv.contains("seed")) p.seed = as_u64(pv["seed"], "provenance.seed");
  if (pv.contains("version")) p.version = as_string(pv["version"], "provenance.version");
  return p;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("error writing '" + path + "'");
}

// ---- session ----

SessionFile parse_session(const std::string& text) {
  const json root = parse_json(text);
  if (!root.is_object()) fail("(root)", "expected an object");
  check_version(root);
  SessionFile s;
  s.image_id = as_string(field(root, "", "image_id"), "image_id");
  s.grid = read_grid(root);
  const json& k = field(root, "", "k_instructed");
  if (!k.is_null()) {
    const long long kv = as_int(k, "k_instructed");
    if (kv < 1) fail("k_instructed", "must be a positive integer or null");
    s.k_instructed = static_cast<int>(kv);
  }
  const json& t = field(root, "", "timing");
  s.timing.preview_ms = as_number(field(t, "timing", "preview_ms"), "timing.preview_ms");
  s.timing.cue_ms = as_number(field(t, "timing", "cue_ms"), "timing.cue_ms");
  s.timing.stim_ms = as_number(field(t, "timing", "stim_ms"), "timing.stim_ms");
  if (s.timing.preview_ms <= 0 || s.timing.cue_ms <= 0 || s.timing.stim_ms <= 0)
    fail("timing", "durations must be > 0");

  const json& blocks = as_array(field(root, "", "blocks"), "blocks");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::string bp = idx("blocks", b);
    SessionBlock blk;
    blk.block_index = static_cast<int>(as_int(field(blocks[b], bp, "block_index"), sub(bp, "block_index")));
    const json& trials = as_array(field(blocks[b], bp, "trials"), sub(bp, "trials"));
    for (std::size_t i = 0; i < trials.size(); ++i) {
      const std::string tp = idx(sub(bp, "trials"), i);
      SessionTrial tr;
      tr.i = read_cell(field(trials[i], tp, "i"), sub(tp, "i"), s.grid);
      tr.j = read_cell(field(trials[i], tp, "j"), sub(tp, "j"), s.grid);
      const json& r = field(trials[i], tp, "response");
      if (!r.is_number_integer() || (r.get<long long>() != 0 && r.get<long long>() != 1))
        fail(sub(tp, "response"), "expected 0 or 1, got " + r.dump());
      tr.response = r.get<int>();
      if (trials[i].contains("rt_ms") && !trials[i]["rt_ms"].is_null())
        tr.rt_ms = as_number(trials[i]["rt_ms"], sub(tp, "rt_ms"));
      blk.trials.push_back(tr);
    }
    s.blocks.push_back(std::move(blk));
  }

  if (root.contains("contour") && !root["contour"].is_null()) {
    const json& c = as_array(root["contour"], "contour");
    Polyline line;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string cp = idx("contour", i);
      as_array(c[i], cp);
      if (c[i].size() != 2) fail(cp, "expected [x, y]");
      line.emplace_back(as_number(c[i][0], idx(cp, 0)), as_number(c[i][1], idx(cp, 1)));
    }
    s.contour = std::move(line);
  }
  s.participant_id = as_string(field(root, "", "participant_id"), "participant_id");
  if (root.contains("incomplete")) {
    if (!root["incomplete"].is_boolean()) fail("incomplete", "expected a boolean");
    s.incomplete = root["incomplete"].get<bool>();
  }
  return s;
}

std::string serialize_session(const SessionFile& s) {
  json root;
  root["schema_version"] = s.schema_version;
  root["image_id"] = s.image_id;
  root["grid"] = write_grid(s.grid);
  root["k_instructed"] = s.k_instructed ? json(*s.k_instructed) : json(nullptr);
  root["timing"] = {{"preview_ms", s.timing.preview_ms}, {"cue_ms", s.timing.cue_ms}, {"stim_ms", s.timing.stim_ms}};
  json blocks = json::array();
  for (const auto& b : s.blocks) {
    json trials = json::array();
    for (const auto& t : b.trials)
      trials.push_back({{"i", write_cell(t.i, s.grid)},
                        {"j", write_cell(t.j, s.grid)},
                        {"response", t.response},
                        {"rt_ms", t.rt_ms ? json(*t.rt_ms) : json(nullptr)}});
    blocks.push_back({{"block_index", b.block_index}, {"trials", trials}});
  }
  root["blocks"] = blocks;
  if (s.contour) {
    json c = json::array();
    for (const auto& [x, y] : *s.contour) c.push_back(json::array({x, y}));
    root["contour"] = c;
  } else {
    root["contour"] = nullptr;
  }
  root["participant_id"] = s.participant_id;
  if (s.incomplete) root["incomplete"] = true;
  return dump(root);
}

SessionFile load_session(const std::string& path) { return parse_session(read_text_file(path)); }
void save_session(const std::string& path, const SessionFile& s) { write_text_file(path, serialize_session(s)); }

ResponseDataset session_to_dataset(const SessionFile& s) {
  ResponseDataset d;
  d.image_id = s.image_id;
  d.grid = s.grid;
  d.k_instructed = s.k_instructed;
  for (const auto& b : s.blocks) {
    Block blk;
    for (const auto& t : b.trials) {
      blk.pairs.pairs.push_back(CellPair::make(t.i, t.j));
      blk.responses.push_back(static_cast<std::uint8_t>(t.response));
    }
    d.blocks.push_back(std::move(blk));
  }
  const auto violations = validate_dataset(d);
  if (!violations.empty()) {
    std::string msg = "session fails dataset validation:";
    for (std::size_t i = 0; i < violations.size() && i < 10; ++i) msg += "\n  " + violations[i].message;
    if (violations.size() > 10) msg += "\n  (" + std::to_string(violations.size() - 10) + " more)";
    throw DataError(msg);
  }
  return d;
}

SessionFile dataset_to_session(const ResponseDataset& d, const std::string& participant_id) {
  SessionFile s;
  s.image_id = d.image_id;
  s.grid = d.grid;
  s.k_instructed = d.k_instructed;
  s.participant_id = participant_id;
  for (std::size_t b = 0; b < d.blocks.size(); ++b) {
    SessionBlock blk;
    blk.block_index = static_cast<int>(b);
    const Block& src = d.blocks[b];
    detail::require(src.pairs.size() == src.responses.size(), "dataset block has mismatched responses");
    for (std::size_t t = 0; t < src.pairs.size(); ++t)
      blk.trials.push_back({src.pairs.pairs[t].a, src.pairs.pairs[t].b, src.responses[t], std::nullopt});
    s.blocks.push_back(std::move(blk));
  }
  return s;
}

// ---- maps ----

MapsFile parse_maps(const std::string& text) {
  const json root = parse_json(text);
  if (!root.is_object()) fail("(root)", "expected an object");
  check_version(root);
  MapsFile m;
  m.grid = read_grid(root);
  const long long k = as_int(field(root, "", "k"), "k");
  if (k < 1) fail("k", "must be >= 1");
  const int n = m.grid.n();
  const json& v = as_array(field(root, "", "values"), "values");
  if (static_cast<long long>(v.size()) != k) fail("values", "expected " + std::to_string(k) + " maps");
  MapTensor t(static_cast<int>(k), n);
  for (int s = 0; s < k; ++s) {
    const std::string sp = idx("values", s);
    const json& rows = as_array(v[s], sp);
    if (static_cast<int>(rows.size()) != n) fail(sp, "expected " + std::to_string(n) + " rows");
    for (int y = 0; y < n; ++y) {
      const std::string rp = idx(sp, y);
      const json& row = as_array(rows[y], rp);
      if (static_cast<int>(row.size()) != n) fail(rp, "expected " + std::to_string(n) + " values");
      for (int x = 0; x < n; ++x) t(s, y * n + x) = as_number(row[x], idx(rp, x));
    }
  }
  try {
    m.maps = ProbMaps(std::move(t));
  } catch (const ContractError& e) {
    fail("values", e.what());
  }
  m.provenance = read_provenance(root);
  return m;
}

std::string serialize_maps(const MapsFile& m) {
  detail::require(m.maps.n() == m.grid.n(), "serialize_maps: grid and maps differ in size");
  json root;
  root["schema_version"] = m.schema_version;
  root["grid"] = write_grid(m.grid);
  root["k"] = m.maps.k();
  const int n = m.maps.n();
  json values = json::array();
  for (int s = 0; s < m.maps.k(); ++s) {
    json rows = json::array();
    for (int y = 0; y < n; ++y) {
      json row = json::array();
      for (int x = 0; x < n; ++x) row.push_back(m.maps(s, y * n + x));
      rows.push_back(std::move(row));
    }
    values.push_back(std::move(rows));
  }
  root["values"] = std::move(values);
  root["provenance"] = write_provenance(m.provenance);
  return dump(root);
}

MapsFile load_maps(const std::string& path) { return parse_maps(read_text_file(path)); }
void save_maps(const std::string& path, const MapsFile& m) { write_text_file(path, serialize_maps(m)); }

// ---- pairs ----

PairsFile parse_pairs(const std::string& text) {
  const json root = parse_json(text);
  if (!root.is_object()) fail("(root)", "expected an object");
  check_version(root);
  PairsFile p;
  p.grid = read_grid(root);
  p.k = static_cast<int>(as_int(field(root, "", "k"), "k"));
  if (p.k < 2) fail("k", "must be >= 2");
  try {
    p.coverage = parse_coverage(as_string(field(root, "", "coverage"), "coverage"));
  } catch (const ContractError& e) {
    fail("coverage", e.what());
  }
  p.seed = as_u64(field(root, "", "seed"), "seed");
  const json& pairs = as_array(field(root, "", "pairs"), "pairs");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string pp = idx("pairs", i);
    const int a = read_cell(field(pairs[i], pp, "i"), sub(pp, "i"), p.grid);
    const int b = read_cell(field(pairs[i], pp, "j"), sub(pp, "j"), p.grid);
    if (a == b) fail(pp, "identical-point pair");
    p.pairs.pairs.push_back(CellPair::make(a, b));
  }
  p.provenance = read_provenance(root);
  return p;
}

std::string serialize_pairs(const PairsFile& p) {
  json root;
  root["schema_version"] = p.schema_version;
  root["grid"] = write_grid(p.grid);
  root["k"] = p.k;
  root["coverage"] = to_string(p.coverage);
  root["seed"] = p.seed;
  json pairs = json::array();
  for (const CellPair& c : p.pairs) pairs.push_back({{"i", write_cell(c.a, p.grid)}, {"j", write_cell(c.b, p.grid)}});
  root["pairs"] = std::move(pairs);
  root["provenance"] = write_provenance(p.provenance);
  return dump(root);
}

PairsFile load_pairs(const std::string& path) { return parse_pairs(read_text_file(path)); }
void save_pairs(const std::string& path, const PairsFile& p) { write_text_file(path, serialize_pairs(p)); }

// ---- features ----

FeatureMaps parse_features(const std::string& text) {
  const json root = parse_json(text);
  if (!root.is_object()) fail("(root)", "expected an object");
  check_version(root);
  const long long n = as_int(field(root, "", "n"), "n");
  const long long d = as_int(field(root, "", "d"), "d");
  if (n < 1 || d < 1) fail("(root)", "n and d must be positive");
  FeatureMaps f(static_cast<int>(n), static_cast<int>(d));
  const json& rows = as_array(field(root, "", "values"), "values");
  if (static_cast<long long>(rows.size()) != n) fail("values", "expected " + std::to_string(n) + " rows");
  for (int y = 0; y < n; ++y) {
    const std::string rp = idx("values", y);
    const json& row = as_array(rows[y], rp);
    if (static_cast<long long>(row.size()) != n) fail(rp, "expected " + std::to_string(n) + " cells");
    for (int x = 0; x < n; ++x) {
      const std::string cp = idx(rp, x);
      const json& cell = as_array(row[x], cp);
      if (static_cast<long long>(cell.size()) != d) fail(cp, "expected " + std::to_string(d) + " features");
      for (int j = 0; j < d; ++j) f(static_cast<int>(y * n + x), j) = as_number(cell[j], idx(cp, j));
    }
  }
  return f;
}

std::string serialize_features(const FeatureMaps& f) {
  f.validate();
  json root;
  root["schema_version"] = kSchemaVersion;
  root["n"] = f.n;
  root["d"] = f.d;
  json rows = json::array();
  for (int y = 0; y < f.n; ++y) {
    json row = json::array();
    for (int x = 0; x < f.n; ++x) {
      const auto c = f.cell(y * f.n + x);
      row.push_back(json(std::vector<double>(c.begin(), c.end())));
    }
    rows.push_back(std::move(row));
  }
  root["values"] = std::move(rows);
  return dump(root);
}

FeatureMaps load_features(const std::string& path) { return parse_features(read_text_file(path)); }
void save_features(const std::string& path, const FeatureMaps& f) { write_text_file(path, serialize_features(f)); }

// ---- sweeps ----

namespace {
std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}
}  // namespace

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
  const auto old = os.precision(12);
  os << "level,condition,resample,mae,ci_low,ci_high,mean_entropy,iterations,converged,failed,error\n";
  for (const auto& r : table.rows)
    os << r.level << ',' << csv_quote(r.condition) << ',' << r.resample << ',' << r.mae << ",,," << r.mean_entropy
       << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << (r.failed ? 1 : 0) << ','
       << csv_quote(r.error) << '\n';
  for (const auto& s : table.summary)
    os << s.level << ',' << csv_quote(s.condition) << ",summary," << s.mae_mean << ',' << s.ci_low << ','
       << s.ci_high << ",,," << ',' << s.n_failed << ",\n";
  os.precision(old);
}

std::string sweep_to_json(const SweepTable& table, const Provenance& provenance) {
  json root;
  root["schema_version"] = kSchemaVersion;
  json summary = json::array();
  for (const auto& s : table.summary)
    summary.push_back({{"level", s.level},
                       {"condition", s.condition},
                       {"mae_mean", s.mae_mean},
                       {"ci_low", s.ci_low},
                       {"ci_high", s.ci_high},
                       {"n_ok", s.n_ok},
                       {"n_failed", s.n_failed}});
  json rows = json::array();
  for (const auto& r : table.rows) {
    json row = {{"level", r.level},       {"condition", r.condition},   {"resample", r.resample},
                {"mae", r.mae},           {"mean_entropy", r.mean_entropy}, {"iterations", r.iterations},
                {"converged", r.converged}, {"failed", r.failed}};
    if (r.failed) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  root["summary"] = std::move(summary);
  root["rows"] = std::move(rows);
  root["provenance"] = write_provenance(provenance);
  return dump(root);
}

}  // namespace pseg
