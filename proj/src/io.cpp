#include "bellsim/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <istream>

#include "bellsim/errors.hpp"
#include "bellsim/version.hpp"

namespace bellsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ParseError(msg); }

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || key == k;
    if (!ok) fail(where + ": unknown key '" + key + "'");
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const char* key, double fallback,
                  const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) fail(where + ": '" + std::string(key) + "' must be a number");
  return v->get<double>();
}

std::uint64_t get_uint(const json& obj, const char* key, std::uint64_t fallback,
                       const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_integer() && v->get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v->get<std::int64_t>());
  fail(where + ": '" + std::string(key) + "' must be a nonnegative integer");
}

int get_int(const json& obj, const char* key, int fallback,
            const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer() && !v->is_number_unsigned())
    fail(where + ": '" + std::string(key) + "' must be an integer");
  return v->get<int>();
}

bool get_bool(const json& obj, const char* key, bool fallback,
              const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(where + ": '" + std::string(key) + "' must be a boolean");
  return v->get<bool>();
}

std::string get_string(const json& obj, const char* key,
                       const std::string& fallback, const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) fail(where + ": '" + std::string(key) + "' must be a string");
  return v->get<std::string>();
}

std::vector<double> get_number_array(const json& obj, const char* key,
                                     const std::vector<double>& fallback,
                                     const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_array()) fail(where + ": '" + std::string(key) + "' must be an array");
  std::vector<double> out;
  for (const json& e : *v) {
    if (!e.is_number())
      fail(where + ": '" + std::string(key) + "' must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

ModelDescriptor parse_model(const json& obj) {
  if (!obj.is_object()) fail("config: 'model' must be an object");
  check_keys(obj, "config: model", {"name", "class", "params"});
  const std::string name = get_string(obj, "name", "", "config: model");
  if (name.empty()) fail("config: model needs a 'name'");
  ModelDescriptor desc = builtin_descriptor(name);
  const std::string cls = get_string(obj, "class", "", "config: model");
  if (!cls.empty() && model_class_from_string(cls) != desc.cls)
    fail("config: model '" + name + "' has class " + to_string(desc.cls) +
         ", not " + cls);
  if (const json* params = find(obj, "params")) {
    if (!params->is_object()) fail("config: model 'params' must be an object");
    for (const auto& [key, value] : params->items()) {
      if (!value.is_number())
        fail("config: model parameter '" + key + "' must be a number");
      desc.params[key] = value.get<double>();
    }
  }
  return desc;
}

std::vector<double> default_grid_degrees() {
  std::vector<double> degrees;
  for (int d = 0; d <= 90; d += 10) degrees.push_back(d);
  return degrees;
}

HpAuditConfig parse_hp(const json& obj) {
  if (!obj.is_object()) fail("config: 'hp' must be an object");
  check_keys(obj, "config: hp",
             {"n", "family", "residual_sigma", "residual_tau",
              "uniform_weight_sigma", "uniform_weight_tau", "plane",
              "a_grid_deg", "b_grid_deg", "quadrature"});
  HpAuditConfig hp;
  hp.n = get_int(obj, "n", 1, "config: hp");
  if (hp.n < 1) fail("config: hp 'n' must be at least 1");
  hp.family = get_string(obj, "family", "reference", "config: hp");
  if (hp.family != "reference" && hp.family != "uniform_local")
    fail("config: hp family must be 'reference' or 'uniform_local'");
  hp.reference_params.residual_sigma =
      get_number(obj, "residual_sigma", 0.0, "config: hp");
  hp.reference_params.residual_tau =
      get_number(obj, "residual_tau", 0.0, "config: hp");
  hp.uniform_weight_sigma =
      get_number(obj, "uniform_weight_sigma", 0.25, "config: hp");
  hp.uniform_weight_tau =
      get_number(obj, "uniform_weight_tau", 0.25, "config: hp");
  hp.plane = plane_from_string(get_string(obj, "plane", "xy", "config: hp"));
  hp.a_grid_deg =
      get_number_array(obj, "a_grid_deg", default_grid_degrees(), "config: hp");
  hp.b_grid_deg =
      get_number_array(obj, "b_grid_deg", default_grid_degrees(), "config: hp");
  if (hp.a_grid_deg.empty() || hp.b_grid_deg.empty())
    fail("config: hp direction grids must be nonempty");
  if (const json* quad = find(obj, "quadrature")) {
    if (!quad->is_object()) fail("config: hp 'quadrature' must be an object");
    check_keys(*quad, "config: hp quadrature", {"cells_per_unit", "tolerance"});
    hp.quadrature.cells_per_unit =
        get_int(*quad, "cells_per_unit", 32, "config: hp quadrature");
    hp.quadrature.tolerance =
        get_number(*quad, "tolerance", 1e-9, "config: hp quadrature");
    if (hp.quadrature.cells_per_unit < 4)
      fail("config: hp quadrature 'cells_per_unit' must be at least 4");
    if (!(hp.quadrature.tolerance > 0.0))
      fail("config: hp quadrature 'tolerance' must be positive");
  }
  return hp;
}

}  // namespace

SettingTable parse_table(const json& doc) {
  if (!doc.is_object()) fail("config: 'table' must be an object");
  check_keys(doc, "config: table", {"plane", "a_deg", "b_deg"});
  const Plane plane =
      plane_from_string(get_string(doc, "plane", "xy", "config: table"));
  const auto angles = [&](const char* key) {
    const std::vector<double> v = get_number_array(doc, key, {}, "config: table");
    if (v.size() != 2)
      fail("config: table '" + std::string(key) + "' needs exactly 2 angles");
    return v;
  };
  const std::vector<double> a = angles("a_deg");
  const std::vector<double> b = angles("b_deg");
  return SettingTable{direction_in_plane(a[0], plane),
                      direction_in_plane(a[1], plane),
                      direction_in_plane(b[0], plane),
                      direction_in_plane(b[1], plane)};
}

AppConfig parse_config(const json& doc) {
  if (!doc.is_object()) fail("config: top level must be an object");
  check_keys(doc, "config", {"model", "table", "run", "analysis", "hp"});

  AppConfig cfg;
  cfg.echo = doc;

  if (const json* model = find(doc, "model")) cfg.run.model = parse_model(*model);
  if (const json* table = find(doc, "table")) cfg.run.table = parse_table(*table);

  if (const json* run = find(doc, "run")) {
    if (!run->is_object()) fail("config: 'run' must be an object");
    check_keys(*run, "config: run",
               {"trials", "seed", "mode", "reveal_hidden", "workers"});
    cfg.run.trials = get_uint(*run, "trials", 0, "config: run");
    cfg.run.seed = get_uint(*run, "seed", 0, "config: run");
    cfg.run.mode = execution_mode_from_string(
        get_string(*run, "mode", "parallel", "config: run"));
    cfg.run.reveal_hidden = get_bool(*run, "reveal_hidden", false, "config: run");
    cfg.run.workers = get_int(*run, "workers", 0, "config: run");
    if (cfg.run.workers < 0) fail("config: run 'workers' must be >= 0");
  }

  if (const json* analysis = find(doc, "analysis")) {
    if (!analysis->is_object()) fail("config: 'analysis' must be an object");
    check_keys(*analysis, "config: analysis", {"confidence", "alpha"});
    cfg.analysis.confidence =
        get_number(*analysis, "confidence", 0.99, "config: analysis");
    cfg.analysis.alpha = get_number(*analysis, "alpha", 1e-3, "config: analysis");
    if (!(cfg.analysis.confidence > 0.0 && cfg.analysis.confidence < 1.0))
      fail("config: analysis 'confidence' must lie strictly between 0 and 1");
    if (!(cfg.analysis.alpha > 0.0 && cfg.analysis.alpha < 1.0))
      fail("config: analysis 'alpha' must lie strictly between 0 and 1");
  }

  if (const json* hp = find(doc, "hp")) cfg.hp = parse_hp(*hp);
  return cfg;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail("cannot read '" + path.string() + "'");
  json doc = json::parse(is, nullptr, false);
  if (doc.is_discarded())
    fail("'" + path.string() + "' is not a valid structured document");
  return doc;
}

AppConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_json_file(path));
}

SettingTable load_table(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  if (doc.is_object() && doc.contains("table")) return parse_table(doc["table"]);
  return parse_table(doc);
}

std::vector<Direction> grid_from_angles(const std::vector<double>& degrees,
                                        Plane plane) {
  std::vector<Direction> grid;
  grid.reserve(degrees.size());
  for (const double d : degrees) grid.push_back(direction_in_plane(d, plane));
  return grid;
}

void append_log_line(std::string& out, const TrialRecord& rec) {
  char buf[128];
  int len;
  if (rec.revealed) {
    const Quadruple& q = *rec.revealed;
    len = std::snprintf(
        buf, sizeof buf,
        "{\"index\":%llu,\"a\":%d,\"b\":%d,\"x\":%d,\"y\":%d,"
        "\"revealed\":[%d,%d,%d,%d]}\n",
        static_cast<unsigned long long>(rec.index), label_value(rec.a),
        label_value(rec.b), outcome_value(rec.x), outcome_value(rec.y),
        outcome_value(q.x1), outcome_value(q.x2), outcome_value(q.y1),
        outcome_value(q.y2));
  } else {
    len = std::snprintf(
        buf, sizeof buf,
        "{\"index\":%llu,\"a\":%d,\"b\":%d,\"x\":%d,\"y\":%d,"
        "\"revealed\":null}\n",
        static_cast<unsigned long long>(rec.index), label_value(rec.a),
        label_value(rec.b), outcome_value(rec.x), outcome_value(rec.y));
  }
  out.append(buf, static_cast<std::size_t>(len));
}

std::string log_to_string(const TrialLog& log) {
  std::string out;
  out.reserve(log.size() * 64);
  for (const TrialRecord& rec : log) append_log_line(out, rec);
  return out;
}

namespace {

struct Scanner {
  const char* p;
  const char* end;

  bool lit(std::string_view s) {
    if (static_cast<std::size_t>(end - p) < s.size()) return false;
    if (std::memcmp(p, s.data(), s.size()) != 0) return false;
    p += s.size();
    return true;
  }

  bool num(long long& out) {
    const auto [ptr, ec] = std::from_chars(p, end, out);
    if (ec != std::errc()) return false;
    p = ptr;
    return true;
  }

  bool done() const { return p == end; }
};

[[noreturn]] void bad_line(std::uint64_t line_number, const std::string& why) {
  fail("log line " + std::to_string(line_number) + ": " + why);
}

SettingLabel label_checked(long long v, std::uint64_t line_number) {
  if (v == 1) return SettingLabel::one;
  if (v == 2) return SettingLabel::two;
  bad_line(line_number, "setting label must be 1 or 2");
}

Outcome outcome_checked(long long v, std::uint64_t line_number) {
  if (v == 1) return Outcome::plus;
  if (v == -1) return Outcome::minus;
  bad_line(line_number, "outcome must be 1 or -1");
}

}  // namespace

TrialRecord parse_log_line(std::string_view line, std::uint64_t line_number) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
    line.remove_suffix(1);

  // Fast path: the canonical layout this tool writes.
  Scanner s{line.data(), line.data() + line.size()};
  long long index = 0, a = 0, b = 0, x = 0, y = 0;
  if (s.lit("{\"index\":") && s.num(index) && s.lit(",\"a\":") && s.num(a) &&
      s.lit(",\"b\":") && s.num(b) && s.lit(",\"x\":") && s.num(x) &&
      s.lit(",\"y\":") && s.num(y) && s.lit(",\"revealed\":")) {
    if (index < 0)
      bad_line(line_number, "'index' must be a nonnegative integer");
    TrialRecord rec;
    rec.index = static_cast<std::uint64_t>(index);
    rec.a = label_checked(a, line_number);
    rec.b = label_checked(b, line_number);
    rec.x = outcome_checked(x, line_number);
    rec.y = outcome_checked(y, line_number);
    if (s.lit("null}") && s.done()) return rec;
    long long q0 = 0, q1 = 0, q2 = 0, q3 = 0;
    if (s.lit("[") && s.num(q0) && s.lit(",") && s.num(q1) && s.lit(",") &&
        s.num(q2) && s.lit(",") && s.num(q3) && s.lit("]}") && s.done()) {
      rec.revealed = Quadruple{
          outcome_checked(q0, line_number), outcome_checked(q1, line_number),
          outcome_checked(q2, line_number), outcome_checked(q3, line_number)};
      return rec;
    }
  }

  // General path: tolerate reordered fields and whitespace.
  const json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    bad_line(line_number, "not a valid record");
  check_keys(j, "log line " + std::to_string(line_number),
             {"index", "a", "b", "x", "y", "revealed"});
  for (const char* key : {"index", "a", "b", "x", "y", "revealed"})
    if (!j.contains(key))
      bad_line(line_number, "missing field '" + std::string(key) + "'");
  const bool index_ok =
      j["index"].is_number_unsigned() ||
      (j["index"].is_number_integer() && j["index"].get<long long>() >= 0);
  if (!index_ok) bad_line(line_number, "'index' must be a nonnegative integer");
  for (const char* key : {"a", "b", "x", "y"})
    if (!j[key].is_number_integer())
      bad_line(line_number, "'" + std::string(key) + "' must be an integer");

  TrialRecord rec;
  rec.index = j["index"].get<std::uint64_t>();
  rec.a = label_checked(j["a"].get<long long>(), line_number);
  rec.b = label_checked(j["b"].get<long long>(), line_number);
  rec.x = outcome_checked(j["x"].get<long long>(), line_number);
  rec.y = outcome_checked(j["y"].get<long long>(), line_number);
  const json& rev = j["revealed"];
  if (!rev.is_null()) {
    if (!rev.is_array() || rev.size() != 4)
      bad_line(line_number, "'revealed' must be null or a 4-element array");
    for (const json& e : rev)
      if (!e.is_number_integer())
        bad_line(line_number, "'revealed' entries must be integers");
    rec.revealed = Quadruple{outcome_checked(rev[0].get<long long>(), line_number),
                             outcome_checked(rev[1].get<long long>(), line_number),
                             outcome_checked(rev[2].get<long long>(), line_number),
                             outcome_checked(rev[3].get<long long>(), line_number)};
  }
  return rec;
}

void for_each_record(std::istream& is,
                     const std::function<void(const TrialRecord&)>& fn) {
  std::string line;
  std::uint64_t line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    fn(parse_log_line(line, line_number));
  }
}

void write_log_file(const std::filesystem::path& path, const TrialLog& log) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail("cannot open '" + path.string() + "' for writing");
  std::string buf;
  buf.reserve(1 << 20);
  for (const TrialRecord& rec : log) {
    append_log_line(buf, rec);
    if (buf.size() >= (1 << 20) - 128) {
      os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  os.flush();
  if (!os) fail("failed writing '" + path.string() + "'");
}

TrialLog read_log_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail("cannot read '" + path.string() + "'");
  TrialLog log;
  for_each_record(is, [&log](const TrialRecord& rec) { log.push_back(rec); });
  return log;
}

nlohmann::json to_json(const ModelDescriptor& d) {
  json params = json::object();
  for (const auto& [key, value] : d.params) params[key] = value;
  return json{{"name", d.name}, {"class", to_string(d.cls)}, {"params", params}};
}

nlohmann::json to_json(const Direction& d) { return json::array({d.x, d.y, d.z}); }

nlohmann::json to_json(const BellEstimate& est) {
  json pairs = json::array();
  for (int idx = 0; idx < 4; ++idx)
    pairs.push_back(json{{"a", idx / 2 + 1},
                         {"b", idx % 2 + 1},
                         {"count", est.freqs.counts[idx]},
                         {"p_hat", est.freqs.p_hat[idx]}});
  return json{{"trials", est.trials},   {"pairs", pairs},
              {"s_hat", est.s_hat},     {"score_mean", est.score_mean},
              {"epsilon", est.epsilon}, {"confidence", est.confidence},
              {"violation", est.violation}};
}

nlohmann::json to_json(const IndependenceReport& rep) {
  json table = json::array();
  for (const auto& row : rep.table) table.push_back(row);
  return json{{"statistic", rep.statistic},
              {"dof", rep.dof},
              {"p_value", rep.p_value},
              {"collapsed_columns", rep.collapsed_columns},
              {"table", table}};
}

nlohmann::json to_json(const NoSignalingReport& rep) {
  json comparisons = json::array();
  for (const MarginalComparison& c : rep.comparisons)
    comparisons.push_back(
        json{{"wing", c.wing == Wing::left ? "left" : "right"},
             {"local_setting", label_value(c.local)},
             {"n_remote1", c.n_remote1},
             {"plus_remote1", c.plus_remote1},
             {"n_remote2", c.n_remote2},
             {"plus_remote2", c.plus_remote2},
             {"z", c.z},
             {"p_value", c.p_value}});
  return json{{"alpha", rep.alpha},
              {"min_p", rep.min_p},
              {"rejected", rep.rejected},
              {"comparisons", comparisons}};
}

nlohmann::json to_json(const LocalityAuditReport& rep) {
  json per_slab = json::array();
  for (const auto& [slab, b_dep] : rep.per_slab_b_dependence) {
    const auto a_it = rep.per_slab_a_dependence.find(slab);
    per_slab.push_back(
        json{{"i", slab},
             {"b_dependence", b_dep},
             {"a_dependence",
              a_it == rep.per_slab_a_dependence.end() ? 0.0 : a_it->second}});
  }
  json witnesses = json::array();
  for (const LocalityWitness& w : rep.witnesses)
    witnesses.push_back(
        json{{"slab", w.slab},
             {"varied_wing", w.varied == Wing::left ? "left" : "right"},
             {"fixed_direction", to_json(w.fixed_dir)},
             {"direction_1", to_json(w.dir1)},
             {"direction_2", to_json(w.dir2)},
             {"deviation", w.deviation}});
  return json{{"verdict", to_string(rep.verdict)},
              {"tolerance", rep.tolerance},
              {"quadrature_warning", rep.quadrature_warning},
              {"per_slab", per_slab},
              {"witnesses", witnesses},
              {"marginal_totals", rep.marginal_totals}};
}

nlohmann::json make_manifest(const AppConfig& cfg,
                             const std::vector<std::string>& output_paths) {
  return json{{"artifact_version", kArtifactVersion},
              {"created_utc", iso8601_utc_now()},
              {"seed", cfg.run.seed},
              {"config", cfg.echo},
              {"output_paths", output_paths}};
}

std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail("cannot open '" + path.string() + "' for writing");
  os << j.dump(2) << '\n';
  os.flush();
  if (!os) fail("failed writing '" + path.string() + "'");
}

}  // namespace bellsim
