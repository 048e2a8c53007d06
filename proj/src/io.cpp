#include "orbitlift/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "orbitlift/error.hpp"

namespace orbitlift::io {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, std::size_t line_no) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x))
    parse_fail("line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
  return x;
}

template <typename T>
T get(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) parse_fail(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    parse_fail(where + ": key '" + key + "': " + e.what());
  }
}

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) parse_fail(where + ": expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) parse_fail(where + ": unknown key '" + k + "'");
}

double positive(const Json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const double v = get<double>(j, key, where);
  if (!(v > 0.0) || !std::isfinite(v)) parse_fail(where + ": '" + key + "' must be positive");
  return v;
}

Matrix matrix_from_json(const Json& m, int dim) {
  if (!m.is_array() || static_cast<int>(m.size()) != dim) parse_fail("group: generator must have dim rows");
  Matrix out(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const auto& row = m[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim) parse_fail("group: generator must have dim columns");
    for (int c = 0; c < dim; ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) parse_fail("group: generator entries must be numbers");
      out(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw Error(ErrorKind::InvalidArgument, "cannot format number");
  return std::string(buf, ptr);
}

Table parse_table(std::istream& in, char prefix) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) parse_fail("empty CSV");
  ++line_no;
  const auto header = split(trim(line));
  if (header.size() < 2 || trim(header[0]) != "t") parse_fail("header must start with 't'");
  for (std::size_t i = 1; i < header.size(); ++i)
    if (trim(header[i]) != std::string(1, prefix) + std::to_string(i))
      parse_fail("header column " + std::to_string(i + 1) + " must be '" + prefix + std::to_string(i) + "'");
  const std::size_t cols = header.size() - 1;

  std::vector<double> ts;
  std::vector<double> vals;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != cols + 1)
      parse_fail("line " + std::to_string(line_no) + ": expected " + std::to_string(cols + 1) + " fields");
    ts.push_back(parse_number(fields[0], line_no));
    for (std::size_t i = 1; i < fields.size(); ++i) vals.push_back(parse_number(fields[i], line_no));
  }
  if (ts.empty()) parse_fail("CSV has no data rows");
  Table out;
  out.t = Eigen::Map<const Vector>(ts.data(), static_cast<Eigen::Index>(ts.size()));
  out.rows = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      vals.data(), static_cast<Eigen::Index>(ts.size()), static_cast<Eigen::Index>(cols));
  for (Eigen::Index k = 1; k < out.t.size(); ++k)
    if (!(out.t(k) > out.t(k - 1))) parse_fail("time column must be strictly increasing");
  return out;
}

Table read_table(const fs::path& path, char prefix) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open " + path.string());
  return parse_table(in, prefix);
}

void write_table(std::ostream& out, const Vector& t, const Matrix& rows, char prefix) {
  out << 't';
  for (Eigen::Index i = 0; i < rows.cols(); ++i) out << ',' << prefix << (i + 1);
  out << '\n';
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    out << format_double(t(k));
    for (Eigen::Index i = 0; i < rows.cols(); ++i) out << ',' << format_double(rows(k, i));
    out << '\n';
  }
}

void write_table(const fs::path& path, const Vector& t, const Matrix& rows, char prefix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  write_table(out, t, rows, prefix);
}

SampledCurve read_curve(const fs::path& path, const OrbitMap& map) {
  auto table = read_table(path, 'y');
  if (table.rows.cols() != static_cast<Eigen::Index>(map.size()))
    parse_fail("curve has " + std::to_string(table.rows.cols()) + " invariant columns, map has " +
               std::to_string(map.size()));
  SampledCurve curve{std::move(table.t), std::move(table.rows), map.degrees()};
  return curve;
}

void write_curve(const fs::path& path, const SampledCurve& curve) { write_table(path, curve.grid, curve.values, 'y'); }

SampledLift read_lift(const fs::path& path) {
  auto table = read_table(path, 'v');
  SampledLift lift;
  lift.grid = std::move(table.t);
  lift.points = std::move(table.rows);
  return lift;
}

void write_lift(const fs::path& path, const SampledLift& lift) { write_table(path, lift.grid, lift.points, 'v'); }

FiniteGroupRep group_from_json(const Json& spec) {
  if (!spec.is_object()) parse_fail("group: expected an object");
  const auto type = get<std::string>(spec, "type", "group");
  if (type == "symmetric") {
    reject_unknown(spec, {"type", "n"}, "group");
    const int n = get<int>(spec, "n", "group");
    if (n < 1) parse_fail("group: n must be positive");
    return symmetric_group_rep(n);
  }
  if (type == "dihedral" || type == "cyclic") {
    reject_unknown(spec, {"type", "m"}, "group");
    const int m = get<int>(spec, "m", "group");
    if (m < 1) parse_fail("group: m must be positive");
    return type == "dihedral" ? dihedral_group_rep(m) : cyclic_group_rep(m);
  }
  if (type == "matrix") {
    reject_unknown(spec, {"type", "dim", "generators", "max_order"}, "group");
    const int dim = get<int>(spec, "dim", "group");
    if (dim < 1) parse_fail("group: dim must be positive");
    const auto max_order = spec.contains("max_order") ? get<std::size_t>(spec, "max_order", "group") : 1024;
    if (!spec.contains("generators") || !spec["generators"].is_array()) parse_fail("group: generators must be a list");
    std::vector<Matrix> gens;
    for (const auto& m : spec["generators"]) gens.push_back(matrix_from_json(m, dim));
    if (gens.empty()) gens.push_back(Matrix::Identity(dim, dim));
    return enumerate_group(gens, max_order);
  }
  parse_fail("group: unknown type '" + type + "'");
}

OrbitMap map_from_json(const Json& gens, int dim) {
  if (!gens.is_array() || gens.empty()) parse_fail("map: expected a non-empty list of generators");
  std::vector<SparsePolynomial<double>> polys;
  for (const auto& g : gens) {
    reject_unknown(g, {"degree", "terms"}, "map");
    const int degree = get<int>(g, "degree", "map");
    if (!g.contains("terms") || !g["terms"].is_array()) parse_fail("map: terms must be a list");
    std::vector<SparsePolynomial<double>::Term> terms;
    for (const auto& t : g["terms"]) {
      reject_unknown(t, {"c", "e"}, "map term");
      terms.push_back({get<double>(t, "c", "map term"), get<std::vector<int>>(t, "e", "map term")});
    }
    SparsePolynomial<double> p(dim, terms);
    if (p.degree() != degree) parse_fail("map: declared degree differs from the terms");
    polys.push_back(std::move(p));
  }
  return orbit_map_from_generators(dim, std::move(polys));
}

LiftOptions Config::lift_options() const {
  LiftOptions o;
  o.tol_zero = tol_zero;
  o.tol_deriv = tol_deriv;
  o.tol_im = tol_im;
  o.residual_tol = residual_tol;
  o.jobs = jobs;
  return o;
}

VerifyOptions Config::verify_options() const {
  VerifyOptions o;
  o.tol_zero = tol_zero;
  o.tol_deriv = tol_deriv;
  o.tol_cluster = tol_cluster;
  o.residual_tol = residual_tol;
  o.seed = seed;
  return o;
}

Config config_from_json(const Json& j, const fs::path& base_dir) {
  reject_unknown(j, {"group", "map", "fiber_oracle", "tolerances", "seed", "jobs"}, "config");
  Config cfg;
  cfg.base_dir = base_dir;
  if (j.contains("group")) cfg.group = j["group"];
  if (j.contains("map")) cfg.map = get<std::string>(j, "map", "config");
  if (j.contains("fiber_oracle")) cfg.fiber_oracle = get<std::string>(j, "fiber_oracle", "config");
  if (j.contains("seed")) cfg.seed = get<std::uint64_t>(j, "seed", "config");
  if (j.contains("jobs")) {
    cfg.jobs = get<int>(j, "jobs", "config");
    if (cfg.jobs < 1) parse_fail("config: jobs must be positive");
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    reject_unknown(t, {"tol_zero", "tol_deriv", "tol_im", "residual_tol", "tol_cluster"}, "tolerances");
    cfg.tol_zero = positive(t, "tol_zero", cfg.tol_zero, "tolerances");
    cfg.tol_deriv = positive(t, "tol_deriv", cfg.tol_deriv, "tolerances");
    if (t.contains("tol_im")) cfg.tol_im = positive(t, "tol_im", 1.0, "tolerances");
    cfg.residual_tol = positive(t, "residual_tol", cfg.residual_tol, "tolerances");
    cfg.tol_cluster = positive(t, "tol_cluster", cfg.tol_cluster, "tolerances");
  }
  return cfg;
}

Config read_config(const fs::path& path) { return config_from_json(read_json(path), path.parent_path()); }

OrbitMap load_map(const Config& cfg, int dim) {
  if (cfg.map == "symmetric") return symmetric_orbit_map<double>(dim);
  return map_from_json(read_json(cfg.base_dir / cfg.map), dim);
}

SynthDocument synth_from_json(const Json& j) {
  reject_unknown(j, {"schema_version", "group", "map", "grid", "coords", "seed", "zero_at", "zero_order"}, "synth");
  if (j.contains("schema_version") && get<int>(j, "schema_version", "synth") != kSchemaVersion)
    parse_fail("synth: unsupported schema_version");
  SynthDocument doc;
  doc.group = j.contains("group") ? j["group"] : Json{{"type", "symmetric"}, {"n", 2}};
  if (j.contains("map")) {
    if (j["map"].is_string()) {
      doc.map = j["map"].get<std::string>();
      if (doc.map != "symmetric") parse_fail("synth: map must be \"symmetric\" or an inline generator list");
    } else {
      doc.map = "generators";
      doc.generators = j["map"];
    }
  }
  if (!j.contains("grid")) parse_fail("synth: missing key 'grid'");
  const auto& g = j["grid"];
  reject_unknown(g, {"start", "stop", "count"}, "synth grid");
  doc.spec.grid.start = get<double>(g, "start", "synth grid");
  doc.spec.grid.stop = get<double>(g, "stop", "synth grid");
  doc.spec.grid.count = get<Eigen::Index>(g, "count", "synth grid");
  if (!j.contains("coords") || !j["coords"].is_array()) parse_fail("synth: coords must be a list");
  for (const auto& c : j["coords"]) {
    reject_unknown(c, {"poly", "trig"}, "synth coord");
    CoordinateSpec cs;
    if (c.contains("poly")) cs.poly = get<std::vector<double>>(c, "poly", "synth coord");
    if (c.contains("trig")) {
      for (const auto& tt : c["trig"]) {
        reject_unknown(tt, {"sin", "cos", "freq"}, "synth trig");
        TrigTerm term;
        if (tt.contains("sin")) term.sin_coeff = get<double>(tt, "sin", "synth trig");
        if (tt.contains("cos")) term.cos_coeff = get<double>(tt, "cos", "synth trig");
        term.frequency = get<double>(tt, "freq", "synth trig");
        cs.trig.push_back(term);
      }
    }
    doc.spec.coords.push_back(std::move(cs));
  }
  if (j.contains("seed")) doc.spec.scramble_seed = get<std::uint64_t>(j, "seed", "synth");
  if (j.contains("zero_at")) doc.spec.zero_at = get<double>(j, "zero_at", "synth");
  if (j.contains("zero_order")) {
    doc.spec.zero_order = get<int>(j, "zero_order", "synth");
    if (doc.spec.zero_order < 1) parse_fail("synth: zero_order must be positive");
  }
  return doc;
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const SingularEvent& e) {
  Json j;
  j["instant"] = e.instant;
  j["index"] = e.index;
  j["kind"] = to_string(e.kind);
  j["orbit_gap"] = e.orbit_gap;
  j["derivative_gap"] = e.derivative_gap;
  j["tolerance"] = e.tolerance;
  if (e.left_derivative) j["left_derivative"] = vector_json(*e.left_derivative);
  if (e.right_derivative) j["right_derivative"] = vector_json(*e.right_derivative);
  if (e.aligning_element) j["aligning_element"] = *e.aligning_element;
  if (e.collision_orbit_gap) j["collision_orbit_gap"] = *e.collision_orbit_gap;
  return j;
}

Json to_json(const VerificationReport& r) {
  Json j;
  j["schema_version"] = r.schema_version;
  j["pass"] = r.pass;
  j["rng"] = r.rng;
  j["seed"] = r.tolerances.seed;
  j["tolerances"] = {{"tol_zero", r.tolerances.tol_zero},
                     {"tol_deriv", r.tolerances.tol_deriv},
                     {"tol_cluster", r.tolerances.tol_cluster},
                     {"residual_tol", r.tolerances.residual_tol},
                     {"max_halvings", r.tolerances.max_halvings}};
  j["max_residual"] = r.max_residual;
  j["residual_tol"] = r.residual_tol;
  j["max_step_ratio"] = r.max_step_ratio;
  Json cont = Json::array();
  for (const auto& c : r.continuity_modulus) cont.push_back({{"instant", c.instant}, {"step_ratio", c.step_ratio}});
  j["continuity_modulus"] = std::move(cont);
  Json events = Json::array();
  for (const auto& e : r.singular_events) {
    Json ej;
    ej["instant"] = e.instant;
    ej["index"] = e.index;
    ej["kind"] = to_string(e.kind);
    ej["orbit_gap"] = e.orbit_gap;
    ej["tolerance"] = e.tolerance;
    if (e.probe_gap) ej["probe_gap"] = *e.probe_gap;
    if (e.left_limit) ej["left_limit"] = vector_json(*e.left_limit);
    if (e.right_limit) ej["right_limit"] = vector_json(*e.right_limit);
    if (e.aligning_element) ej["aligning_element"] = *e.aligning_element;
    if (e.collision_orbit_gap) ej["collision_orbit_gap"] = *e.collision_orbit_gap;
    ej["pass"] = e.pass;
    events.push_back(std::move(ej));
  }
  j["singular_events"] = std::move(events);
  Json acc = Json::array();
  for (const auto& a : r.accumulation_diagnostics)
    acc.push_back({{"instant", a.instant},
                   {"side", a.side},
                   {"clustered", a.clustered},
                   {"representative", vector_json(a.representative)}});
  j["accumulation_diagnostics"] = std::move(acc);
  return j;
}

Json to_json(const FlatnessReport& r, const SampledCurve& curve) {
  Json j;
  j["instant"] = curve.grid(r.instant);
  j["index"] = r.instant;
  j["orders"] = r.orders;
  Json slopes = Json::array();
  for (double s : r.slopes) slopes.push_back(std::isfinite(s) ? Json(s) : Json(nullptr));
  j["slopes"] = std::move(slopes);
  j["degrees"] = curve.degrees;
  j["lemma_holds"] = r.lemma_holds;
  j["confidence"] = r.confidence;
  return j;
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    parse_fail(path.string() + ": " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << dump(j);
}

}  // namespace orbitlift::io
