#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "orbitlift/flatness.hpp"
#include "orbitlift/group.hpp"
#include "orbitlift/invariants.hpp"
#include "orbitlift/lifter.hpp"
#include "orbitlift/verify.hpp"

namespace orbitlift::io {

using Json = nlohmann::ordered_json;

/// Time-indexed rows: header `t,<prefix>1,...`, one sample per line.
struct Table {
  Vector t;
  Matrix rows;
};

Table parse_table(std::istream& in, char prefix);
Table read_table(const std::filesystem::path& path, char prefix);
void write_table(std::ostream& out, const Vector& t, const Matrix& rows, char prefix);
void write_table(const std::filesystem::path& path, const Vector& t, const Matrix& rows, char prefix);

/// Shortest decimal that round-trips.
std::string format_double(double x);

SampledCurve read_curve(const std::filesystem::path& path, const OrbitMap& map);
void write_curve(const std::filesystem::path& path, const SampledCurve& curve);
SampledLift read_lift(const std::filesystem::path& path);
void write_lift(const std::filesystem::path& path, const SampledLift& lift);

/// {"type":"symmetric","n":N} or {"type":"matrix","dim":d,"generators":[...],"max_order":M}.
FiniteGroupRep group_from_json(const Json& spec);

/// [{"degree":d,"terms":[{"c":coeff,"e":[exponents]}]}]; the squared norm is
/// prepended when the list does not start with it.
OrbitMap map_from_json(const Json& gens, int dim);

struct Config {
  Json group = Json{{"type", "symmetric"}, {"n", 2}};
  std::string map = "symmetric";
  std::optional<std::string> fiber_oracle;
  double tol_zero = kTolZero;
  double tol_deriv = 1e-5;
  std::optional<double> tol_im;
  double residual_tol = 1e-7;
  double tol_cluster = 1e-2;
  std::uint64_t seed = 0;
  int jobs = 1;
  /// Relative paths in the config resolve against this directory.
  std::filesystem::path base_dir;

  LiftOptions lift_options() const;
  VerifyOptions verify_options() const;
};

/// Rejects unknown keys and non-positive tolerances with ParseError.
Config config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
Config read_config(const std::filesystem::path& path);

OrbitMap load_map(const Config& cfg, int dim);

struct SynthDocument {
  Json group;
  std::string map = "symmetric";
  std::optional<Json> generators;
  SynthSpec spec;
};

SynthDocument synth_from_json(const Json& j);

Json to_json(const VerificationReport& report);
Json to_json(const FlatnessReport& report, const SampledCurve& curve);
Json to_json(const SingularEvent& event);
Json vector_json(const Vector& v);

Json read_json(const std::filesystem::path& path);
/// Two-space indent, trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);
std::string dump(const Json& j);

}  // namespace orbitlift::io
