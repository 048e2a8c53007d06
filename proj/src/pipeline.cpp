#include "orbitlift/pipeline.hpp"

#include <sstream>

#include "orbitlift/error.hpp"

namespace orbitlift {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::DimensionMismatch:
      return 2;
    case ErrorKind::NonHyperbolic:
    case ErrorKind::Inconsistent:
      return 3;
    case ErrorKind::OrbitMismatch:
    case ErrorKind::IsotropyInsufficient:
      return 4;
    case ErrorKind::ResidualExceeded:
      return 5;
    default:
      return 1;
  }
}

LiftRun run_lift(const FiniteGroupRep& rep, const OrbitMap& map, const SampledCurve& curve,
                 const std::optional<Matrix>& fiber_oracle, const io::Config& cfg) {
  const auto opts = cfg.lift_options();
  LiftRun run;
  const auto continuous = lift_continuous(rep, map, curve, fiber_oracle, opts);
  run.lift = repair_differentiable(rep, map, curve, continuous, opts);
  run.report = verify_lift(rep, map, curve, run.lift, cfg.verify_options());
  run.report_json = io::to_json(run.report);
  io::Json events = io::Json::array();
  for (const auto& e : run.lift.annotations) events.push_back(io::to_json(e));
  run.report_json["events"] = std::move(events);
  run.exit_code = run.report.pass ? 0 : 1;
  return run;
}

io::Json run_analyze(const SampledCurve& curve, const io::Config& cfg) {
  curve.validate();
  const auto zs = detect_zero_set(curve, cfg.tol_zero);
  io::Json out;
  out["schema_version"] = kSchemaVersion;
  io::Json zeros = io::Json::array();
  for (auto k : zs.isolated) zeros.push_back(io::to_json(check_multiplicity_lemma(curve, k, std::nullopt, cfg.tol_zero), curve));
  out["zeros"] = std::move(zeros);
  io::Json runs = io::Json::array();
  for (const auto& r : zs.runs)
    if (r.accumulation)
      runs.push_back({{"start", r.start},
                      {"end", r.end},
                      {"t_start", curve.grid(r.start)},
                      {"t_end", curve.grid(r.end)},
                      {"accumulation", true}});
  out["accumulation_runs"] = std::move(runs);
  return out;
}

VerificationReport run_verify(const FiniteGroupRep& rep, const OrbitMap& map, const SampledCurve& curve,
                              const SampledLift& lift, const io::Config& cfg) {
  if (lift.grid.size() != curve.grid.size() || lift.grid != curve.grid)
    throw Error(ErrorKind::ParseError, "lift grid differs from curve grid");
  if (lift.points.cols() != rep.dim()) throw Error(ErrorKind::ParseError, "lift width differs from group dimension");
  return verify_lift(rep, map, curve, lift, cfg.verify_options());
}

SynthRun run_synth(const io::SynthDocument& doc) {
  auto rep = io::group_from_json(doc.group);
  auto map = doc.generators ? io::map_from_json(*doc.generators, rep.dim()) : symmetric_orbit_map<double>(rep.dim());
  auto result = synthesize(rep, map, doc.spec);
  return {std::move(rep), std::move(map), std::move(result)};
}

std::string events_csv(const SampledLift& lift) {
  std::ostringstream out;
  out << "t,index,kind\n";
  for (const auto& e : lift.annotations) out << io::format_double(e.instant) << ',' << e.index << ',' << to_string(e.kind) << '\n';
  return out.str();
}

}  // namespace orbitlift
