#pragma once

#include <optional>
#include <string>

#include "orbitlift/io.hpp"

namespace orbitlift {

/// Process exit status for a failure of the given kind.
int exit_code(ErrorKind kind);

struct LiftRun {
  SampledLift lift;
  VerificationReport report;
  io::Json report_json;
  int exit_code = 0;
};

/// Zero detection, continuous lift, differentiable repair, verification.
LiftRun run_lift(const FiniteGroupRep& rep, const OrbitMap& map, const SampledCurve& curve,
                 const std::optional<Matrix>& fiber_oracle, const io::Config& cfg);

/// Flatness report at every isolated zero plus the accumulation-like runs.
io::Json run_analyze(const SampledCurve& curve, const io::Config& cfg);

VerificationReport run_verify(const FiniteGroupRep& rep, const OrbitMap& map, const SampledCurve& curve,
                              const SampledLift& lift, const io::Config& cfg);

struct SynthRun {
  FiniteGroupRep rep;
  OrbitMap map;
  SynthResult result;
};

SynthRun run_synth(const io::SynthDocument& doc);

/// t,index,kind rows for plotting.
std::string events_csv(const SampledLift& lift);

}  // namespace orbitlift
