#pragma once

#include "qparch/scenario/afs.hpp"

namespace qparch::testing {

using scenario::AfsInputs;
using scenario::AfsMode;
using scenario::AfsParams;
using scenario::AfsState;
using scenario::AfsStepResult;
using scenario::CopterCommand;

// Deliberately wrong controller for negative tests: GPS handling runs before
// the battery checks, so a GPS recovery can transition to Normal while the
// battery is already below t_rtl.
inline AfsStepResult broken_priority_afs_step(AfsState s, const AfsInputs& in,
                                              const AfsParams& p, int dt) {
  if (s.mode == AfsMode::GpsLossHover) {
    s.gps_lost_streak = in.gps_fix ? 0 : s.gps_lost_streak + dt;
    s.gps_timer += dt;
    if (in.gps_fix) {
      s.mode = AfsMode::Normal;  // resumes the mission, ignoring the battery
      s.gps_timer = 0;
      return {s, CopterCommand::Continue, 0};
    }
    const int window =
        static_cast<int>(p.gps_recovery_window_s * p.periods_per_second);
    if (s.gps_timer >= window) {
      s.mode = AfsMode::FlightTerminatedGps;
      return {s, CopterCommand::Land, 4};
    }
    return {s, CopterCommand::Hover, 4};
  }
  return scenario::afs_step(s, in, p, dt);
}

}  // namespace qparch::testing
