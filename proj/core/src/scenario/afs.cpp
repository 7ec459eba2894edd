#include "qparch/scenario/afs.hpp"

#include <cmath>
#include <stdexcept>

namespace qparch::scenario {

namespace {

bool on_segment(double px, double py, double ax, double ay, double bx, double by) {
  const double cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
  if (std::fabs(cross) > 1e-9) return false;
  return px >= std::min(ax, bx) - 1e-9 && px <= std::max(ax, bx) + 1e-9 &&
         py >= std::min(ay, by) - 1e-9 && py <= std::max(ay, by) + 1e-9;
}

bool point_in_polygon(double px, double py,
                      const std::vector<std::pair<double, double>>& poly) {
  bool inside = false;
  for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto [ax, ay] = poly[j];
    const auto [bx, by] = poly[i];
    if (on_segment(px, py, ax, ay, bx, by)) return true;  // boundary is inside
    if ((ay > py) != (by > py)) {
      const double x_cross = ax + (bx - ax) * (py - ay) / (by - ay);
      if (px < x_cross) inside = !inside;
    }
  }
  return inside;
}

int to_periods(double seconds, int periods_per_second) {
  return static_cast<int>(std::lround(seconds * periods_per_second));
}

}  // namespace

BreachSet fence_check(const Xyz& position, const GeoFence& fence) {
  if (fence.polygon.size() < 3)
    throw std::invalid_argument("fence polygon needs at least 3 vertices");
  BreachSet b;
  b.altitude = position.z > fence.max_altitude;
  b.range = std::hypot(position.x, position.y) > fence.range;
  b.polygon = !point_in_polygon(position.x, position.y, fence.polygon);
  return b;
}

AfsStepResult afs_step(AfsState s, const AfsInputs& in, const AfsParams& p,
                       int dt_periods) {
  const int gps_trigger = to_periods(p.gps_loss_trigger_s, p.periods_per_second);
  const int gps_window = to_periods(p.gps_recovery_window_s, p.periods_per_second);
  const int comm_window = to_periods(p.comm_window_s, p.periods_per_second);
  const int breach_window = to_periods(p.breach_window_s, p.periods_per_second);

  s.gps_lost_streak = in.gps_fix ? 0 : s.gps_lost_streak + dt_periods;

  // battery: highest priority, re-evaluated every step
  if (in.bat_level < p.t_land) {
    s.mode = AfsMode::LandCriticalBattery;
    return {s, CopterCommand::Land, 6};
  }
  if (in.bat_level < p.t_rtl) {
    if (in.gps_fix) {
      s.mode = AfsMode::RtlLowBattery;
      return {s, CopterCommand::ReturnToLaunch, 6};
    }
    s.mode = AfsMode::LandNoGpsLowBattery;
    return {s, CopterCommand::Land, 6};
  }

  // mission-terminating states absorb once battery is quiet
  switch (s.mode) {
    case AfsMode::FlightTerminatedGps:
    case AfsMode::MissionAbandoned:
    case AfsMode::LandCriticalBattery:
    case AfsMode::LandNoGpsLowBattery:
      return {s, CopterCommand::Land, 0};
    case AfsMode::RtlLowBattery:
    case AfsMode::RtlCommUnreliable:
      return {s, CopterCommand::ReturnToLaunch, 0};
    default:
      break;
  }

  // GPS loss
  if (s.mode == AfsMode::GpsLossHover) {
    s.gps_timer += dt_periods;
    if (in.gps_fix) {
      s.mode = AfsMode::Normal;
      s.gps_timer = 0;
      return {s, CopterCommand::Continue, 0};
    }
    if (s.gps_timer >= gps_window) {
      s.mode = AfsMode::FlightTerminatedGps;
      return {s, CopterCommand::Land, 4};
    }
    return {s, CopterCommand::Hover, 4};
  }
  if (s.gps_lost_streak >= gps_trigger) {
    s.gps_loss_count += 1;
    if (s.gps_loss_count >= p.gps_loss_limit) {
      s.mode = AfsMode::MissionAbandoned;
      return {s, CopterCommand::Land, 4};
    }
    s.mode = AfsMode::GpsLossHover;
    s.gps_timer = 0;
    return {s, CopterCommand::Hover, 4};
  }

  // geofence breaches, precedence altitude > polygon > range
  const BreachSet breaches = fence_check(in.position, p.fence);
  const bool in_breach_state = s.mode == AfsMode::AltBreach ||
                               s.mode == AfsMode::RangeBreach ||
                               s.mode == AfsMode::PolygonBreach;
  if (in_breach_state || breaches.any()) {
    if (!breaches.any()) {
      s.mode = AfsMode::Normal;
      s.breach_timer = 0;
      return {s, CopterCommand::Continue, 0};
    }
    const AfsMode breach_mode = breaches.altitude  ? AfsMode::AltBreach
                                : breaches.polygon ? AfsMode::PolygonBreach
                                                   : AfsMode::RangeBreach;
    if (s.mode != breach_mode) {
      s.mode = breach_mode;
      s.breach_timer = 0;
    }
    s.breach_timer += dt_periods;
    const int ann = breach_mode == AfsMode::AltBreach       ? 1
                    : breach_mode == AfsMode::PolygonBreach ? 3
                                                            : 2;
    if (s.breach_timer >= breach_window)
      return {s, CopterCommand::Land, ann};  // correction window expired
    return {s, CopterCommand::CorrectBreach, ann};
  }

  // ground-station comm loss, lowest priority
  if (s.mode == AfsMode::CommLossLoiter) {
    s.comm_timer += dt_periods;
    if (in.heartbeat_age <= p.comm_loss_trigger_s) {
      s.comm_strike_count += 1;
      if (s.comm_strike_count >= p.comm_strike_limit) {
        s.mode = AfsMode::RtlCommUnreliable;
        return {s, CopterCommand::ReturnToLaunch, 5};
      }
      s.mode = AfsMode::Normal;
      s.comm_timer = 0;
      return {s, CopterCommand::Continue, 0};
    }
    if (s.comm_timer >= comm_window) {
      s.mode = AfsMode::RtlCommUnreliable;
      return {s, CopterCommand::ReturnToLaunch, 5};
    }
    return {s, CopterCommand::Loiter, 5};
  }
  if (in.heartbeat_age > p.comm_loss_trigger_s) {
    s.mode = AfsMode::CommLossLoiter;
    s.comm_timer = 0;
    return {s, CopterCommand::Loiter, 5};
  }

  s.mode = AfsMode::Normal;
  return {s, CopterCommand::Continue, 0};
}

}  // namespace qparch::scenario
