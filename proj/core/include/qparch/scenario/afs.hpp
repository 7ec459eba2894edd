#pragma once

#include <utility>
#include <vector>

namespace qparch::scenario {

// Contingency states of the failsafe monitor. Integer codes appear in traces
// and queries; Normal must be 0.
enum class AfsMode : int {
  Normal = 0,
  AltBreach = 1,
  RangeBreach = 2,
  PolygonBreach = 3,
  GpsLossHover = 4,
  FlightTerminatedGps = 5,
  MissionAbandoned = 6,
  CommLossLoiter = 7,
  RtlCommUnreliable = 8,
  RtlLowBattery = 9,
  LandNoGpsLowBattery = 10,
  LandCriticalBattery = 11,
};

enum class CopterCommand : int {
  Continue = 0,
  Hover = 1,
  Loiter = 2,
  CorrectBreach = 3,
  ReturnToLaunch = 4,
  Land = 5,
};

// Annunciation codes follow the six contingency kinds: 0 none, 1 altitude,
// 2 range, 3 polygon, 4 gps, 5 comm, 6 battery.

struct Xyz {
  double x = 0, y = 0, z = 0;
};

struct GeoFence {
  double max_altitude = 100.0;
  double range = 500.0;
  std::vector<std::pair<double, double>> polygon;  // inclusion boundary, >= 3 vertices
};

struct BreachSet {
  bool altitude = false;
  bool range = false;
  bool polygon = false;
  bool any() const { return altitude || range || polygon; }
};

// Strict boundaries: sitting exactly on the fence is not a breach. Horizontal
// range is Euclidean distance from home (the origin). The polygon check uses
// ray casting with the boundary counting as inside. Throws on a polygon with
// fewer than 3 vertices.
BreachSet fence_check(const Xyz& position, const GeoFence& fence);

struct AfsParams {
  double t_rtl = 20.0;   // percent; below this, return to launch
  double t_land = 10.0;  // percent; below this, land immediately
  int gps_loss_limit = 3;
  int comm_strike_limit = 3;
  int periods_per_second = 10;  // 100 ms step period
  double gps_loss_trigger_s = 3.0;
  double gps_recovery_window_s = 5.0;
  double comm_loss_trigger_s = 3.0;
  double comm_window_s = 5.0;
  double breach_window_s = 5.0;
  GeoFence fence{100.0, 500.0, {{-600, -100}, {600, -100}, {600, 100}, {-600, 100}}};
};

struct AfsInputs {
  double bat_level = 100.0;
  bool gps_fix = true;
  double heartbeat_age = 0.0;  // seconds since the last ground-station heartbeat
  Xyz position{0, 0, 50};
};

struct AfsState {
  AfsMode mode = AfsMode::Normal;
  int gps_lost_streak = 0;  // consecutive periods without a fix
  int gps_timer = 0;        // periods spent hovering on GPS loss
  int comm_timer = 0;       // periods spent loitering on comm loss
  int breach_timer = 0;     // periods inside the active breach state
  int gps_loss_count = 0;
  int comm_strike_count = 0;
};

struct AfsStepResult {
  AfsState state;
  CopterCommand command = CopterCommand::Continue;
  int annunciation = 0;
};

// One controller step. Strict priority: battery over GPS over geofence
// breaches (altitude over polygon over range) over comm loss. Timers advance
// in period counts (dt_periods per call); total over the whole input grid.
AfsStepResult afs_step(AfsState state, const AfsInputs& in, const AfsParams& p,
                       int dt_periods = 1);

}  // namespace qparch::scenario
