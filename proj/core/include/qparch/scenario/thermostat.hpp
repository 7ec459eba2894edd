#pragma once

#include <string>
#include <vector>

#include "qparch/sim/rng.hpp"

namespace qparch::scenario {

// Room temperature regulation parameters. Temperatures in degrees C, rates in
// degrees C per second.
struct ThermoParams {
  double low = 70.0;
  double high = 80.0;
  double delta = 2.0;    // trigger margin: on below low+delta, off above high-delta
  double epsilon = 0.5;  // sensor error band
  double rho_max = 1.0;  // fastest rise/fall rate
  double rho_min = 0.5;  // slowest heating rate, 0 < rho_min < rho_max
  double theta0 = 65.0;  // room temperature at run start

  double gamma() const { return (high - delta) - (low + delta); }  // hysteresis gap
  double set_temp() const { return low + delta; }
  double tolerance() const { return gamma(); }  // off threshold = set + tol
};

// Controller decision for one firing. Off above set+tol, on below set while
// the master switch is up, otherwise the previous command is held (off when
// the master switch is down).
bool thermostat_step(bool prev_command, double sensed_temp, double set_temp,
                     double tolerance, bool switch_status);

// Plant integration over dt seconds: rises within [rho_min*dt, rho_max*dt]
// when heating, falls within [-rho_max*dt, 0] otherwise. dt must be positive.
double house_step(double temp, bool heater_on, double dt_seconds,
                  const ThermoParams& p, sim::Rng& rng);

// Bounded sensor noise: sensed in [true_temp - epsilon, true_temp + epsilon].
double thermometer_step(double true_temp, double epsilon, sim::Rng& rng);

struct MarginCheck {
  bool safe = false;
  std::vector<std::string> violated;  // named inequalities that failed
};

// Safe iff delta >= epsilon + rho_max * tau and gamma > 2 * epsilon, for the
// end-to-end sense->actuate latency tau (seconds).
MarginCheck regulation_margin(const ThermoParams& p, double tau_seconds);

// Seconds from run start until band containment is guaranteed: the heater may
// lag by tau while the room drops rho_max*tau further, then climbs at least
// rho_min per second.
double convergence_time(const ThermoParams& p, double tau_seconds);

// Minimal time between heater toggles under gamma > 2*epsilon.
double min_toggle_gap(const ThermoParams& p);

}  // namespace qparch::scenario
