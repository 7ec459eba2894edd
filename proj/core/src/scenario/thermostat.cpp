#include "qparch/scenario/thermostat.hpp"

#include <stdexcept>

namespace qparch::scenario {

bool thermostat_step(bool prev_command, double sensed_temp, double set_temp,
                     double tolerance, bool switch_status) {
  if (sensed_temp > set_temp + tolerance) return false;
  if (switch_status && sensed_temp < set_temp) return true;
  return switch_status ? prev_command : false;
}

double house_step(double temp, bool heater_on, double dt_seconds,
                  const ThermoParams& p, sim::Rng& rng) {
  if (dt_seconds <= 0) throw std::invalid_argument("dt must be positive");
  if (heater_on)
    return temp + rng.real_between(p.rho_min * dt_seconds, p.rho_max * dt_seconds);
  return temp + rng.real_between(-p.rho_max * dt_seconds, 0.0);
}

double thermometer_step(double true_temp, double epsilon, sim::Rng& rng) {
  if (epsilon < 0) throw std::invalid_argument("epsilon must be >= 0");
  if (epsilon == 0) return true_temp;
  return true_temp + rng.real_between(-epsilon, epsilon);
}

MarginCheck regulation_margin(const ThermoParams& p, double tau_seconds) {
  MarginCheck check;
  if (!(p.low < p.high)) check.violated.push_back("low < high");
  if (!(p.delta > 0)) check.violated.push_back("delta > 0");
  if (!(p.epsilon >= 0)) check.violated.push_back("epsilon >= 0");
  if (!(0 < p.rho_min && p.rho_min < p.rho_max))
    check.violated.push_back("0 < rho_min < rho_max");
  if (!(p.delta >= p.epsilon + p.rho_max * tau_seconds))
    check.violated.push_back("delta >= epsilon + rho_max*tau");
  if (!(p.gamma() > 2 * p.epsilon)) check.violated.push_back("gamma > 2*epsilon");
  check.safe = check.violated.empty();
  return check;
}

double convergence_time(const ThermoParams& p, double tau_seconds) {
  if (p.theta0 >= p.low) return tau_seconds;
  return tau_seconds +
         (p.low - p.theta0 + p.rho_max * tau_seconds) / p.rho_min;
}

double min_toggle_gap(const ThermoParams& p) {
  return (p.gamma() - 2 * p.epsilon) / p.rho_max;
}

}  // namespace qparch::scenario
