#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qparch/monitor/query.hpp"
#include "support/broken_afs.hpp"
#include "support/query_oracle.hpp"
#include "support/test_util.hpp"

using namespace qparch;
using namespace qparch::scenario;

TEST_CASE("thermostat_step: off above, on below, hold between") {
  // sensed=80, set=75, tol=2: first branch
  CHECK_FALSE(thermostat_step(true, 80, 75, 2, true));
  // status on, sensed below set
  CHECK(thermostat_step(false, 70, 75, 2, true));
  // neither branch: previous command held while the master switch is on
  CHECK(thermostat_step(true, 75.5, 75, 2, true));
  CHECK_FALSE(thermostat_step(false, 75.5, 75, 2, true));
  // master switch down: never on in the hold branch
  CHECK_FALSE(thermostat_step(true, 75.5, 75, 2, false));
  CHECK_FALSE(thermostat_step(true, 70, 75, 2, false));
}

TEST_CASE("house_step respects the rate envelope") {
  ThermoParams p;  // rho_min 0.5, rho_max 1.0
  sim::Rng rng(4);
  for (int i = 0; i < 10000; ++i) {
    double up = house_step(70.0, true, 0.1, p, rng) - 70.0;
    CHECK(up >= 0.05 - 1e-12);
    CHECK(up <= 0.1 + 1e-12);
    double down = house_step(70.0, false, 0.1, p, rng) - 70.0;
    CHECK(down <= 0.0 + 1e-12);
    CHECK(down >= -0.1 - 1e-12);
  }
  CHECK_THROWS_AS(house_step(70.0, true, 0.0, p, rng), std::invalid_argument);
}

TEST_CASE("thermometer_step stays in the error band") {
  sim::Rng rng(4);
  CHECK(thermometer_step(70.0, 0.0, rng) == 70.0);
  for (int i = 0; i < 10000; ++i) {
    double sensed = thermometer_step(70.0, 0.5, rng);
    CHECK(sensed >= 69.5 - 1e-12);
    CHECK(sensed <= 70.5 + 1e-12);
  }
  CHECK_THROWS_AS(thermometer_step(70.0, -0.1, rng), std::invalid_argument);
}

TEST_CASE("regulation margin: the 0.7 s end-to-end composition is safe") {
  ThermoParams p;  // delta 2, eps 0.5, rho 1
  CHECK(regulation_margin(p, 0.7).safe);  // 2 >= 0.5 + 0.7

  ThermoParams thin = p;
  thin.delta = 0.5;
  auto r = regulation_margin(thin, 0.7);
  CHECK_FALSE(r.safe);

  ThermoParams no_hysteresis = p;
  no_hysteresis.epsilon = no_hysteresis.gamma() / 2;  // gamma == 2*eps
  CHECK_FALSE(regulation_margin(no_hysteresis, 0.0).safe);

  // convergence from 65 with tau 0.7: 0.7 + (70-65+0.7)/0.5 = 12.1 s
  CHECK(convergence_time(p, 0.7) == doctest::Approx(12.1));
  CHECK(min_toggle_gap(p) == doctest::Approx(5.0));
}

TEST_CASE("fence_check: strict boundaries, precedence-ready breach sets") {
  GeoFence fence{100.0, 500.0, {{-600, -100}, {600, -100}, {600, 100}, {-600, 100}}};

  CHECK_FALSE(fence_check({0, 0, 100.0}, fence).any());  // on the ceiling: no breach
  CHECK_FALSE(fence_check({0, 0, 50}, fence).any());     // at home

  auto alt = fence_check({0, 0, 150}, fence);
  CHECK(alt.altitude);
  CHECK_FALSE(alt.range);
  CHECK_FALSE(alt.polygon);

  auto range = fence_check({550, 0, 50}, fence);
  CHECK(range.range);
  CHECK_FALSE(range.polygon);

  auto poly = fence_check({0, 150, 50}, fence);
  CHECK(poly.polygon);
  CHECK_FALSE(poly.range);

  CHECK_FALSE(fence_check({600, 100, 50}, fence).polygon);  // vertex is inside

  GeoFence degenerate{100, 500, {{0, 0}, {1, 1}}};
  CHECK_THROWS_AS(fence_check({0, 0, 0}, degenerate), std::invalid_argument);
}

TEST_CASE("point-in-polygon agrees with a half-plane oracle on a grid") {
  GeoFence fence{1000.0, 10000.0, {{-600, -100}, {600, -100}, {600, 100}, {-600, 100}}};
  for (double x = -700; x <= 700; x += 37.5) {
    for (double y = -150; y <= 150; y += 12.5) {
      const bool inside_oracle =
          x >= -600 && x <= 600 && y >= -100 && y <= 100;  // convex rectangle
      CAPTURE(x);
      CAPTURE(y);
      CHECK(fence_check({x, y, 0}, fence).polygon == !inside_oracle);
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

AfsInputs nominal_inputs() {
  AfsInputs in;
  in.bat_level = 100;
  in.gps_fix = true;
  in.heartbeat_age = 0;
  in.position = {0, 0, 50};
  return in;
}

}  // namespace

TEST_CASE("afs battery transitions and priority over GPS") {
  AfsParams p;  // t_rtl 20, t_land 10
  AfsState s;

  AfsInputs low = nominal_inputs();
  low.bat_level = 19;
  auto r = afs_step(s, low, p);
  CHECK(r.state.mode == AfsMode::RtlLowBattery);
  CHECK(r.command == CopterCommand::ReturnToLaunch);
  CHECK(r.annunciation == 6);

  AfsInputs critical = nominal_inputs();
  critical.bat_level = 9;
  CHECK(afs_step(s, critical, p).state.mode == AfsMode::LandCriticalBattery);

  // gps lost for 3s AND battery low: the battery transition is taken
  AfsState lost;
  lost.gps_lost_streak = 30;
  AfsInputs both = nominal_inputs();
  both.bat_level = 15;
  both.gps_fix = false;
  auto taken = afs_step(lost, both, p);
  CHECK(taken.state.mode == AfsMode::LandNoGpsLowBattery);
  CHECK(taken.command == CopterCommand::Land);
}

TEST_CASE("afs breach precedence: altitude over polygon over range") {
  AfsParams p;
  AfsState s;
  AfsInputs in = nominal_inputs();

  in.position = {550, 0, 150};  // altitude and range simultaneously
  CHECK(afs_step(s, in, p).state.mode == AfsMode::AltBreach);

  in.position = {0, 150, 150};  // altitude and polygon
  CHECK(afs_step(s, in, p).state.mode == AfsMode::AltBreach);

  in.position = {650, 150, 50};  // polygon and range
  CHECK(afs_step(s, in, p).state.mode == AfsMode::PolygonBreach);

  in.position = {550, 0, 50};  // range only
  CHECK(afs_step(s, in, p).state.mode == AfsMode::RangeBreach);
}

TEST_CASE("afs gps timers: hover, recovery, termination, abandonment") {
  AfsParams p;
  AfsState s;
  AfsInputs lost = nominal_inputs();
  lost.gps_fix = false;

  // 29 lost periods: still normal; the 30th enters the hover
  for (int i = 0; i < 29; ++i) {
    auto r = afs_step(s, lost, p);
    s = r.state;
    CHECK(s.mode == AfsMode::Normal);
  }
  auto r = afs_step(s, lost, p);
  s = r.state;
  CHECK(s.mode == AfsMode::GpsLossHover);
  CHECK(s.gps_loss_count == 1);
  CHECK(r.command == CopterCommand::Hover);

  // recovery within the window resumes the mission
  AfsInputs ok = nominal_inputs();
  auto back = afs_step(s, ok, p);
  CHECK(back.state.mode == AfsMode::Normal);

  // without recovery the 5 s window expires into termination
  AfsState hover = s;
  AfsStepResult last{hover, CopterCommand::Hover, 4};
  for (int i = 0; i < 50; ++i) {
    last = afs_step(last.state, lost, p);
    if (last.state.mode != AfsMode::GpsLossHover) break;
  }
  CHECK(last.state.mode == AfsMode::FlightTerminatedGps);
  CHECK(last.command == CopterCommand::Land);
  // terminal states absorb
  CHECK(afs_step(last.state, ok, p).state.mode == AfsMode::FlightTerminatedGps);

  // the third loss abandons the mission
  AfsState strikes;
  strikes.gps_loss_count = 2;
  strikes.gps_lost_streak = 29;
  auto abandoned = afs_step(strikes, lost, p);
  CHECK(abandoned.state.mode == AfsMode::MissionAbandoned);
}

TEST_CASE("afs comm loss: loiter, strikes, unreliable-comms RTL") {
  AfsParams p;
  AfsState s;
  AfsInputs stale = nominal_inputs();
  stale.heartbeat_age = 3.1;

  auto r = afs_step(s, stale, p);
  CHECK(r.state.mode == AfsMode::CommLossLoiter);
  CHECK(r.command == CopterCommand::Loiter);

  // re-established quickly: back to normal with a strike recorded
  AfsInputs fresh = nominal_inputs();
  auto resumed = afs_step(r.state, fresh, p);
  CHECK(resumed.state.mode == AfsMode::Normal);
  CHECK(resumed.state.comm_strike_count == 1);

  // third strike: comms deemed unreliable
  AfsState two = resumed.state;
  two.comm_strike_count = 2;
  auto loiter = afs_step(two, stale, p);
  REQUIRE(loiter.state.mode == AfsMode::CommLossLoiter);
  auto third = afs_step(loiter.state, fresh, p);
  CHECK(third.state.mode == AfsMode::RtlCommUnreliable);
  CHECK(third.command == CopterCommand::ReturnToLaunch);

  // no re-establishment within 5 s: return to launch as well
  AfsStepResult held{r.state, CopterCommand::Loiter, 5};
  for (int i = 0; i < 60 && held.state.mode == AfsMode::CommLossLoiter; ++i)
    held = afs_step(held.state, stale, p);
  CHECK(held.state.mode == AfsMode::RtlCommUnreliable);
}

TEST_CASE("afs_step is total over a randomized input grid") {
  AfsParams p;
  sim::Rng rng(99);
  for (int iter = 0; iter < 5000; ++iter) {
    AfsState s;
    s.mode = static_cast<AfsMode>(rng.below(12));
    s.gps_lost_streak = static_cast<int>(rng.below(60));
    s.gps_timer = static_cast<int>(rng.below(60));
    s.comm_timer = static_cast<int>(rng.below(60));
    s.breach_timer = static_cast<int>(rng.below(60));
    s.gps_loss_count = static_cast<int>(rng.below(4));
    s.comm_strike_count = static_cast<int>(rng.below(4));
    AfsInputs in;
    in.bat_level = static_cast<double>(rng.below(101));
    in.gps_fix = rng.below(2) == 0;
    in.heartbeat_age = static_cast<double>(rng.below(8));
    in.position = {static_cast<double>(rng.between(-800, 800)),
                   static_cast<double>(rng.between(-200, 200)),
                   static_cast<double>(rng.below(200))};
    auto r = afs_step(s, in, p);
    const int mode = static_cast<int>(r.state.mode);
    CHECK(mode >= 0);
    CHECK(mode <= 11);
    CHECK(r.state.gps_loss_count >= s.gps_loss_count);
  }
}

TEST_CASE("battery dominance: lower-priority triggers never change the outcome") {
  AfsParams p;
  sim::Rng rng(7);
  for (int iter = 0; iter < 2000; ++iter) {
    AfsState s;
    s.mode = static_cast<AfsMode>(rng.below(12));
    s.gps_lost_streak = static_cast<int>(rng.below(60));
    AfsInputs in;
    in.bat_level = static_cast<double>(rng.below(20));  // battery active
    in.gps_fix = rng.below(2) == 0;
    in.heartbeat_age = static_cast<double>(rng.below(8));
    in.position = {static_cast<double>(rng.between(-800, 800)),
                   static_cast<double>(rng.between(-200, 200)),
                   static_cast<double>(rng.below(200))};
    AfsInputs cleared = in;
    cleared.heartbeat_age = 0;
    cleared.position = {0, 0, 50};
    auto with_noise = afs_step(s, in, p);
    auto without = afs_step(s, cleared, p);
    CHECK(with_noise.state.mode == without.state.mode);
    CHECK(with_noise.command == without.command);
  }
}

// ---------------------------------------------------------------------------

TEST_CASE("simulated battery descent: the Sally-style query holds") {
  ScenarioOptions opts;
  opts.script = InputScript::parse_csv(testing::battery_descent_script());
  sim::Trace trace = testing::run_scenario("afs", 1, 20000000, opts);

  auto query = monitor::parse_query(
      "(query afs_function (=> (= prev_bat_level 19) (not (= AFS_State 0))))");
  REQUIRE(query.has_value());
  auto plain = monitor::unfold_query(*query, 100000).plain;
  auto outcome = monitor::eval_query(trace, plain);
  CHECK(outcome.holds);
  CHECK_FALSE(outcome.vacuous);
}

TEST_CASE("pinned battery level: assumption plus state query holds") {
  // drive the failsafe machine with the battery pinned at 19% and evaluate
  // the query under an input assumption pinning the same value
  AfsParams params;
  AfsState state;
  testing::ValuationTrace vt;
  AfsInputs in = nominal_inputs();
  in.bat_level = 19;
  for (int step = 0; step < 40; ++step) {
    auto r = afs_step(state, in, params);
    state = r.state;
    std::map<std::string, sim::Scalar, std::less<>> row;
    row["bat_level"] = sim::Scalar::real(in.bat_level);
    row["AFS_State"] = sim::Scalar::integer(static_cast<int>(state.mode));
    vt.steps.push_back(std::move(row));
  }
  sim::Trace trace = testing::to_sim_trace(vt, "afs_function", 100000);
  auto query = monitor::parse_query(
      "(assume-input afs_function (= bat_level 19))\n"
      "(query afs_function (=> true (not (= AFS_State 0))))");
  REQUIRE(query.has_value());
  auto plain = monitor::unfold_query(*query, 100000).plain;
  auto outcome = monitor::eval_query(trace, plain);
  CHECK(outcome.holds);
  CHECK_FALSE(outcome.vacuous);
}

TEST_CASE("broken priority makes the battery query fail with a counterexample") {
  ScenarioOptions opts;
  opts.script = InputScript::parse_csv(testing::battery_descent_script());

  const std::string& source = default_architecture("afs");
  auto spec = testing::parse_or_die(source, "afs");
  auto run = bind_afs(spec, AfsParams{}, opts, testing::broken_priority_afs_step);
  sim::SimConfig cfg;
  cfg.seed = 1;
  cfg.horizon = 20000000;
  sim::Trace trace = sim::run(spec, run.bindings, cfg, to_hex(fnv1a64(source)));

  auto query = monitor::parse_query(
      "(query afs_function (=> (= prev_bat_level 19) (not (= AFS_State 0))))");
  auto plain = monitor::unfold_query(*query, 100000).plain;
  auto outcome = monitor::eval_query(trace, plain);
  REQUIRE_FALSE(outcome.holds);
  CHECK(outcome.counterexample_step.has_value());
}

TEST_CASE("input scripts: sampling semantics and malformed rows") {
  auto script = InputScript::parse_csv(
      "time_us,variable,value\n0,bat_level,30\n5000000,bat_level,29\n");
  CHECK(script.at("bat_level", 0, sim::Scalar::real(0)).as_real() == 30.0);
  CHECK(script.at("bat_level", 4999999, sim::Scalar::real(0)).as_real() == 30.0);
  CHECK(script.at("bat_level", 5000000, sim::Scalar::real(0)).as_real() == 29.0);
  CHECK(script.at("ghost", 0, sim::Scalar::real(7)).as_real() == 7.0);
  CHECK_THROWS(InputScript::parse_csv("nonsense line\n"));
}

TEST_CASE("thermostat regulation smoke: band containment and toggle gap") {
  ThermoParams params;
  const double tau = 0.7;
  REQUIRE(regulation_margin(params, tau).safe);
  const Micros converged =
      static_cast<Micros>(convergence_time(params, tau) * 1e6);
  const Micros min_gap = static_cast<Micros>(min_toggle_gap(params) * 1e6);

  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    sim::Trace trace = testing::run_scenario("thermostat", seed, 60000000);
    const auto temp_sym = trace.symbols.find("house_data.temp");
    const auto switch_sym = trace.symbols.find("thermostat_data.switch_on");
    const auto house_sym = trace.symbols.find("house");
    const auto stat_sym = trace.symbols.find("thermostat");
    REQUIRE(temp_sym >= 0);
    REQUIRE(switch_sym >= 0);

    std::optional<bool> last_cmd;
    Micros last_toggle = -1;
    for (const auto& e : trace.events) {
      if (e.kind != sim::EventKind::Value) continue;
      if (e.node == house_sym && e.topic == temp_sym && e.seq >= 0 &&
          e.time >= converged) {
        CAPTURE(e.time);
        CHECK(e.value.as_real() >= params.low);
        CHECK(e.value.as_real() <= params.high);
      }
      if (e.node == stat_sym && e.topic == switch_sym && e.seq >= 0) {
        const bool cmd = e.value.truthy();
        if (last_cmd && cmd != *last_cmd) {
          if (last_toggle >= 0) {
            CAPTURE(e.time);
            CHECK(e.time - last_toggle >= min_gap);
          }
          last_toggle = e.time;
        }
        last_cmd = cmd;
      }
    }
  }
}
