#include "qparch/scenario/registry.hpp"

#include <stdexcept>

namespace qparch::scenario {

namespace {

const std::string kThermostatArch = R"(basic_rate : duration 50msec

thermostat_button : topic { FIELDS status : bool true }
thermostat_set : topic { FIELDS temp : float32 72 }
thermometer_data : topic { FIELDS temp : float32 65 }
thermostat_data : topic { FIELDS switch_on : bool true }
heater_data : topic { FIELDS on : bool true }
house_data : topic { FIELDS temp : float32 65 }

button : node {
  PUBLISHES
    button_state { TOPIC thermostat_button }
    set_point { TOPIC thermostat_set }
  PERIOD basic_rate
}

thermometer : node {
  SUBSCRIBES
    room { TOPIC house_data MAXLATENCY 1msec }
  PUBLISHES
    sample { TOPIC thermometer_data }
  PERIOD basic_rate
}

thermostat : node {
  SUBSCRIBES
    thermometer_temp { TOPIC thermometer_data MAXLATENCY 1msec }
    thermostat_switch { TOPIC thermostat_button MAXLATENCY 1msec }
    thermostat_set_temp { TOPIC thermostat_set MAXLATENCY 1msec }
  PUBLISHES
    heater_switch { TOPIC thermostat_data }
  PERIOD basic_rate
}

heater : node {
  SUBSCRIBES
    command { TOPIC thermostat_data MAXLATENCY 1msec }
  PUBLISHES
    actuator_state { TOPIC heater_data }
  PERIOD basic_rate
}

house : node {
  SUBSCRIBES
    heater_state { TOPIC heater_data MAXLATENCY 1msec }
  PUBLISHES
    room_temp { TOPIC house_data }
  PERIOD basic_rate
}
)";

const std::string kAfsArch = R"(afs_sensors : topic {
  FIELDS
    bat_level : float32 100
    gps_fix : bool true
    heartbeat_age : float32 0
    pos_x : float32 0
    pos_y : float32 0
    pos_z : float32 50
}

afs_status : topic {
  FIELDS
    AFS_State : int32 0
    copter_command : int32 0
    annunciation : int32 0
}

afs_gateway : node {
  SUBSCRIBES
    commands { TOPIC afs_status MAXLATENCY 10msec }
  PUBLISHES
    sensors { TOPIC afs_sensors }
  PERIOD 95msec .. 105msec
}

afs_function : node {
  SUBSCRIBES
    sensors { TOPIC afs_sensors MAXLATENCY 10msec }
  PUBLISHES
    status { TOPIC afs_status }
  PERIOD 95msec .. 105msec
}
)";

void require_node(const adl::ArchitectureSpec& spec, const std::string& node,
                  std::initializer_list<const char*> subscriptions,
                  std::initializer_list<const char*> publications) {
  const adl::NodeSpec* n = spec.node(node);
  if (!n) throw std::runtime_error("scenario needs node '" + node + "'");
  for (const char* s : subscriptions)
    if (!n->subscription(s))
      throw std::runtime_error("node '" + node + "' needs subscription '" +
                               std::string(s) + "'");
  for (const char* p : publications)
    if (!n->publication(p))
      throw std::runtime_error("node '" + node + "' needs publication '" +
                               std::string(p) + "'");
}

// --- thermostat system ------------------------------------------------------

class ButtonNode : public sim::StepFunction {
 public:
  ButtonNode(const ThermoParams& p, const InputScript* script)
      : params_(p), script_(script) {}

  void step(sim::StepContext& ctx) override {
    const bool status =
        script_->at("switch_status", ctx.now(), sim::Scalar::boolean(true)).truthy();
    const double set = script_
                           ->at("set_temp", ctx.now(),
                                sim::Scalar::real(params_.set_temp()))
                           .as_real();
    ctx.out("button_state").set("status", sim::Scalar::boolean(status));
    ctx.out("set_point").set("temp", sim::Scalar::real(set));
  }

 private:
  ThermoParams params_;
  const InputScript* script_;
};

class ThermometerNode : public sim::StepFunction {
 public:
  explicit ThermometerNode(const ThermoParams& p) : params_(p) {}

  void step(sim::StepContext& ctx) override {
    const double true_temp = ctx.in("room").field("temp").as_real();
    const double sensed = thermometer_step(true_temp, params_.epsilon, ctx.rng());
    ctx.out("sample").set("temp", sim::Scalar::real(sensed));
  }

 private:
  ThermoParams params_;
};

class ThermostatNode : public sim::StepFunction {
 public:
  explicit ThermostatNode(const ThermoParams& p)
      : tolerance_(p.tolerance()), command_(true) {}

  void step(sim::StepContext& ctx) override {
    const double sensed = ctx.in("thermometer_temp").field("temp").as_real();
    const double set = ctx.in("thermostat_set_temp").field("temp").as_real();
    const bool status = ctx.in("thermostat_switch").field("status").truthy();
    command_ = thermostat_step(command_, sensed, set, tolerance_, status);
    ctx.out("heater_switch").set("switch_on", sim::Scalar::boolean(command_));
  }

 private:
  double tolerance_;
  bool command_;  // matches the thermostat_data topic default
};

class HeaterNode : public sim::StepFunction {
 public:
  void step(sim::StepContext& ctx) override {
    const bool on = ctx.in("command").field("switch_on").truthy();
    ctx.out("actuator_state").set("on", sim::Scalar::boolean(on));
  }
};

class HouseNode : public sim::StepFunction {
 public:
  explicit HouseNode(const ThermoParams& p) : params_(p), temp_(p.theta0) {}

  void step(sim::StepContext& ctx) override {
    const bool heater_on = ctx.in("heater_state").field("on").truthy();
    const double dt = static_cast<double>(ctx.dt()) / 1e6;
    temp_ = house_step(temp_, heater_on, dt, params_, ctx.rng());
    ctx.out("room_temp").set("temp", sim::Scalar::real(temp_));
  }

 private:
  ThermoParams params_;
  double temp_;
};

// --- failsafe system --------------------------------------------------------

class AfsGatewayNode : public sim::StepFunction {
 public:
  explicit AfsGatewayNode(const InputScript* script) : script_(script) {}

  void step(sim::StepContext& ctx) override {
    const Micros now = ctx.now();
    const double bat =
        script_->at("bat_level", now, sim::Scalar::real(100.0)).as_real();
    const bool gps =
        script_->at("gps_fix", now, sim::Scalar::boolean(true)).truthy();
    const bool heartbeat_ok =
        script_->at("heartbeat_ok", now, sim::Scalar::boolean(true)).truthy();
    const double dt = static_cast<double>(ctx.dt()) / 1e6;
    heartbeat_age_ = heartbeat_ok ? 0.0 : heartbeat_age_ + dt;

    auto& out = ctx.out("sensors");
    out.set("bat_level", sim::Scalar::real(bat));
    out.set("gps_fix", sim::Scalar::boolean(gps));
    out.set("heartbeat_age", sim::Scalar::real(heartbeat_age_));
    out.set("pos_x", sim::Scalar::real(
                         script_->at("pos_x", now, sim::Scalar::real(0)).as_real()));
    out.set("pos_y", sim::Scalar::real(
                         script_->at("pos_y", now, sim::Scalar::real(0)).as_real()));
    out.set("pos_z", sim::Scalar::real(
                         script_->at("pos_z", now, sim::Scalar::real(50)).as_real()));
  }

 private:
  const InputScript* script_;
  double heartbeat_age_ = 0.0;
};

class AfsFunctionNode : public sim::StepFunction {
 public:
  AfsFunctionNode(const AfsParams& params, AfsStepFn stepper)
      : params_(params), stepper_(std::move(stepper)) {}

  void step(sim::StepContext& ctx) override {
    const auto& in = ctx.in("sensors");
    AfsInputs inputs;
    inputs.bat_level = in.field("bat_level").as_real();
    inputs.gps_fix = in.field("gps_fix").truthy();
    inputs.heartbeat_age = in.field("heartbeat_age").as_real();
    inputs.position = {in.field("pos_x").as_real(), in.field("pos_y").as_real(),
                       in.field("pos_z").as_real()};
    AfsStepResult r = stepper_(state_, inputs, params_, 1);
    state_ = r.state;
    auto& out = ctx.out("status");
    out.set("AFS_State", sim::Scalar::integer(static_cast<int>(state_.mode)));
    out.set("copter_command", sim::Scalar::integer(static_cast<int>(r.command)));
    out.set("annunciation", sim::Scalar::integer(r.annunciation));
  }

 private:
  AfsParams params_;
  AfsStepFn stepper_;
  AfsState state_;
};

struct ScriptHolder : sim::StepFunction {
  explicit ScriptHolder(InputScript s) : script(std::move(s)) {}
  void step(sim::StepContext&) override {}
  InputScript script;
};

}  // namespace

std::vector<std::string> scenario_names() { return {"thermostat", "afs"}; }

bool has_scenario(const std::string& name) {
  return name == "thermostat" || name == "afs";
}

const std::string& default_architecture(const std::string& name) {
  if (name == "thermostat") return kThermostatArch;
  if (name == "afs") return kAfsArch;
  throw std::runtime_error("unknown scenario '" + name + "'");
}

ScenarioRun bind_thermostat(const adl::ArchitectureSpec& spec,
                            const ThermoParams& params,
                            const ScenarioOptions& opts) {
  require_node(spec, "button", {}, {"button_state", "set_point"});
  require_node(spec, "thermometer", {"room"}, {"sample"});
  require_node(spec, "thermostat",
               {"thermometer_temp", "thermostat_switch", "thermostat_set_temp"},
               {"heater_switch"});
  require_node(spec, "heater", {"command"}, {"actuator_state"});
  require_node(spec, "house", {"heater_state"}, {"room_temp"});

  ScenarioRun run;
  run.reference_node = "thermostat";
  // keep the script alive alongside the step functions that sample it
  auto holder = std::make_unique<ScriptHolder>(opts.script);
  const InputScript* script_ptr = &holder->script;
  run.owned.push_back(std::make_unique<ButtonNode>(params, script_ptr));
  run.bindings["button"] = run.owned.back().get();
  run.owned.push_back(std::make_unique<ThermometerNode>(params));
  run.bindings["thermometer"] = run.owned.back().get();
  run.owned.push_back(std::make_unique<ThermostatNode>(params));
  run.bindings["thermostat"] = run.owned.back().get();
  run.owned.push_back(std::make_unique<HeaterNode>());
  run.bindings["heater"] = run.owned.back().get();
  run.owned.push_back(std::make_unique<HouseNode>(params));
  run.bindings["house"] = run.owned.back().get();
  run.owned.push_back(std::move(holder));
  return run;
}

ScenarioRun bind_afs(const adl::ArchitectureSpec& spec, const AfsParams& params,
                     const ScenarioOptions& opts, AfsStepFn stepper) {
  require_node(spec, "afs_gateway", {"commands"}, {"sensors"});
  require_node(spec, "afs_function", {"sensors"}, {"status"});

  if (!stepper)
    stepper = [](AfsState s, const AfsInputs& in, const AfsParams& p, int dt) {
      return afs_step(s, in, p, dt);
    };

  ScenarioRun run;
  run.reference_node = "afs_function";
  auto holder = std::make_unique<ScriptHolder>(opts.script);
  const InputScript* script_ptr = &holder->script;
  run.owned.push_back(std::make_unique<AfsGatewayNode>(script_ptr));
  run.bindings["afs_gateway"] = run.owned.back().get();
  run.owned.push_back(std::make_unique<AfsFunctionNode>(params, std::move(stepper)));
  run.bindings["afs_function"] = run.owned.back().get();
  run.owned.push_back(std::move(holder));
  return run;
}

ScenarioRun bind_scenario(const std::string& name,
                          const adl::ArchitectureSpec& spec,
                          const ScenarioOptions& opts) {
  if (name == "thermostat") return bind_thermostat(spec, ThermoParams{}, opts);
  if (name == "afs") return bind_afs(spec, AfsParams{}, opts, nullptr);
  throw std::runtime_error("unknown scenario '" + name + "'");
}

}  // namespace qparch::scenario
