#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qparch/adl/ast.hpp"
#include "qparch/scenario/afs.hpp"
#include "qparch/scenario/script.hpp"
#include "qparch/scenario/thermostat.hpp"
#include "qparch/sim/engine.hpp"

namespace qparch::scenario {

struct ScenarioOptions {
  InputScript script;
};

// Bound step functions for one run; bindings point into owned.
struct ScenarioRun {
  std::string reference_node;  // query step indexing binds to this node
  std::vector<std::unique_ptr<sim::StepFunction>> owned;
  sim::StepBindings bindings;
};

std::vector<std::string> scenario_names();
bool has_scenario(const std::string& name);

// Canonical architecture source for a scenario (also shipped as a fixture).
const std::string& default_architecture(const std::string& name);

// Binds the named scenario against a parsed spec. Throws std::runtime_error
// when the architecture lacks the nodes/subscriptions the scenario drives.
ScenarioRun bind_scenario(const std::string& name,
                          const adl::ArchitectureSpec& spec,
                          const ScenarioOptions& opts);

ScenarioRun bind_thermostat(const adl::ArchitectureSpec& spec,
                            const ThermoParams& params,
                            const ScenarioOptions& opts);

using AfsStepFn =
    std::function<AfsStepResult(AfsState, const AfsInputs&, const AfsParams&, int)>;

// stepper defaults to afs_step; tests substitute deliberately broken variants.
ScenarioRun bind_afs(const adl::ArchitectureSpec& spec, const AfsParams& params,
                     const ScenarioOptions& opts, AfsStepFn stepper = nullptr);

}  // namespace qparch::scenario
