#include <benchmark/benchmark.h>

#include "qparch/adl/parser.hpp"
#include "qparch/adl/printer.hpp"
#include "qparch/adl/validate.hpp"
#include "qparch/analysis/bounds.hpp"
#include "qparch/monitor/checks.hpp"
#include "qparch/monitor/query.hpp"
#include "qparch/scenario/registry.hpp"
#include "qparch/sim/engine.hpp"
#include "qparch/support/hash.hpp"

namespace {

using namespace qparch;

const std::string& thermostat_source() {
  return scenario::default_architecture("thermostat");
}

adl::ArchitectureSpec thermostat_spec() {
  return *adl::parse_architecture(thermostat_source(), "thermostat").spec;
}

sim::Trace simulate(Micros horizon, std::uint64_t seed) {
  static const adl::ArchitectureSpec spec = thermostat_spec();
  auto bound = scenario::bind_scenario("thermostat", spec, {});
  sim::SimConfig cfg;
  cfg.seed = seed;
  cfg.horizon = horizon;
  return sim::run(spec, bound.bindings, cfg,
                  to_hex(fnv1a64(thermostat_source())));
}

void BM_ParseArchitecture(benchmark::State& state) {
  const std::string& source = thermostat_source();
  for (auto _ : state) {
    auto result = adl::parse_architecture(source, "thermostat");
    benchmark::DoNotOptimize(result);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(source.size()));
}
BENCHMARK(BM_ParseArchitecture);

void BM_ValidateAndAnalyze(benchmark::State& state) {
  const adl::ArchitectureSpec spec = thermostat_spec();
  for (auto _ : state) {
    auto report = adl::validate(spec);
    auto channels = analysis::analyze(spec);
    benchmark::DoNotOptimize(report);
    benchmark::DoNotOptimize(channels);
  }
}
BENCHMARK(BM_ValidateAndAnalyze);

void BM_PrettyPrintRoundTrip(benchmark::State& state) {
  const adl::ArchitectureSpec spec = thermostat_spec();
  for (auto _ : state) {
    std::string printed = adl::pretty_print(spec);
    auto reparsed = adl::parse_architecture(printed, "thermostat");
    benchmark::DoNotOptimize(reparsed);
  }
}
BENCHMARK(BM_PrettyPrintRoundTrip);

void BM_SimulateSecond(benchmark::State& state) {
  const Micros horizon = state.range(0) * kUsecPerSec;
  std::uint64_t seed = 0;
  size_t events = 0;
  for (auto _ : state) {
    sim::Trace trace = simulate(horizon, seed++);
    events = trace.events.size();
    benchmark::DoNotOptimize(trace);
  }
  state.counters["events"] = static_cast<double>(events);
}
BENCHMARK(BM_SimulateSecond)->Arg(1)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_MonitorTrace(benchmark::State& state) {
  const adl::ArchitectureSpec spec = thermostat_spec();
  const auto channels = analysis::analyze(spec);
  const sim::Trace trace = simulate(state.range(0) * kUsecPerSec, 1);
  for (auto _ : state) {
    auto report = monitor::monitor(trace, channels);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_MonitorTrace)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_TraceSerialize(benchmark::State& state) {
  const sim::Trace trace = simulate(10 * kUsecPerSec, 1);
  size_t bytes = 0;
  for (auto _ : state) {
    std::string text = trace.serialize();
    bytes = text.size();
    benchmark::DoNotOptimize(text);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(bytes));
}
BENCHMARK(BM_TraceSerialize);

void BM_QueryEval(benchmark::State& state) {
  const sim::Trace trace = simulate(state.range(0) * kUsecPerSec, 1);
  auto query = monitor::parse_query(
      "(query thermostat (=> (= prev_switch_on 0) true))");
  auto plain = monitor::unfold_query(*query, 50 * kUsecPerMsec).plain;
  for (auto _ : state) {
    auto outcome = monitor::eval_query(trace, plain);
    benchmark::DoNotOptimize(outcome);
  }
}
BENCHMARK(BM_QueryEval)->Arg(10)->Arg(60);

}  // namespace

BENCHMARK_MAIN();
