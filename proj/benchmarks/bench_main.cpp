#include <benchmark/benchmark.h>

#include <vector>

#include "alaam/effects.hpp"
#include "alaam/sampler.hpp"
#include "alaam/study.hpp"

using namespace alaam;

namespace {

struct Fixture {
  Network net;
  AttributeTable attrs;
  Model model;
  OutcomeVector y;

  Fixture(NodeId n, const std::string& effects)
      : net(erdosRenyi(NetworkKind::Undirected, n, 8.0, 1)),
        attrs(generateSyntheticAttributes(net, 2)),
        model(parseModel(effects, NetworkKind::Undirected, attrs), net, attrs),
        y(bindOutcome(net, OutcomeVector::zeros(n))) {}
};

const char* kSimple = "Density,Activity,Contagion,oOb:binaryAttr,oOc:continuousAttr";
const char* kStructural = "Density,Contagion,TriangleT1,TriangleT2,TriangleT3,GWActivity:2.0";

void changeStatistics(benchmark::State& state, const char* effects) {
  const auto n = NodeId(state.range(0));
  Fixture f(n, effects);
  std::vector<double> out(f.model.size());
  NodeId i = 0;
  for (auto _ : state) {
    f.model.changeStatistics(f.y.values(), i, out);
    benchmark::DoNotOptimize(out.data());
    i = (i + 1) % n;
  }
}

void metropolis(benchmark::State& state, const char* effects) {
  const auto n = NodeId(state.range(0));
  Fixture f(n, effects);
  std::vector<double> theta(f.model.size(), 0.0);
  theta[0] = -1.5;
  ChainState chain(f.y, theta, Rng(3));
  for (auto _ : state) benchmark::DoNotOptimize(metropolisStep(f.model, chain));
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK_CAPTURE(changeStatistics, simple, kSimple)->Arg(500)->Arg(5000);
BENCHMARK_CAPTURE(changeStatistics, structural, kStructural)->Arg(500)->Arg(5000);
BENCHMARK_CAPTURE(metropolis, simple, kSimple)->Arg(500)->Arg(5000);
BENCHMARK_CAPTURE(metropolis, structural, kStructural)->Arg(500)->Arg(5000);
BENCHMARK_MAIN();
