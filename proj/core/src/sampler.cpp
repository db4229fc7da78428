#include "alaam/sampler.hpp"

#include <cassert>
#include <cmath>
#include <ostream>

#include "alaam/error.hpp"
#include "alaam/textio.hpp"

namespace alaam {

ChainState::ChainState(OutcomeVector start, std::vector<double> theta, Rng rng)
    : A(std::move(start)), theta(std::move(theta)), zRelative(this->theta.size(), 0.0), rng(rng),
      scratch(this->theta.size(), 0.0) {}

bool proposeToggle(const Model& model, std::span<const double> theta, OutcomeVector& A, NodeId i,
                   Rng& rng, std::span<double> delta) {
  const bool wasActive = A.isActive(i);
  // Change statistics are defined for 0 -> 1; evaluate at the virtual 0-state.
  if (wasActive) A.toggle(i);
  model.changeStatistics(A.values(), i, delta);
  if (wasActive) A.toggle(i);

  double logRatio = 0.0;
  for (std::size_t k = 0; k < delta.size(); ++k) {
    if (wasActive) delta[k] = -delta[k];
    logRatio += theta[k] * delta[k];
  }
  return logRatio >= 0.0 || rng.uniform01() < std::exp(logRatio);
}

bool metropolisStep(const Model& model, ChainState& s) {
  auto freeNodes = s.A.freeNodes();
  assert(!freeNodes.empty());
  const NodeId i = freeNodes[s.rng.uniformIndex(freeNodes.size())];
  ++s.proposalCount;
  if (!proposeToggle(model, s.theta, s.A, i, s.rng, s.scratch)) return false;
  s.A.toggle(i);
  for (std::size_t k = 0; k < s.zRelative.size(); ++k) s.zRelative[k] += s.scratch[k];
  ++s.acceptCount;
  return true;
}

void runChain(const Model& model, ChainState& state, std::uint64_t steps) {
  if (steps == 0) return;
  if (state.A.freeNodes().empty()) {
    throw Error("cannot sample: the outcome vector has no free nodes");
  }
  for (std::uint64_t t = 0; t < steps; ++t) metropolisStep(model, state);
}

SimOptions SimOptions::defaultsFor(NodeId nodeCount) {
  const auto n = static_cast<std::uint64_t>(nodeCount);
  return SimOptions{1000 * n, 10 * n, 100};
}

void SimOptions::validate() const {
  if (interval < 1) throw Error("simulation interval must be at least 1");
}

std::vector<SimSample> simulateOutcomes(const Model& model, std::span<const double> theta,
                                        const SimOptions& opts, const OutcomeVector& init,
                                        std::uint64_t seed, std::uint64_t stream) {
  opts.validate();
  std::vector<SimSample> out;
  if (opts.sampleCount == 0) return out;
  if (theta.size() != model.size()) throw Error("theta length does not match the model");

  const auto z0 = model.observedStatistics(init);
  ChainState state(init, std::vector<double>(theta.begin(), theta.end()), Rng(seed, stream));
  runChain(model, state, opts.burnin);
  out.reserve(opts.sampleCount);
  for (std::uint64_t s = 0; s < opts.sampleCount; ++s) {
    const auto acceptedBefore = state.acceptCount;
    runChain(model, state, opts.interval);
    SimSample sample;
    sample.t = state.proposalCount;
    sample.stats.resize(z0.size());
    for (std::size_t k = 0; k < z0.size(); ++k) sample.stats[k] = z0[k] + state.zRelative[k];
    sample.acceptRate = double(state.acceptCount - acceptedBefore) / double(opts.interval);
    out.push_back(std::move(sample));
  }
  return out;
}

void writeSimulationCsv(std::ostream& out, const std::vector<std::string>& names,
                        const std::vector<SimSample>& samples) {
  out << "t";
  for (const auto& n : names) out << ',' << n;
  out << ",acceptRate\n";
  for (const auto& s : samples) {
    out << s.t;
    for (double v : s.stats) out << ',' << textio::formatDouble(v);
    out << ',' << textio::formatDouble(s.acceptRate) << '\n';
  }
}

}  // namespace alaam
