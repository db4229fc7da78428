#pragma once

// Basic ALAAM sampler: pick a free node uniformly, propose toggling it, and
// accept with probability min{1, exp(theta . delta)} where delta is the
// signed change statistic of the toggle. The proposal is symmetric, so this
// is a plain Metropolis chain.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "alaam/effects.hpp"
#include "alaam/network.hpp"
#include "alaam/rng.hpp"

namespace alaam {

struct ChainState {
  OutcomeVector A;
  std::vector<double> theta;
  // z(A) - z(A at chain start), maintained incrementally.
  std::vector<double> zRelative;
  std::uint64_t acceptCount = 0;
  std::uint64_t proposalCount = 0;
  Rng rng;
  std::vector<double> scratch;

  ChainState(OutcomeVector start, std::vector<double> theta, Rng rng);
};

// One proposal. Returns true when the toggle was accepted.
bool metropolisStep(const Model& model, ChainState& state);

// Exactly `steps` calls to metropolisStep.
void runChain(const Model& model, ChainState& state, std::uint64_t steps);

// Evaluates a toggle proposal without applying it: returns the signed
// change-statistic vector in `delta` and whether the proposal is accepted.
// Used by contrastive-divergence style updates that never move the chain.
bool proposeToggle(const Model& model, std::span<const double> theta, OutcomeVector& A, NodeId i,
                   Rng& rng, std::span<double> delta);

struct SimOptions {
  std::uint64_t burnin = 0;
  std::uint64_t interval = 1;
  std::uint64_t sampleCount = 0;

  // burnin 1000 N, interval 10 N, 100 samples.
  static SimOptions defaultsFor(NodeId nodeCount);
  void validate() const;
};

struct SimSample {
  std::uint64_t t = 0;  // proposals made when the sample was taken
  std::vector<double> stats;
  double acceptRate = 0.0;  // over the interval preceding the sample
};

// Simulates from `init` at `theta`. Statistics are absolute: z(init) is
// computed once, then tracked from accepted change statistics.
std::vector<SimSample> simulateOutcomes(const Model& model, std::span<const double> theta,
                                        const SimOptions& opts, const OutcomeVector& init,
                                        std::uint64_t seed, std::uint64_t stream = 0);

// Header "t,<effect names...>,acceptRate", one row per sample.
void writeSimulationCsv(std::ostream& out, const std::vector<std::string>& names,
                        const std::vector<SimSample>& samples);

}  // namespace alaam
