#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "alaam/effects.hpp"
#include "alaam/network.hpp"
#include "alaam/rng.hpp"

namespace alaam::fixtures {

// Bernoulli(p) graph. Bipartite graphs use modeA nodes in mode A.
Network randomNetwork(NetworkKind kind, NodeId n, double p, Rng& rng, NodeId modeA = 0);

// Attributes "b" (binary), "x" (continuous), "c" (categorical, 3 levels),
// each with roughly naFraction of values missing.
AttributeTable randomAttributes(NodeId n, Rng& rng, double naFraction = 0.1);

// Outcome with P(1) = incidence and roughly naFraction FixedNA, bound to net.
OutcomeVector randomOutcome(const Network& net, Rng& rng, double incidence, double naFraction = 0.0);

// Every catalogue effect valid for the network kind, using the attribute
// names of randomAttributes.
ModelSpec fullCatalogue(NetworkKind kind);

struct Dataset {
  Network net;
  AttributeTable attrs;
  OutcomeVector outcome;
  std::string model;               // effect tokens
  std::vector<double> trueTheta;   // generating values
};

// Runs a Metropolis chain for burninSweeps * N proposals from a random start.
OutcomeVector simulateOutcome(const Model& model, const std::vector<double>& theta, double startIncidence,
                              std::uint64_t burninSweeps, std::uint64_t seed);

// 50-node directed friendship-like network (five friendship groups,
// reciprocation), covariates alcohol (continuous, 1..5) and sport (binary),
// and a smoking-like outcome generated with positive contagion and alcohol effects.
Dataset lifestyleDataset();
inline constexpr const char* kLifestyleModel = "Density,Contagion,Sender,oOb:sport,oOc:alcohol";

// Small problems for exact-enumeration checks (10 nodes).
struct SmallProblem {
  std::string label;
  Network net;
  AttributeTable attrs;
  OutcomeVector outcome;
  std::string model;
};
std::vector<SmallProblem> smallProblems();

// Writes network.net, outcome.txt and attributes (binary.txt /
// continuous.txt when present) to dir.
void writeDataset(const std::filesystem::path& dir, const Dataset& ds);

}  // namespace alaam::fixtures
