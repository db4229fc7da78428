#pragma once

// Independent reference implementations used only by the tests. Nothing here
// calls change-statistic code from the library: statistics are counted
// directly from a dense adjacency matrix.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "alaam/effects.hpp"
#include "alaam/network.hpp"

namespace alaam::oracle {

// Dense 0/1 adjacency; adj[i][j] = 1 for an edge (both directions when
// undirected) or an arc i -> j.
using Dense = std::vector<std::vector<int>>;
Dense denseAdjacency(const Network& net);

// z_I(y) counted straight from configurations. y entries are 0, 1 or -1 (NA, counts as 0).
double countStatistic(const EffectSpec& effect, const Network& net, const AttributeTable& attrs,
                      const std::vector<std::int8_t>& y);
std::vector<double> countStatistics(const ModelSpec& spec, const Network& net, const AttributeTable& attrs,
                                    const std::vector<std::int8_t>& y);

// Every outcome state reachable by changing the free nodes of `base`.
struct Enumeration {
  std::vector<std::vector<std::int8_t>> states;
  Eigen::MatrixXd stats;  // one row per state
};
Enumeration enumerate(const ModelSpec& spec, const Network& net, const AttributeTable& attrs,
                      const OutcomeVector& base);

struct ExactMoments {
  double logZ = 0.0;
  Eigen::VectorXd probabilities;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};
ExactMoments exactMoments(const Enumeration& e, const Eigen::VectorXd& theta);

// Central finite-difference gradient of log Z.
Eigen::VectorXd finiteDifferenceGradient(const Enumeration& e, const Eigen::VectorXd& theta, double h = 1e-5);

// Exact maximum-likelihood estimate by damped Newton iterations on the
// enumerated log-likelihood. Returns the gradient norm at the solution in *gradNorm.
Eigen::VectorXd exactMle(const Enumeration& e, const Eigen::VectorXd& observed, Eigen::VectorXd start,
                         double* gradNorm = nullptr);

// Index of a state in the enumeration, for empirical frequency counts.
std::size_t stateIndex(const Enumeration& e, const std::vector<NodeId>& freeNodes,
                       std::span<const std::int8_t> values);

}  // namespace alaam::oracle
