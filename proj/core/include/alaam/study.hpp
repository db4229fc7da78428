#pragma once

// Simulation-study harness: simulate outcome vectors from a known model on a
// fixed network, re-estimate each one, and report bias, RMSE, coverage and
// Type I / Type II error rates with Wilson score intervals.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "alaam/ee.hpp"
#include "alaam/network.hpp"
#include "alaam/sa.hpp"

namespace alaam {

// G(n, p) with p = meanDegree / (n - 1); per unordered pair (undirected) or
// ordered pair (directed).
Network erdosRenyi(NetworkKind kind, NodeId n, double meanDegree, std::uint64_t seed);

// "binaryAttr": exactly floor(N/2) ones at uniformly random nodes.
// "continuousAttr": i.i.d. standard normal.
AttributeTable generateSyntheticAttributes(const Network& net, std::uint64_t seed);

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
};

WilsonInterval wilsonInterval(int successes, int trials, double confidence = 0.95);

// Runs fn(0..count-1) on up to `threads` workers. Results must be keyed by
// index; the first exception thrown by any task is rethrown.
void parallelFor(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

enum class Estimator { SA, EE };

struct NullArm {
  std::string effect;  // effect name whose generating value is set to 0
  std::vector<std::pair<std::string, double>> overrides;  // other effects to change in this arm
};

struct StudyConfig {
  std::optional<std::filesystem::path> networkFile;
  NetworkKind kind = NetworkKind::Undirected;
  NodeId nodes = 500;
  double meanDegree = 8.0;
  std::string model;         // effect tokens; synthetic attributes are binaryAttr / continuousAttr
  std::vector<double> theta;  // generating values, ordered as the model
  int sampleCount = 20;
  int runsPerSample = 20;     // EE runs pooled per sample (SA uses one run)
  Estimator estimator = Estimator::EE;
  std::vector<NullArm> nullArms;
  std::uint64_t seed = 1;
  EEConfig ee;
  SAConfig sa;
  int threads = 1;
  int outcomeBurninFactor = 1000;  // generating-chain burn-in, in multiples of N
  double initialIncidence = 0.15;  // generating chains start from this random incidence

  void validate() const;
};

struct StudyRow {
  std::string arm;  // "main" or the nulled effect
  std::string effect;
  double trueValue = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  bool falsePositiveRate = false;  // true: FPR (trueValue == 0), false: FNR
  double rate = 0.0;               // percent
  double rateLow = 0.0;            // Wilson 95% bounds, percent
  double rateHigh = 0.0;
  double coverage = 0.0;           // percent
  int samplesConverged = 0;
  double meanRunsConverged = 0.0;
  int runsPerSample = 0;
  double biasMcse = 0.0;           // Monte Carlo standard error of the bias
};

struct StudyReport {
  std::vector<StudyRow> mainRows;  // one per effect
  std::vector<StudyRow> nullRows;  // one per null arm
};

StudyReport runStudy(const StudyConfig& config);

// "effect,bias,RMSE,rate,rateCILow,rateCIHigh,coverage,samplesConverged,meanRunsConverged,runsPerSample"
void writeStudyCsv(std::ostream& out, const std::vector<StudyRow>& rows);

}  // namespace alaam
