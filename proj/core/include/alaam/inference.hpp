#pragma once

// Pooling of independent EE runs, goodness-of-fit t-ratios and degeneracy
// check simulations.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "alaam/ee.hpp"
#include "alaam/effects.hpp"
#include "alaam/linalg.hpp"
#include "alaam/sampler.hpp"

namespace alaam {

inline constexpr double kZ95 = 1.96;

struct PooledEstimate {
  Vector theta;
  Vector stdError;
  Vector ci95Low;
  Vector ci95High;
  std::vector<bool> significant;  // 0 outside the 95% interval
  int Nc = 0;
  int totalRuns = 0;
};

// Inverse-variance weighted average over the converged runs:
//   theta = sum(theta_j / s_j^2) / sum(1 / s_j^2),  se = 1 / sqrt(sum(1 / s_j^2)).
// Throws NoConvergedRuns when no run converged.
PooledEstimate poolRuns(std::span<const RunEstimate> runs);

// Header "effect,estimate,stdError,ci95Low,ci95High,Nc,totalRuns,significant".
void writePooledCsv(std::ostream& out, const std::vector<std::string>& names, const PooledEstimate& pooled);

struct GofRow {
  std::string effect;
  bool inModel = false;
  double observed = 0.0;
  double simMean = 0.0;
  double simSd = 0.0;
  double tRatio = 0.0;
  bool degenerate = false;  // simulated sd is zero
  bool exceeds = false;     // |t| over the threshold for its block
};

struct GofReport {
  std::vector<GofRow> rows;
  double inModelThreshold = 0.1;
  double outOfModelThreshold = 2.0;
};

// Out-of-model thresholds in common use.
bool isRecognisedGofThreshold(double t);

// t-ratios of every column of `samples` against `observed`.
GofReport gofFromSamples(const Matrix& samples, const Vector& observed, const std::vector<std::string>& names,
                         const std::vector<bool>& inModel, double outOfModelThreshold = 2.0,
                         double inModelThreshold = 0.1);

// Simulates at thetaHat for the fitted model extended by `extra` (extra
// effects carry theta = 0, so they are tracked but do not weight the chain).
// Extra effects already in the fitted model are skipped.
GofReport gofTest(const ModelSpec& fitted, const ModelSpec& extra, const Network& net, const AttributeTable& attrs,
                  const OutcomeVector& observed, std::span<const double> thetaHat, const SimOptions& opts,
                  std::uint64_t seed, double outOfModelThreshold = 2.0);

// Text layout: in-model block, then out-of-model block.
void writeGofReport(std::ostream& out, const GofReport& report);
void writeGofCsv(std::ostream& out, const GofReport& report);

struct DegeneracyRow {
  std::string effect;
  double observed = 0.0;
  double low = 0.0;   // 2.5% simulated quantile
  double high = 0.0;  // 97.5% simulated quantile
  bool inside = false;
};

struct DegeneracyCheck {
  std::vector<SimSample> samples;
  std::vector<DegeneracyRow> rows;
};

// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> values, double q);

DegeneracyCheck degeneracyCheck(const Model& model, const OutcomeVector& observed, std::span<const double> thetaHat,
                                const SimOptions& opts, std::uint64_t seed);

// "effect,observed,low95,high95,inside"
void writeDegeneracySummary(std::ostream& out, const DegeneracyCheck& check);

}  // namespace alaam
