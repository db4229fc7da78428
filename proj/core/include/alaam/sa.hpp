#pragma once

// Three-phase Robbins-Monro stochastic approximation.
//
//   Phase 1  M1 samples at theta0 give the statistic covariance D.
//   Phase 2  theta <- theta - a D^-1 (z - z_obs), one sample per update, a
//            halved at each subphase.
//   Phase 3  burn-in then M3 samples at the final theta: D again, standard
//            errors sqrt(diag(D^-1)), t-ratios (mean - z_obs) / sd. The fit
//            is converged when every |t| < tConvergence; otherwise the whole
//            procedure restarts from the current theta.
//
// All sampling uses an interval of sampleIntervalFactor * N proposals.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "alaam/effects.hpp"
#include "alaam/linalg.hpp"
#include "alaam/network.hpp"

namespace alaam {

struct SAConfig {
  int M1 = 0;  // 0: 7 + 3p
  int subphases = 5;
  double a0 = 0.01;
  int M3 = 1000;
  int sampleIntervalFactor = 10;
  int burninFactor = 0;  // phase-3 burn-in is burninFactor * N; 0: M3
  // Phase-2 subphase k (1-based) runs
  //   round(phase2IterationFactor * 2^(4(k-1)/3) * (7 + p)) updates.
  int phase2IterationFactor = 10;
  int maxRestarts = 2;
  double tConvergence = 0.1;

  int phase1Samples(std::size_t p) const;
  int phase2Iterations(int subphase, std::size_t p) const;
  int phase3BurninFactor() const { return burninFactor > 0 ? burninFactor : M3; }
  void validate() const;
};

struct SAResult {
  Vector theta;
  Vector stdError;
  Vector tRatios;
  bool converged = false;
  Matrix covMatrix;        // D^-1 from phase 3: covariance of theta
  Matrix statCovariance;   // D from phase 3
  int restartsUsed = 0;
  Vector observed;         // z_obs
  Matrix phase3Samples;    // M3 x p, absolute statistics
  std::vector<double> stepSizes;  // phase-2 gain per subphase (last attempt)
};

// Sample covariance with denominator M: (1/M) U'U, U = rows minus column means.
Matrix estimateCovariance(const Matrix& samples);

// Zeros, except Density at logit(incidence) over non-NA nodes.
Vector defaultInitialTheta(const Model& model, const OutcomeVector& observed);

// Throws DegenerateModel when a phase-1 or phase-3 covariance is singular and
// Diverged when phase 2 produces a non-finite theta.
SAResult estimateSA(const Model& model, const OutcomeVector& observed, const SAConfig& config,
                    std::optional<Vector> theta0, std::uint64_t seed);

// Effect, estimate, standard error, t-ratio, '*' when |estimate/se| > 1.96.
void writeSAReport(std::ostream& out, const std::vector<std::string>& names, const SAResult& result);
void writeSACsv(std::ostream& out, const std::vector<std::string>& names, const SAResult& result);

}  // namespace alaam
