#pragma once

// Simplified equilibrium-expectation estimation.
//
// The chain starts at the observed outcome and is never reset. Each EE
// iteration runs Ms Metropolis steps, adds the accepted change statistics to
// d_z (which therefore equals z - z_obs, so z_obs is never computed) and
// updates every parameter component by
//
//   theta <- theta - sign(d_z) * r * max(|theta|, c).
//
// The starting theta comes from Algorithm S, the same update driven by
// proposals evaluated against the observation without ever moving the chain
// (contrastive divergence).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alaam/effects.hpp"
#include "alaam/linalg.hpp"
#include "alaam/network.hpp"
#include "alaam/rng.hpp"

namespace alaam {

struct EEConfig {
  int Ms = 1000;
  int Mee = 50000;
  double r = 0.01;
  double c = 0.01;
  int burninIters = 1000;
  int thinInterval = 100;
  int initSteps = 100;
  double maxAbsTheta = 1e10;
  double dzRatioLimit = 0.3;

  // Retained iterations after burn-in and thinning.
  int Nm() const { return (Mee - burninIters) / thinInterval; }
  void validate() const;
};

enum class FailReason { None, Diverged, DegenerateModel, NotConverged, InsufficientData };

std::string_view toString(FailReason reason);
FailReason parseFailReason(std::string_view text);

struct EEChain {
  Vector theta0;        // Algorithm S result, the state before row 0
  Matrix thetaTrace;    // completed iterations x p, theta after each update
  Matrix dzTrace;       // completed iterations x p, d_z used by each update
  std::vector<double> acceptanceRates;
  bool failed = false;
  FailReason failReason = FailReason::None;

  Eigen::Index iterations() const { return thetaTrace.rows(); }
};

// One EE update, componentwise. sign(0) = 0 leaves the component unchanged.
void eeUpdate(Vector& theta, const Vector& dz, double r, double c);

// initSteps contrastive-divergence updates from theta = 0, each driven by
// Ms proposals evaluated against `observed`; the outcome is never changed.
Vector algorithmS(const Model& model, const OutcomeVector& observed, const EEConfig& config, Rng& rng);

// Mee EE iterations continuing one chain that starts at `observed`.
EEChain runEEFrom(const Model& model, const OutcomeVector& observed, const EEConfig& config, Vector theta0,
                  Rng& rng);

// Algorithm S followed by runEEFrom, both driven by Rng(seed, runIndex).
EEChain runEE(const Model& model, const OutcomeVector& observed, const EEConfig& config, std::uint64_t seed,
              std::uint64_t runIndex = 0);

struct BatchMeans {
  Vector mean;
  Matrix sigma;
  int batchSize = 0;
  int batchCount = 0;
};

// Multivariate batch means, batch size floor(sqrt(n)), trailing remainder
// dropped: Sigma = b/(a-1) sum_k (Ybar_k - Ybar)(Ybar_k - Ybar)'.
// Throws InsufficientData when fewer than two batches fit.
BatchMeans batchMeansCov(const Matrix& trace);

struct RunEstimate {
  Vector theta;
  Vector stdError;
  Matrix T;  // batch-means covariance of the theta chain
  Matrix V;  // batch-means covariance of the d_z chain
  Matrix W;  // T / Nm + (V / Nm)^-1
  Vector dzRatio;  // mean(d_z) / sd(d_z) after thinning
  int Nm = 0;
  bool converged = false;
  FailReason failReason = FailReason::None;
};

// Thins both traces (drop burninIters, keep every thinInterval-th) and
// summarises them. Never throws for statistical failures; they are reported
// through converged / failReason.
RunEstimate summarizeRun(const EEChain& chain, const EEConfig& config);

// Per-run trace: header "t,theta_<e>...,dz_<e>...,acceptRate".
void writeRunCsv(std::ostream& out, const std::vector<std::string>& names, const EEChain& chain);
// Reads a trace back. Fills names from the header.
EEChain readRunCsv(std::istream& in, std::vector<std::string>& names);

// Sidecar status line: "converged=<0|1> failReason=<reason>".
void writeRunStatus(std::ostream& out, bool converged, FailReason reason);
std::pair<bool, FailReason> readRunStatus(std::istream& in);

}  // namespace alaam
