#include "alaam/sa.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "alaam/error.hpp"
#include "alaam/sampler.hpp"
#include "alaam/textio.hpp"

namespace alaam {

int SAConfig::phase1Samples(std::size_t p) const { return M1 > 0 ? M1 : 7 + 3 * static_cast<int>(p); }

int SAConfig::phase2Iterations(int subphase, std::size_t p) const {
  const double n = phase2IterationFactor * std::pow(2.0, 4.0 * (subphase - 1) / 3.0) * (7.0 + double(p));
  return static_cast<int>(std::lround(n));
}

void SAConfig::validate() const {
  if (M1 < 0 || subphases <= 0 || !(a0 > 0.0) || M3 < 2 || sampleIntervalFactor <= 0 || burninFactor < 0 ||
      phase2IterationFactor <= 0 || maxRestarts < 0) {
    throw Error("invalid stochastic approximation settings");
  }
  if (!(tConvergence > 0.0 && tConvergence < 1.0)) throw Error("tConvergence must lie in (0, 1)");
}

Matrix estimateCovariance(const Matrix& samples) {
  const Vector mean = columnMeans(samples);
  const Matrix u = samples.rowwise() - mean.transpose();
  return (u.transpose() * u) / double(samples.rows());
}

Vector defaultInitialTheta(const Model& model, const OutcomeVector& observed) {
  Vector theta = Vector::Zero(static_cast<Eigen::Index>(model.size()));
  if (auto k = model.spec().indexOf(EffectKind::Density)) {
    double active = 0, known = 0;
    for (auto v : observed.values()) {
      if (v == OutcomeVector::kFixedNA) continue;
      ++known;
      active += v == OutcomeVector::kOne ? 1.0 : 0.0;
    }
    if (known > 0) {
      // Keep the logit finite for all-zero / all-one observations.
      const double p = std::clamp(active / known, 0.5 / known, 1.0 - 0.5 / known);
      theta(static_cast<Eigen::Index>(*k)) = std::log(p / (1.0 - p));
    }
  }
  return theta;
}

namespace {

Matrix drawSamples(const Model& model, ChainState& chain, const Vector& zobs, int count,
                   std::uint64_t interval) {
  Matrix z(count, zobs.size());
  for (int s = 0; s < count; ++s) {
    runChain(model, chain, interval);
    for (Eigen::Index k = 0; k < zobs.size(); ++k) z(s, k) = zobs(k) + chain.zRelative[k];
  }
  return z;
}

}  // namespace

SAResult estimateSA(const Model& model, const OutcomeVector& observed, const SAConfig& config,
                    std::optional<Vector> theta0, std::uint64_t seed) {
  config.validate();
  const std::size_t p = model.size();
  const auto n = static_cast<std::uint64_t>(model.network().nodeCount());
  const std::uint64_t interval = static_cast<std::uint64_t>(config.sampleIntervalFactor) * n;

  Vector theta = theta0 ? *theta0 : defaultInitialTheta(model, observed);
  if (theta.size() != static_cast<Eigen::Index>(p)) throw Error("initial theta length does not match the model");
  if (!theta.allFinite()) throw Error("initial theta must be finite");

  SAResult result;
  result.observed = toVector(model.observedStatistics(observed));
  // The chain starts at the observation, so zRelative is z - z_obs throughout.
  ChainState chain(observed, toStd(theta), Rng(seed));

  for (int attempt = 0; attempt <= config.maxRestarts; ++attempt) {
    result.restartsUsed = attempt;
    chain.theta = toStd(theta);

    // Phase 1
    runChain(model, chain, interval);
    const Matrix z1 = drawSamples(model, chain, result.observed, config.phase1Samples(p), interval);
    const auto d1inv = invertIfWellConditioned(estimateCovariance(z1));
    if (!d1inv) throw DegenerateModel("phase 1 statistic covariance is singular; the model may be degenerate");

    // Phase 2
    result.stepSizes.clear();
    double a = config.a0;
    Vector dz(static_cast<Eigen::Index>(p));
    for (int k = 1; k <= config.subphases; ++k) {
      result.stepSizes.push_back(a);
      const int iterations = config.phase2Iterations(k, p);
      for (int it = 0; it < iterations; ++it) {
        runChain(model, chain, interval);
        for (std::size_t j = 0; j < p; ++j) dz(static_cast<Eigen::Index>(j)) = chain.zRelative[j];
        theta -= a * (*d1inv) * dz;
        if (!theta.allFinite()) throw Diverged("stochastic approximation produced a non-finite theta");
        chain.theta = toStd(theta);
      }
      a /= 2.0;
    }

    // Phase 3
    runChain(model, chain, static_cast<std::uint64_t>(config.phase3BurninFactor()) * n);
    result.phase3Samples = drawSamples(model, chain, result.observed, config.M3, interval);
    result.statCovariance = estimateCovariance(result.phase3Samples);
    auto d3inv = invertIfWellConditioned(result.statCovariance);
    if (!d3inv) throw DegenerateModel("phase 3 statistic covariance is singular; the model may be degenerate");

    result.theta = theta;
    result.covMatrix = *d3inv;
    result.stdError = d3inv->diagonal().cwiseMax(0.0).cwiseSqrt();
    result.tRatios = tRatios(result.phase3Samples, result.observed);
    result.converged = true;
    for (Eigen::Index k = 0; k < result.tRatios.size(); ++k) {
      if (!(std::abs(result.tRatios(k)) < config.tConvergence)) result.converged = false;
    }
    if (result.converged) break;
  }
  return result;
}

void writeSAReport(std::ostream& out, const std::vector<std::string>& names, const SAResult& r) {
  std::size_t width = 8;
  for (const auto& n : names) width = std::max(width, n.size() + 2);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %12s %12s %10s\n", int(width), "Effect", "Estimate", "StdError", "t-ratio");
  out << buf;
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const bool star = std::abs(r.theta(i) / r.stdError(i)) > 1.96;
    std::snprintf(buf, sizeof buf, "%-*s %12.6f %12.6f %10.4f %s\n", int(width), names[k].c_str(), r.theta(i),
                  r.stdError(i), r.tRatios(i), star ? "*" : "");
    out << buf;
  }
  out << (r.converged ? "converged" : "NOT converged") << " (restarts used: " << r.restartsUsed << ")\n";
}

void writeSACsv(std::ostream& out, const std::vector<std::string>& names, const SAResult& r) {
  out << "effect,estimate,stdError,tRatio,significant\n";
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const bool star = std::abs(r.theta(i) / r.stdError(i)) > 1.96;
    out << names[k] << ',' << textio::formatDouble(r.theta(i)) << ',' << textio::formatDouble(r.stdError(i)) << ','
        << textio::formatDouble(r.tRatios(i)) << ',' << (star ? 1 : 0) << '\n';
  }
}

}  // namespace alaam
