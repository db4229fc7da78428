#include "alaam/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "alaam/error.hpp"
#include "alaam/textio.hpp"

namespace alaam {

PooledEstimate poolRuns(std::span<const RunEstimate> runs) {
  PooledEstimate pooled;
  pooled.totalRuns = static_cast<int>(runs.size());
  Eigen::Index p = -1;
  Vector weightSum, weightedTheta;
  for (const auto& run : runs) {
    if (!run.converged) continue;
    if (p < 0) {
      p = run.theta.size();
      weightSum = Vector::Zero(p);
      weightedTheta = Vector::Zero(p);
    }
    if (run.theta.size() != p) throw Error("runs disagree on the number of parameters");
    const Vector w = run.stdError.array().square().inverse();
    weightSum += w;
    weightedTheta += w.cwiseProduct(run.theta);
    ++pooled.Nc;
  }
  if (pooled.Nc == 0) throw NoConvergedRuns("no converged estimation runs to pool");
  pooled.theta = weightedTheta.cwiseQuotient(weightSum);
  pooled.stdError = weightSum.cwiseSqrt().cwiseInverse();
  pooled.ci95Low = pooled.theta - kZ95 * pooled.stdError;
  pooled.ci95High = pooled.theta + kZ95 * pooled.stdError;
  pooled.significant.resize(static_cast<std::size_t>(p));
  for (Eigen::Index k = 0; k < p; ++k) {
    pooled.significant[k] = !(pooled.ci95Low(k) <= 0.0 && 0.0 <= pooled.ci95High(k));
  }
  return pooled;
}

void writePooledCsv(std::ostream& out, const std::vector<std::string>& names, const PooledEstimate& pooled) {
  using textio::formatDouble;
  out << "effect,estimate,stdError,ci95Low,ci95High,Nc,totalRuns,significant\n";
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out << names[k] << ',' << formatDouble(pooled.theta(i)) << ',' << formatDouble(pooled.stdError(i)) << ','
        << formatDouble(pooled.ci95Low(i)) << ',' << formatDouble(pooled.ci95High(i)) << ',' << pooled.Nc << ','
        << pooled.totalRuns << ',' << (pooled.significant[k] ? 1 : 0) << '\n';
  }
}

bool isRecognisedGofThreshold(double t) { return t == 2.0 || t == 1.645 || t == 1.0 || t == 0.3; }

GofReport gofFromSamples(const Matrix& samples, const Vector& observed, const std::vector<std::string>& names,
                         const std::vector<bool>& inModel, double outOfModelThreshold, double inModelThreshold) {
  GofReport report;
  report.inModelThreshold = inModelThreshold;
  report.outOfModelThreshold = outOfModelThreshold;
  const Vector mean = columnMeans(samples);
  const Vector sd = columnSd(samples);
  const Vector t = tRatios(samples, observed);
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    GofRow row;
    row.effect = names[k];
    row.inModel = inModel[k];
    row.observed = observed(i);
    row.simMean = mean(i);
    row.simSd = sd(i);
    row.degenerate = !(sd(i) > 0.0);
    row.tRatio = t(i);
    const double limit = row.inModel ? inModelThreshold : outOfModelThreshold;
    row.exceeds = row.degenerate || !(std::abs(row.tRatio) < limit);
    report.rows.push_back(std::move(row));
  }
  return report;
}

GofReport gofTest(const ModelSpec& fitted, const ModelSpec& extra, const Network& net, const AttributeTable& attrs,
                  const OutcomeVector& observed, std::span<const double> thetaHat, const SimOptions& opts,
                  std::uint64_t seed, double outOfModelThreshold) {
  if (thetaHat.size() != fitted.size()) throw Error("theta length does not match the fitted model");
  ModelSpec combined = fitted;
  std::vector<bool> inModel(fitted.size(), true);
  std::vector<double> theta(thetaHat.begin(), thetaHat.end());
  for (const auto& e : extra.effects) {
    if (std::find(combined.effects.begin(), combined.effects.end(), e) != combined.effects.end()) continue;
    combined.effects.push_back(e);
    inModel.push_back(false);
    theta.push_back(0.0);
  }
  Model model(combined, net, attrs);
  auto samples = simulateOutcomes(model, theta, opts, observed, seed);
  if (samples.empty()) throw Error("goodness-of-fit needs at least one simulated sample");
  Matrix z(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(combined.size()));
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (std::size_t k = 0; k < combined.size(); ++k) z(Eigen::Index(s), Eigen::Index(k)) = samples[s].stats[k];
  }
  return gofFromSamples(z, toVector(model.observedStatistics(observed)), combined.names(), inModel,
                        outOfModelThreshold);
}

void writeGofReport(std::ostream& out, const GofReport& report) {
  std::size_t width = 8;
  for (const auto& r : report.rows) width = std::max(width, r.effect.size() + 2);
  char buf[256];
  auto block = [&](bool inModel, const char* title, double limit) {
    std::snprintf(buf, sizeof buf, "%s (|t| < %g)\n", title, limit);
    out << buf;
    std::snprintf(buf, sizeof buf, "%-*s %12s %12s %12s %10s\n", int(width), "Effect", "Observed", "Mean", "StdDev",
                  "t-ratio");
    out << buf;
    for (const auto& r : report.rows) {
      if (r.inModel != inModel) continue;
      if (r.degenerate) {
        std::snprintf(buf, sizeof buf, "%-*s %12.4f %12.4f %12.4f %10s\n", int(width), r.effect.c_str(), r.observed,
                      r.simMean, r.simSd, "degenerate");
      } else {
        std::snprintf(buf, sizeof buf, "%-*s %12.4f %12.4f %12.4f %10.4f%s\n", int(width), r.effect.c_str(),
                      r.observed, r.simMean, r.simSd, r.tRatio, r.exceeds ? " !" : "");
      }
      out << buf;
    }
  };
  block(true, "Effects in the model", report.inModelThreshold);
  out << '\n';
  block(false, "Effects not in the model", report.outOfModelThreshold);
}

void writeGofCsv(std::ostream& out, const GofReport& report) {
  using textio::formatDouble;
  out << "effect,inModel,observed,simMean,simSd,tRatio,exceeds\n";
  for (const auto& r : report.rows) {
    out << r.effect << ',' << (r.inModel ? 1 : 0) << ',' << formatDouble(r.observed) << ','
        << formatDouble(r.simMean) << ',' << formatDouble(r.simSd) << ',' << formatDouble(r.tRatio) << ','
        << (r.exceeds ? 1 : 0) << '\n';
  }
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (double(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - double(lo)) * (values[hi] - values[lo]);
}

DegeneracyCheck degeneracyCheck(const Model& model, const OutcomeVector& observed, std::span<const double> thetaHat,
                                const SimOptions& opts, std::uint64_t seed) {
  DegeneracyCheck check;
  check.samples = simulateOutcomes(model, thetaHat, opts, observed, seed);
  if (check.samples.empty()) return check;
  const auto zobs = model.observedStatistics(observed);
  const auto names = model.names();
  for (std::size_t k = 0; k < model.size(); ++k) {
    std::vector<double> col;
    col.reserve(check.samples.size());
    for (const auto& s : check.samples) col.push_back(s.stats[k]);
    DegeneracyRow row;
    row.effect = names[k];
    row.observed = zobs[k];
    row.low = quantile(col, 0.025);
    row.high = quantile(col, 0.975);
    row.inside = row.low <= row.observed && row.observed <= row.high;
    check.rows.push_back(std::move(row));
  }
  return check;
}

void writeDegeneracySummary(std::ostream& out, const DegeneracyCheck& check) {
  using textio::formatDouble;
  out << "effect,observed,low95,high95,inside\n";
  for (const auto& r : check.rows) {
    out << r.effect << ',' << formatDouble(r.observed) << ',' << formatDouble(r.low) << ','
        << formatDouble(r.high) << ',' << (r.inside ? 1 : 0) << '\n';
  }
}

}  // namespace alaam
