#include "alaam/study.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "alaam/error.hpp"
#include "alaam/inference.hpp"
#include "alaam/rng.hpp"
#include "alaam/sampler.hpp"
#include "alaam/textio.hpp"

namespace alaam {

Network erdosRenyi(NetworkKind kind, NodeId n, double meanDegree, std::uint64_t seed) {
  if (kind == NetworkKind::Bipartite) throw Error("synthetic networks are one-mode only");
  if (n < 2) throw Error("synthetic network needs at least two nodes");
  const double p = meanDegree / double(n - 1);
  Rng rng(seed);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = kind == NetworkKind::Directed ? 0 : i + 1; j < n; ++j) {
      if (i != j && rng.uniform01() < p) edges.emplace_back(i, j);
    }
  }
  return Network::fromEdges(kind, n, edges);
}

AttributeTable generateSyntheticAttributes(const Network& net, std::uint64_t seed) {
  const NodeId n = net.nodeCount();
  Rng rng(seed);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  const NodeId ones = n / 2;
  for (NodeId k = 0; k < ones; ++k) {
    auto j = k + static_cast<NodeId>(rng.uniformIndex(static_cast<std::uint64_t>(n - k)));
    std::swap(order[k], order[j]);
  }
  std::vector<double> binary(n, 0.0);
  for (NodeId k = 0; k < ones; ++k) binary[order[k]] = 1.0;
  std::vector<double> continuous(n);
  for (auto& v : continuous) v = rng.normal();

  AttributeTable attrs(n);
  attrs.addBinary("binaryAttr", std::move(binary));
  attrs.addContinuous("continuousAttr", std::move(continuous));
  return attrs;
}

WilsonInterval wilsonInterval(int successes, int trials, double confidence) {
  if (trials < 1 || successes < 0 || successes > trials) throw Error("wilsonInterval needs 0 <= k <= n, n >= 1");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
  const double n = trials;
  const double phat = successes / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval w{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  if (successes == 0) w.low = 0.0;
  if (successes == trials) w.high = 1.0;
  return w;
}

void parallelFor(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, threads > 0 ? std::size_t(threads) : 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex errorMutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(errorMutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

void StudyConfig::validate() const {
  if (sampleCount < 1) throw StudyError("study needs at least one sample");
  if (runsPerSample < 1) throw StudyError("study needs at least one run per sample");
  if (!(initialIncidence >= 0.0 && initialIncidence <= 1.0)) throw StudyError("initial incidence must lie in [0, 1]");
  if (outcomeBurninFactor < 0) throw StudyError("outcome burn-in must be non-negative");
}

namespace {

// Independent seed per (tag, a, b) from the master seed.
std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t tag, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(master ^ (tag * 0x9E3779B97F4A7C15ULL)) ^ a) ^ (b + 0x632BE59BD9B4E019ULL));
}

struct SampleEstimate {
  bool converged = false;
  Vector theta, stdError, low, high;
  int runsConverged = 0;
};

OutcomeVector simulateGeneratingOutcome(const Model& model, const std::vector<double>& theta,
                                        const StudyConfig& cfg, std::uint64_t seed) {
  const Network& net = model.network();
  std::vector<std::int8_t> values(net.nodeCount(), OutcomeVector::kZero);
  for (NodeId i = 0; i < net.nodeCount(); ++i) {
    if (!net.isModeA(i)) values[i] = OutcomeVector::kFixedNA;
  }
  OutcomeVector init(std::move(values));
  Rng rng(seed);
  for (NodeId i : init.freeNodes()) {
    if (rng.uniform01() < cfg.initialIncidence) init.set(i, OutcomeVector::kOne);
  }
  ChainState chain(std::move(init), theta, rng);
  runChain(model, chain, static_cast<std::uint64_t>(cfg.outcomeBurninFactor) * net.nodeCount());
  return chain.A;
}

}  // namespace

StudyReport runStudy(const StudyConfig& cfg) {
  cfg.validate();
  const Network net = cfg.networkFile ? loadNetwork(*cfg.networkFile, cfg.kind)
                                      : erdosRenyi(cfg.kind, cfg.nodes, cfg.meanDegree, deriveSeed(cfg.seed, 1, 0));
  const AttributeTable attrs = generateSyntheticAttributes(net, deriveSeed(cfg.seed, 2, 0));
  const ModelSpec spec = parseModel(cfg.model, net.kind(), attrs);
  const Model model(spec, net, attrs);
  const auto names = spec.names();
  const std::size_t p = spec.size();
  if (cfg.theta.size() != p) throw StudyError("generating theta length does not match the model");

  auto effectIndex = [&](const std::string& name) {
    for (std::size_t k = 0; k < p; ++k) {
      if (names[k] == name || spec.effects[k].token() == name) return k;
    }
    throw StudyError("null arm names unknown effect '" + name + "'");
  };

  struct Arm {
    std::string label;
    std::vector<double> theta;
    std::optional<std::size_t> nulled;
  };
  std::vector<Arm> arms{{"main", cfg.theta, std::nullopt}};
  for (const auto& na : cfg.nullArms) {
    Arm arm{na.effect, cfg.theta, effectIndex(na.effect)};
    arm.theta[*arm.nulled] = 0.0;
    for (const auto& [name, value] : na.overrides) arm.theta[effectIndex(name)] = value;
    arms.push_back(std::move(arm));
  }

  const std::size_t samples = static_cast<std::size_t>(cfg.sampleCount);
  const std::size_t runs = cfg.estimator == Estimator::EE ? static_cast<std::size_t>(cfg.runsPerSample) : 1;

  // Generating outcomes, keyed (arm, sample).
  std::vector<OutcomeVector> outcomes(arms.size() * samples);
  parallelFor(outcomes.size(), cfg.threads, [&](std::size_t idx) {
    const std::size_t a = idx / samples, s = idx % samples;
    outcomes[idx] = simulateGeneratingOutcome(model, arms[a].theta, cfg, deriveSeed(cfg.seed, 3, a, s));
  });

  // Estimation runs, keyed (arm, sample, run).
  std::vector<RunEstimate> runEstimates(outcomes.size() * runs);
  std::vector<SampleEstimate> saEstimates(cfg.estimator == Estimator::SA ? outcomes.size() : 0);
  parallelFor(runEstimates.size(), cfg.threads, [&](std::size_t idx) {
    const std::size_t sampleIdx = idx / runs, r = idx % runs;
    const std::uint64_t seed = deriveSeed(cfg.seed, 4, sampleIdx);
    if (cfg.estimator == Estimator::EE) {
      auto chain = runEE(model, outcomes[sampleIdx], cfg.ee, seed, r);
      runEstimates[idx] = summarizeRun(chain, cfg.ee);
      return;
    }
    SampleEstimate& est = saEstimates[sampleIdx];
    try {
      auto res = estimateSA(model, outcomes[sampleIdx], cfg.sa, std::nullopt, seed);
      est.converged = res.converged;
      est.theta = res.theta;
      est.stdError = res.stdError;
    } catch (const DegenerateModel&) {
      est.converged = false;
    } catch (const Diverged&) {
      est.converged = false;
    }
    if (est.converged) {
      est.low = est.theta - kZ95 * est.stdError;
      est.high = est.theta + kZ95 * est.stdError;
      est.runsConverged = 1;
    }
  });

  std::vector<SampleEstimate> perSample(outcomes.size());
  for (std::size_t idx = 0; idx < outcomes.size(); ++idx) {
    if (cfg.estimator == Estimator::SA) {
      perSample[idx] = saEstimates[idx];
      continue;
    }
    try {
      auto pooled = poolRuns(std::span<const RunEstimate>(runEstimates.data() + idx * runs, runs));
      perSample[idx] = {true, pooled.theta, pooled.stdError, pooled.ci95Low, pooled.ci95High, pooled.Nc};
    } catch (const NoConvergedRuns&) {
      perSample[idx].converged = false;
    }
  }

  auto summarise = [&](std::size_t a, std::size_t k) {
    const Arm& arm = arms[a];
    StudyRow row;
    row.arm = arm.label;
    row.effect = names[k];
    row.trueValue = arm.theta[k];
    row.falsePositiveRate = arm.theta[k] == 0.0;
    row.runsPerSample = static_cast<int>(runs);
    std::vector<double> err;
    int covered = 0, errors = 0, runsConverged = 0;
    for (std::size_t s = 0; s < samples; ++s) {
      const auto& est = perSample[a * samples + s];
      if (!est.converged) continue;
      const auto i = static_cast<Eigen::Index>(k);
      err.push_back(est.theta(i) - row.trueValue);
      covered += est.low(i) <= row.trueValue && row.trueValue <= est.high(i) ? 1 : 0;
      const bool containsZero = est.low(i) <= 0.0 && 0.0 <= est.high(i);
      errors += row.falsePositiveRate ? !containsZero : containsZero;
      runsConverged += est.runsConverged;
    }
    row.samplesConverged = static_cast<int>(err.size());
    if (err.empty()) throw StudyError("every sample failed to converge in arm '" + arm.label + "'");
    const double m = double(err.size());
    row.bias = std::accumulate(err.begin(), err.end(), 0.0) / m;
    double sq = 0.0, var = 0.0;
    for (double e : err) {
      sq += e * e;
      var += (e - row.bias) * (e - row.bias);
    }
    row.rmse = std::sqrt(sq / m);
    row.biasMcse = err.size() > 1 ? std::sqrt(var / (m - 1.0) / m) : HUGE_VAL;
    row.coverage = 100.0 * covered / m;
    row.rate = 100.0 * errors / m;
    const auto w = wilsonInterval(errors, row.samplesConverged);
    row.rateLow = 100.0 * w.low;
    row.rateHigh = 100.0 * w.high;
    row.meanRunsConverged = runsConverged / m;
    return row;
  };

  StudyReport report;
  for (std::size_t k = 0; k < p; ++k) report.mainRows.push_back(summarise(0, k));
  for (std::size_t a = 1; a < arms.size(); ++a) report.nullRows.push_back(summarise(a, *arms[a].nulled));
  return report;
}

void writeStudyCsv(std::ostream& out, const std::vector<StudyRow>& rows) {
  using textio::formatDouble;
  out << "effect,bias,RMSE,rate,rateCILow,rateCIHigh,coverage,samplesConverged,meanRunsConverged,runsPerSample\n";
  for (const auto& r : rows) {
    out << r.effect << ',' << formatDouble(r.bias) << ',' << formatDouble(r.rmse) << ',' << formatDouble(r.rate) << ','
        << formatDouble(r.rateLow) << ',' << formatDouble(r.rateHigh) << ',' << formatDouble(r.coverage) << ','
        << r.samplesConverged << ',' << formatDouble(r.meanRunsConverged) << ',' << r.runsPerSample << '\n';
  }
}

}  // namespace alaam
