#include "alaam/ee.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "alaam/error.hpp"
#include "alaam/sampler.hpp"
#include "alaam/textio.hpp"

namespace alaam {

void EEConfig::validate() const {
  if (Ms <= 0 || Mee <= 0 || !(r > 0.0) || !(c > 0.0) || burninIters <= 0 || thinInterval <= 0 || initSteps < 0 ||
      !(maxAbsTheta > 0.0) || !(dzRatioLimit > 0.0)) {
    throw Error("invalid equilibrium expectation settings");
  }
  if (burninIters >= Mee) throw Error("EE burn-in must be shorter than the number of iterations");
}

std::string_view toString(FailReason reason) {
  switch (reason) {
    case FailReason::None: return "none";
    case FailReason::Diverged: return "Diverged";
    case FailReason::DegenerateModel: return "DegenerateModel";
    case FailReason::NotConverged: return "NotConverged";
    case FailReason::InsufficientData: return "InsufficientData";
  }
  return "?";
}

FailReason parseFailReason(std::string_view text) {
  for (auto r : {FailReason::None, FailReason::Diverged, FailReason::DegenerateModel, FailReason::NotConverged,
                 FailReason::InsufficientData}) {
    if (toString(r) == text) return r;
  }
  throw Error("unknown fail reason '" + std::string(text) + "'");
}

void eeUpdate(Vector& theta, const Vector& dz, double r, double c) {
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    const double sign = dz(k) > 0.0 ? 1.0 : (dz(k) < 0.0 ? -1.0 : 0.0);
    theta(k) -= sign * r * std::max(std::abs(theta(k)), c);
  }
}

Vector algorithmS(const Model& model, const OutcomeVector& observed, const EEConfig& config, Rng& rng) {
  const auto p = static_cast<Eigen::Index>(model.size());
  Vector theta = Vector::Zero(p);
  OutcomeVector A = observed;
  auto freeNodes = A.freeNodes();
  if (freeNodes.empty()) throw Error("cannot estimate: the outcome vector has no free nodes");
  std::vector<double> delta(model.size());
  Vector dz(p);
  for (int step = 0; step < config.initSteps; ++step) {
    dz.setZero();
    for (int m = 0; m < config.Ms; ++m) {
      const NodeId i = freeNodes[rng.uniformIndex(freeNodes.size())];
      if (proposeToggle(model, std::span<const double>(theta.data(), theta.size()), A, i, rng, delta)) {
        for (Eigen::Index k = 0; k < p; ++k) dz(k) += delta[k];
      }
    }
    eeUpdate(theta, dz, config.r, config.c);
  }
  return theta;
}

EEChain runEEFrom(const Model& model, const OutcomeVector& observed, const EEConfig& config, Vector theta0,
                  Rng& rng) {
  config.validate();
  const auto p = static_cast<Eigen::Index>(model.size());
  EEChain chain;
  chain.theta0 = theta0;
  chain.thetaTrace.resize(config.Mee, p);
  chain.dzTrace.resize(config.Mee, p);
  chain.acceptanceRates.reserve(config.Mee);

  ChainState state(observed, toStd(theta0), rng);
  Vector theta = std::move(theta0);
  Vector dz(p);
  int t = 0;
  for (; t < config.Mee; ++t) {
    const auto acceptedBefore = state.acceptCount;
    runChain(model, state, static_cast<std::uint64_t>(config.Ms));
    for (Eigen::Index k = 0; k < p; ++k) dz(k) = state.zRelative[k];
    eeUpdate(theta, dz, config.r, config.c);
    chain.thetaTrace.row(t) = theta.transpose();
    chain.dzTrace.row(t) = dz.transpose();
    chain.acceptanceRates.push_back(double(state.acceptCount - acceptedBefore) / config.Ms);
    state.theta = toStd(theta);
    if (!theta.allFinite() || theta.cwiseAbs().maxCoeff() > config.maxAbsTheta) {
      chain.failed = true;
      chain.failReason = FailReason::Diverged;
      ++t;
      break;
    }
  }
  chain.thetaTrace.conservativeResize(t, p);
  chain.dzTrace.conservativeResize(t, p);
  rng = state.rng;
  return chain;
}

EEChain runEE(const Model& model, const OutcomeVector& observed, const EEConfig& config, std::uint64_t seed,
              std::uint64_t runIndex) {
  config.validate();
  Rng rng(seed, runIndex);
  Vector theta0 = algorithmS(model, observed, config, rng);
  return runEEFrom(model, observed, config, std::move(theta0), rng);
}

BatchMeans batchMeansCov(const Matrix& trace) {
  const auto n = trace.rows();
  const auto p = trace.cols();
  if (n < 4) throw InsufficientData("batch means needs at least 4 samples");
  BatchMeans bm;
  bm.batchSize = static_cast<int>(std::floor(std::sqrt(double(n))));
  bm.batchCount = static_cast<int>(n / bm.batchSize);
  if (bm.batchCount < 2) throw InsufficientData("batch means needs at least two batches");
  const Eigen::Index used = Eigen::Index(bm.batchCount) * bm.batchSize;

  bm.mean = trace.topRows(used).colwise().mean().transpose();
  bm.sigma = Matrix::Zero(p, p);
  for (int k = 0; k < bm.batchCount; ++k) {
    const Vector d = trace.middleRows(Eigen::Index(k) * bm.batchSize, bm.batchSize).colwise().mean().transpose() - bm.mean;
    bm.sigma += d * d.transpose();
  }
  bm.sigma *= double(bm.batchSize) / double(bm.batchCount - 1);
  return bm;
}

RunEstimate summarizeRun(const EEChain& chain, const EEConfig& config) {
  const auto p = chain.thetaTrace.cols();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  RunEstimate est;
  est.theta = Vector::Constant(p, nan);
  est.stdError = Vector::Constant(p, nan);
  auto fail = [&](FailReason reason) {
    est.converged = false;
    est.failReason = reason;
    return est;
  };
  if (chain.failed) return fail(chain.failReason);

  const Eigen::Index iters = chain.iterations();
  est.Nm = iters > config.burninIters ? static_cast<int>((iters - config.burninIters) / config.thinInterval) : 0;
  if (est.Nm < 4) return fail(FailReason::InsufficientData);

  Matrix thetaThin(est.Nm, p);
  Matrix dzThin(est.Nm, p);
  for (int k = 0; k < est.Nm; ++k) {
    const Eigen::Index row = config.burninIters + Eigen::Index(k) * config.thinInterval;
    thetaThin.row(k) = chain.thetaTrace.row(row);
    dzThin.row(k) = chain.dzTrace.row(row);
  }

  BatchMeans bt, bv;
  try {
    bt = batchMeansCov(thetaThin);
    bv = batchMeansCov(dzThin);
  } catch (const InsufficientData&) {
    return fail(FailReason::InsufficientData);
  }
  est.theta = bt.mean;
  est.T = bt.sigma;
  est.V = bv.sigma;

  const Vector dzMean = columnMeans(dzThin);
  const Vector dzSd = columnSd(dzThin);
  est.dzRatio.resize(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    est.dzRatio(k) = dzSd(k) > 0.0 ? dzMean(k) / dzSd(k) : (dzMean(k) == 0.0 ? 0.0 : HUGE_VAL);
  }

  const double nm = est.Nm;
  auto vInv = invertIfWellConditioned(est.V / nm);
  if (!vInv) return fail(FailReason::DegenerateModel);
  est.W = est.T / nm + *vInv;
  est.W = 0.5 * (est.W + est.W.transpose());
  est.stdError = est.W.diagonal().cwiseMax(0.0).cwiseSqrt();

  if (!est.theta.allFinite() || est.theta.cwiseAbs().maxCoeff() > config.maxAbsTheta) {
    return fail(FailReason::Diverged);
  }
  if (est.dzRatio.cwiseAbs().maxCoeff() > config.dzRatioLimit) return fail(FailReason::NotConverged);
  est.converged = true;
  est.failReason = FailReason::None;
  return est;
}

void writeRunCsv(std::ostream& out, const std::vector<std::string>& names, const EEChain& chain) {
  out << 't';
  for (const auto& n : names) out << ",theta_" << n;
  for (const auto& n : names) out << ",dz_" << n;
  out << ",acceptRate\n";
  for (Eigen::Index t = 0; t < chain.iterations(); ++t) {
    out << t;
    for (Eigen::Index k = 0; k < chain.thetaTrace.cols(); ++k) out << ',' << textio::formatDouble(chain.thetaTrace(t, k));
    for (Eigen::Index k = 0; k < chain.dzTrace.cols(); ++k) out << ',' << textio::formatDouble(chain.dzTrace(t, k));
    out << ',' << textio::formatDouble(chain.acceptanceRates[t]) << '\n';
  }
}

EEChain readRunCsv(std::istream& in, std::vector<std::string>& names) {
  auto table = textio::readCsv(in);
  const auto& h = table.header;
  if (h.size() < 4 || h.front() != "t" || h.back() != "acceptRate" || (h.size() - 2) % 2 != 0) {
    throw LoadError(LoadError::Code::MalformedHeader, "<run csv>", 1, "not an EE run trace header");
  }
  const std::size_t p = (h.size() - 2) / 2;
  names.clear();
  for (std::size_t k = 0; k < p; ++k) {
    if (h[1 + k].rfind("theta_", 0) != 0 || h[1 + p + k] != "dz_" + h[1 + k].substr(6)) {
      throw LoadError(LoadError::Code::MalformedHeader, "<run csv>", 1, "mismatched theta_/dz_ columns");
    }
    names.push_back(h[1 + k].substr(6));
  }
  EEChain chain;
  const auto rows = static_cast<Eigen::Index>(table.rows.size());
  chain.thetaTrace.resize(rows, static_cast<Eigen::Index>(p));
  chain.dzTrace.resize(rows, static_cast<Eigen::Index>(p));
  for (Eigen::Index t = 0; t < rows; ++t) {
    const auto& row = table.rows[t];
    if (row.size() != h.size()) {
      throw LoadError(LoadError::Code::BadToken, "<run csv>", std::size_t(t) + 2, "wrong number of fields");
    }
    auto num = [&](std::size_t col) {
      auto v = textio::parseDouble(row[col]);
      if (!v) throw LoadError(LoadError::Code::BadToken, "<run csv>", std::size_t(t) + 2, "bad number '" + row[col] + "'");
      return *v;
    };
    for (std::size_t k = 0; k < p; ++k) {
      chain.thetaTrace(t, Eigen::Index(k)) = num(1 + k);
      chain.dzTrace(t, Eigen::Index(k)) = num(1 + p + k);
    }
    chain.acceptanceRates.push_back(num(h.size() - 1));
  }
  return chain;
}

void writeRunStatus(std::ostream& out, bool converged, FailReason reason) {
  out << "converged=" << (converged ? 1 : 0) << " failReason=" << toString(reason) << '\n';
}

std::pair<bool, FailReason> readRunStatus(std::istream& in) {
  std::string line;
  std::getline(in, line);
  bool converged = false;
  FailReason reason = FailReason::None;
  bool sawConverged = false, sawReason = false;
  for (auto tok : textio::splitWhitespace(line)) {
    auto eq = tok.find('=');
    if (eq == std::string_view::npos) continue;
    auto key = tok.substr(0, eq);
    auto value = tok.substr(eq + 1);
    if (key == "converged") {
      converged = value == "1";
      sawConverged = true;
    } else if (key == "failReason") {
      reason = parseFailReason(value);
      sawReason = true;
    }
  }
  if (!sawConverged || !sawReason) {
    throw LoadError(LoadError::Code::MalformedHeader, "<run status>", 1, "expected 'converged=<0|1> failReason=<reason>'");
  }
  return {converged, reason};
}

}  // namespace alaam
