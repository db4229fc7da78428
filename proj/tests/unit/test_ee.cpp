#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "alaam/ee.hpp"
#include "alaam/error.hpp"
#include "fixtures.hpp"

using namespace alaam;

namespace {

struct Problem {
  fixtures::SmallProblem sp = fixtures::smallProblems()[0];
  Model model{parseModel(sp.model, sp.net.kind(), sp.attrs), sp.net, sp.attrs};
};

EEConfig smallConfig() {
  EEConfig cfg;
  cfg.Ms = 50;
  cfg.Mee = 3000;
  cfg.burninIters = 500;
  cfg.thinInterval = 10;
  return cfg;
}

// Synthetic chain: theta and dz columns built from a generator.
EEChain syntheticChain(int rows, int p, const std::function<double(int, int)>& theta,
                       const std::function<double(int, int)>& dz) {
  EEChain chain;
  chain.thetaTrace.resize(rows, p);
  chain.dzTrace.resize(rows, p);
  for (int t = 0; t < rows; ++t) {
    for (int k = 0; k < p; ++k) {
      chain.thetaTrace(t, k) = theta(t, k);
      chain.dzTrace(t, k) = dz(t, k);
    }
    chain.acceptanceRates.push_back(0.5);
  }
  return chain;
}

}  // namespace

TEST_SUITE("ee") {
  TEST_CASE("update rule examples") {
    Vector theta(4);
    theta << 0.5, -2.0, 0.0, 0.001;
    Vector dz(4);
    dz << 3.0, -1.0, 2.0, 0.0;
    eeUpdate(theta, dz, 0.1, 0.01);
    CHECK(theta(0) == doctest::Approx(0.45));
    CHECK(theta(1) == doctest::Approx(-1.8));
    CHECK(theta(2) == doctest::Approx(-0.001));
    CHECK(theta(3) == 0.001);
  }

  TEST_CASE("defaults and validation") {
    EEConfig cfg;
    CHECK(cfg.Nm() == 490);
    cfg.burninIters = cfg.Mee;
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK((parseFailReason("NotConverged") == FailReason::NotConverged));
    CHECK_THROWS_AS(parseFailReason("nope"), Error);
  }

  TEST_CASE("algorithm S is deterministic and moves density towards the data") {
    Problem pr;
    EEConfig cfg = smallConfig();
    Rng a(5), b(5);
    const Vector ta = algorithmS(pr.model, pr.sp.outcome, cfg, a);
    const Vector tb = algorithmS(pr.model, pr.sp.outcome, cfg, b);
    CHECK(ta == tb);
    CHECK(a == b);
    // Four of ten active: removing nodes is favoured, so density goes negative.
    CHECK(ta(0) < 0.0);
    cfg.initSteps = 0;
    Rng c(5);
    CHECK(algorithmS(pr.model, pr.sp.outcome, cfg, c).isZero());
  }

  TEST_CASE("recorded traces replay the update exactly") {
    Problem pr;
    const auto cfg = smallConfig();
    const auto chain = runEE(pr.model, pr.sp.outcome, cfg, 3, 2);
    REQUIRE(chain.iterations() == cfg.Mee);
    CHECK_FALSE(chain.failed);
    Vector theta = chain.theta0;
    for (Eigen::Index t = 0; t < chain.iterations(); ++t) {
      eeUpdate(theta, chain.dzTrace.row(t).transpose(), cfg.r, cfg.c);
      REQUIRE(theta == chain.thetaTrace.row(t).transpose());
    }
  }

  TEST_CASE("a run is algorithm S then the chain, both from the run stream") {
    Problem pr;
    const auto cfg = smallConfig();
    const auto whole = runEE(pr.model, pr.sp.outcome, cfg, 3, 4);
    Rng rng(3, 4);
    const Vector theta0 = algorithmS(pr.model, pr.sp.outcome, cfg, rng);
    const auto parts = runEEFrom(pr.model, pr.sp.outcome, cfg, theta0, rng);
    CHECK(whole.theta0 == parts.theta0);
    CHECK(whole.thetaTrace == parts.thetaTrace);
    const auto other = runEE(pr.model, pr.sp.outcome, cfg, 3, 5);
    CHECK(other.thetaTrace != whole.thetaTrace);
  }

  TEST_CASE("dz is the statistic difference from the observation") {
    Problem pr;
    EEConfig cfg = smallConfig();
    cfg.Mee = 600;
    cfg.burninIters = 100;
    // With every parameter at a fixed point far from zero and a tiny gain,
    // dz stays an integer-valued count difference bounded by the network.
    const auto chain = runEE(pr.model, pr.sp.outcome, cfg, 9);
    for (Eigen::Index t = 0; t < chain.iterations(); ++t) {
      CHECK(chain.dzTrace(t, 0) == std::round(chain.dzTrace(t, 0)));
      CHECK(std::abs(chain.dzTrace(t, 0)) <= 10.0);
    }
  }

  TEST_CASE("batch means") {
    SUBCASE("constant trace has zero covariance") {
      const auto bm = batchMeansCov(Matrix::Constant(100, 2, 3.0));
      CHECK(bm.batchSize == 10);
      CHECK(bm.batchCount == 10);
      CHECK(bm.mean(0) == 3.0);
      CHECK(bm.sigma.isZero());
    }
    SUBCASE("iid normal gives the marginal variance") {
      Rng rng(1);
      Matrix m(10000, 1);
      for (Eigen::Index t = 0; t < m.rows(); ++t) m(t, 0) = rng.normal();
      const auto bm = batchMeansCov(m);
      CHECK(bm.sigma(0, 0) == doctest::Approx(1.0).epsilon(0.2));
    }
    SUBCASE("AR(1) gives the long-run variance") {
      Rng rng(2);
      const double phi = 0.5;
      Matrix m(40000, 1);
      double x = 0.0;
      for (Eigen::Index t = 0; t < m.rows(); ++t) {
        x = phi * x + rng.normal();
        m(t, 0) = x;
      }
      const auto bm = batchMeansCov(m);
      CHECK(bm.sigma(0, 0) == doctest::Approx(1.0 / ((1 - phi) * (1 - phi))).epsilon(0.3));
    }
    SUBCASE("remainder rows are dropped") {
      Matrix m(12, 1);
      for (int t = 0; t < 12; ++t) m(t, 0) = t < 9 ? 0.0 : 100.0;
      const auto bm = batchMeansCov(m);
      CHECK(bm.batchSize == 3);
      CHECK(bm.batchCount == 4);
      CHECK(bm.mean(0) == 25.0);
    }
    CHECK_THROWS_AS(batchMeansCov(Matrix::Zero(3, 1)), InsufficientData);
  }

  TEST_CASE("run summaries report failures without throwing") {
    EEConfig cfg;
    cfg.Mee = 1200;
    cfg.burninIters = 200;
    cfg.thinInterval = 2;
    Rng rng(3);
    auto noise = [&](int, int) { return rng.normal(); };

    SUBCASE("diverged chains stay diverged") {
      auto chain = syntheticChain(50, 2, noise, noise);
      chain.failed = true;
      chain.failReason = FailReason::Diverged;
      const auto est = summarizeRun(chain, cfg);
      CHECK_FALSE(est.converged);
      CHECK((est.failReason == FailReason::Diverged));
    }
    SUBCASE("short chains have insufficient data") {
      const auto est = summarizeRun(syntheticChain(205, 2, noise, noise), cfg);
      CHECK((est.failReason == FailReason::InsufficientData));
    }
    SUBCASE("a constant dz column is degenerate") {
      const auto est = summarizeRun(syntheticChain(1200, 2, noise, [&](int, int k) { return k ? 1.0 : rng.normal(); }), cfg);
      CHECK((est.failReason == FailReason::DegenerateModel));
    }
    SUBCASE("dz drifting away from zero is not converged") {
      const auto est = summarizeRun(syntheticChain(1200, 2, noise, [&](int, int) { return 0.5 + rng.normal(); }), cfg);
      CHECK((est.failReason == FailReason::NotConverged));
      CHECK(est.dzRatio.cwiseAbs().maxCoeff() > 0.3);
    }
    SUBCASE("centred dz converges and W is symmetric") {
      const auto est = summarizeRun(syntheticChain(1200, 2, noise, noise), cfg);
      CHECK(est.converged);
      CHECK(est.Nm == 500);
      CHECK(est.W == est.W.transpose());
      const Vector expected = (est.T / est.Nm + (est.V / est.Nm).inverse()).diagonal().cwiseSqrt();
      CHECK(est.stdError(0) == doctest::Approx(expected(0)).epsilon(1e-12));
    }
  }

  TEST_CASE("diverging parameters stop the chain") {
    Problem pr;
    EEConfig cfg = smallConfig();
    cfg.maxAbsTheta = 0.05;
    cfg.r = 0.5;
    const auto chain = runEE(pr.model, pr.sp.outcome, cfg, 1);
    CHECK(chain.failed);
    CHECK((chain.failReason == FailReason::Diverged));
    CHECK(chain.iterations() < cfg.Mee);
    CHECK((summarizeRun(chain, cfg).failReason == FailReason::Diverged));
  }

  TEST_CASE("trace and status files round trip") {
    Problem pr;
    const auto cfg = smallConfig();
    const auto chain = runEE(pr.model, pr.sp.outcome, cfg, 6);
    std::stringstream csv;
    writeRunCsv(csv, pr.model.names(), chain);
    std::vector<std::string> names;
    const auto back = readRunCsv(csv, names);
    CHECK(names == pr.model.names());
    CHECK(back.thetaTrace == chain.thetaTrace);
    CHECK(back.dzTrace == chain.dzTrace);
    const auto a = summarizeRun(chain, cfg);
    const auto b = summarizeRun(back, cfg);
    CHECK(a.theta == b.theta);
    CHECK(a.stdError == b.stdError);

    std::stringstream status;
    writeRunStatus(status, false, FailReason::NotConverged);
    CHECK(status.str() == "converged=0 failReason=NotConverged\n");
    const auto [converged, reason] = readRunStatus(status);
    CHECK_FALSE(converged);
    CHECK((reason == FailReason::NotConverged));
    std::istringstream bad("hello\n");
    CHECK_THROWS_AS(readRunStatus(bad), LoadError);
    std::istringstream badCsv("t,x\n1,2\n");
    CHECK_THROWS_AS(readRunCsv(badCsv, names), LoadError);
  }
}
