#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <sstream>

#include "alaam/error.hpp"
#include "alaam/linalg.hpp"
#include "alaam/sampler.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace alaam;

namespace {

struct Setup {
  Network net;
  AttributeTable attrs;
  std::unique_ptr<Model> model;

  Setup(NetworkKind kind, NodeId n, double p, std::uint64_t seed, const std::string& effects) {
    Rng rng(seed);
    net = fixtures::randomNetwork(kind, n, p, rng, n / 2);
    attrs = fixtures::randomAttributes(n, rng, 0.0);
    model = std::make_unique<Model>(parseModel(effects, kind, attrs), net, attrs);
  }
};

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("theta zero accepts every proposal") {
    Setup s(NetworkKind::Undirected, 20, 0.2, 1, "Density,Contagion");
    ChainState chain(bindOutcome(s.net, OutcomeVector::zeros(20)), {0.0, 0.0}, Rng(3));
    runChain(*s.model, chain, 500);
    CHECK(chain.acceptCount == 500);
    CHECK(chain.proposalCount == 500);
  }

  TEST_CASE("zero steps leave the chain untouched") {
    Setup s(NetworkKind::Undirected, 10, 0.3, 2, "Density");
    auto start = bindOutcome(s.net, OutcomeVector::zeros(10));
    ChainState chain(start, {0.3}, Rng(4));
    const Rng before = chain.rng;
    runChain(*s.model, chain, 0);
    CHECK(chain.A == start);
    CHECK(chain.rng == before);
    CHECK(chain.proposalCount == 0);
  }

  TEST_CASE("very negative density rejects every 0 to 1 toggle") {
    Setup s(NetworkKind::Undirected, 15, 0.2, 3, "Density");
    ChainState chain(bindOutcome(s.net, OutcomeVector::zeros(15)), {-50.0}, Rng(5));
    runChain(*s.model, chain, 1000);
    CHECK(chain.acceptCount == 0);
    CHECK(chain.A.activeCount() == 0);
  }

  TEST_CASE("same seed gives the same samples") {
    Setup s(NetworkKind::Directed, 25, 0.15, 4, "Density,Contagion,Sender");
    const std::vector<double> theta{-1.0, 0.3, 0.1};
    SimOptions opts{500, 50, 20};
    auto init = bindOutcome(s.net, OutcomeVector::zeros(25));
    auto a = simulateOutcomes(*s.model, theta, opts, init, 9);
    auto b = simulateOutcomes(*s.model, theta, opts, init, 9);
    auto c = simulateOutcomes(*s.model, theta, opts, init, 9, 1);
    REQUIRE(a.size() == 20);
    bool differs = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].stats == b[k].stats);
      CHECK(a[k].t == b[k].t);
      differs = differs || a[k].stats != c[k].stats;
    }
    CHECK(differs);
  }

  TEST_CASE("sample bookkeeping") {
    Setup s(NetworkKind::Undirected, 10, 0.3, 5, "Density,Contagion");
    auto init = bindOutcome(s.net, OutcomeVector::zeros(10));
    CHECK(simulateOutcomes(*s.model, std::vector<double>{0.0, 0.0}, SimOptions{10, 5, 0}, init, 1).empty());
    CHECK_THROWS_AS(simulateOutcomes(*s.model, std::vector<double>{0.0, 0.0}, SimOptions{10, 0, 3}, init, 1), Error);
    auto samples = simulateOutcomes(*s.model, std::vector<double>{0.0, 0.0}, SimOptions{10, 5, 3}, init, 1);
    REQUIRE(samples.size() == 3);
    CHECK(samples[0].t == 15);
    CHECK(samples[2].t == 25);
    CHECK(samples[0].acceptRate == 1.0);

    const auto defaults = SimOptions::defaultsFor(10);
    CHECK(defaults.burnin == 10000);
    CHECK(defaults.interval == 100);
    CHECK(defaults.sampleCount == 100);

    std::ostringstream csv;
    writeSimulationCsv(csv, s.model->names(), samples);
    CHECK(csv.str().rfind("t,Density,Contagion,acceptRate\n", 0) == 0);
  }

  TEST_CASE("zRelative tracks the statistic difference from the start") {
    Setup s(NetworkKind::Undirected, 20, 0.25, 6, "Density,Activity,Contagion,TriangleT2");
    Rng rng(8);
    auto start = fixtures::randomOutcome(s.net, rng, 0.3);
    ChainState chain(start, {-0.2, 0.05, 0.2, 0.1}, Rng(10));
    const auto z0 = s.model->observedStatistics(start);
    for (int block = 0; block < 10; ++block) {
      runChain(*s.model, chain, 137);
      const auto z = s.model->observedStatistics(chain.A);
      for (std::size_t k = 0; k < z.size(); ++k) CHECK(z0[k] + chain.zRelative[k] == doctest::Approx(z[k]));
    }
  }

  TEST_CASE("fixed and NA nodes never change") {
    Setup s(NetworkKind::Undirected, 12, 0.3, 7, "Density,Contagion");
    std::vector<std::int8_t> y(12, 0);
    y[0] = OutcomeVector::kFixedNA;
    y[1] = 1;
    auto start = bindOutcome(s.net, OutcomeVector(y));
    start.fix(1);
    start.fix(2);
    ChainState chain(start, {0.0, 0.0}, Rng(11));
    runChain(*s.model, chain, 5000);
    CHECK(chain.A.value(0) == OutcomeVector::kFixedNA);
    CHECK(chain.A.value(1) == 1);
    CHECK(chain.A.value(2) == 0);
  }

  TEST_CASE("density-only chain is centred on its logistic mean") {
    Setup s(NetworkKind::Undirected, 40, 0.1, 8, "Density");
    auto init = bindOutcome(s.net, OutcomeVector::zeros(40));
    auto samples = simulateOutcomes(*s.model, std::vector<double>{0.0}, SimOptions{400, 40, 2000}, init, 12);
    double mean = 0.0;
    for (const auto& smp : samples) mean += smp.stats[0];
    mean /= double(samples.size());
    CHECK(mean == doctest::Approx(20.0).epsilon(0.03));

    auto tilted = simulateOutcomes(*s.model, std::vector<double>{1.0}, SimOptions{400, 40, 2000}, init, 13);
    mean = 0.0;
    for (const auto& smp : tilted) mean += smp.stats[0];
    mean /= double(tilted.size());
    CHECK(mean == doctest::Approx(40.0 / (1.0 + std::exp(-1.0))).epsilon(0.03));
  }

  TEST_CASE("state frequencies pass a chi-square test against exact probabilities") {
    Setup s(NetworkKind::Undirected, 5, 0.5, 9, "Density,Contagion,oOc:x");
    const std::vector<double> theta{-0.4, 0.5, 0.3};
    auto base = bindOutcome(s.net, OutcomeVector::zeros(5));
    const auto e = oracle::enumerate(s.model->spec(), s.net, s.attrs, base);
    const auto exact = oracle::exactMoments(e, toVector(theta));
    const std::vector<NodeId> freeNodes(base.freeNodes().begin(), base.freeNodes().end());

    ChainState chain(base, theta, Rng(14));
    runChain(*s.model, chain, 1000);
    constexpr int kSamples = 40000;
    std::vector<double> counts(e.states.size(), 0.0);
    for (int k = 0; k < kSamples; ++k) {
      runChain(*s.model, chain, 25);
      counts[oracle::stateIndex(e, freeNodes, chain.A.values())] += 1.0;
    }
    double chi2 = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      const double expected = kSamples * exact.probabilities(Eigen::Index(k));
      chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
    }
    boost::math::chi_squared dist(double(counts.size() - 1));
    const double pValue = 1.0 - boost::math::cdf(dist, chi2);
    INFO("chi2 = " << chi2);
    CHECK(pValue > 1e-4);
  }
}
