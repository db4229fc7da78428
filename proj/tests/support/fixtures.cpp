#include "fixtures.hpp"

#include <cmath>
#include <fstream>

#include "alaam/sampler.hpp"
#include "alaam/textio.hpp"

namespace alaam::fixtures {

Network randomNetwork(NetworkKind kind, NodeId n, double p, Rng& rng, NodeId modeA) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i == j) continue;
      if (kind != NetworkKind::Directed && j < i) continue;
      if (kind == NetworkKind::Bipartite && (i < modeA) == (j < modeA)) continue;
      if (rng.uniform01() < p) edges.emplace_back(i, j);
    }
  }
  return Network::fromEdges(kind, n, edges, kind == NetworkKind::Bipartite ? modeA : 0);
}

AttributeTable randomAttributes(NodeId n, Rng& rng, double naFraction) {
  std::vector<double> b(n), x(n);
  std::vector<int> c(n);
  for (NodeId i = 0; i < n; ++i) {
    b[i] = rng.uniform01() < naFraction ? kNA : double(rng.uniformIndex(2));
    x[i] = rng.uniform01() < naFraction ? kNA : std::round(rng.normal() * 100.0) / 100.0;
    c[i] = rng.uniform01() < naFraction ? AttributeTable::kCategoricalNA : int(rng.uniformIndex(3));
  }
  AttributeTable attrs(n);
  attrs.addBinary("b", std::move(b));
  attrs.addContinuous("x", std::move(x));
  attrs.addCategorical("c", std::move(c));
  return attrs;
}

OutcomeVector randomOutcome(const Network& net, Rng& rng, double incidence, double naFraction) {
  std::vector<std::int8_t> y(net.nodeCount());
  for (auto& v : y) {
    if (rng.uniform01() < naFraction) {
      v = OutcomeVector::kFixedNA;
    } else {
      v = rng.uniform01() < incidence ? 1 : 0;
    }
  }
  return bindOutcome(net, OutcomeVector(std::move(y)));
}

ModelSpec fullCatalogue(NetworkKind kind) {
  std::string tokens;
  switch (kind) {
    case NetworkKind::Undirected:
      tokens = "Density,Activity,Contagion,oOb:b,oOc:x,oO_Osame:c,PartnerAttr:x,GWActivity:2.0,GWActivity:0.5,"
               "TriangleT1,TriangleT2,TriangleT3";
      break;
    case NetworkKind::Directed:
      tokens = "Density,Contagion,oOb:b,oOc:x,Sender,Receiver,EgoInTwoStar,EgoOutTwoStar,Reciprocity,"
               "ContagionReciprocity";
      break;
    case NetworkKind::Bipartite:
      tokens = "Density,Activity,TwoPathContagion";
      break;
  }
  Rng rng(0);
  return parseModel(tokens, kind, randomAttributes(1, rng));
}

OutcomeVector simulateOutcome(const Model& model, const std::vector<double>& theta, double startIncidence,
                              std::uint64_t burninSweeps, std::uint64_t seed) {
  const Network& net = model.network();
  Rng rng(seed);
  auto start = bindOutcome(net, OutcomeVector::zeros(net.nodeCount()));
  for (NodeId i : std::vector<NodeId>(start.freeNodes().begin(), start.freeNodes().end())) {
    if (rng.uniform01() < startIncidence) start.set(i, OutcomeVector::kOne);
  }
  ChainState chain(std::move(start), theta, rng);
  runChain(model, chain, burninSweeps * static_cast<std::uint64_t>(net.nodeCount()));
  return chain.A;
}

Dataset lifestyleDataset() {
  constexpr NodeId n = 50;
  Rng rng(20240917);
  std::vector<Edge> arcs;
  for (NodeId i = 0; i < n; ++i) {
    const int outDegree = 2 + static_cast<int>(rng.uniformIndex(4));
    const NodeId group = i / 10;
    for (int k = 0; k < outDegree; ++k) {
      NodeId j = rng.uniform01() < 0.8 ? group * 10 + NodeId(rng.uniformIndex(10)) : NodeId(rng.uniformIndex(n));
      if (j == i) continue;
      arcs.emplace_back(i, j);
      if (rng.uniform01() < 0.4) arcs.emplace_back(j, i);
    }
  }
  Dataset ds;
  ds.net = Network::fromEdges(NetworkKind::Directed, n, arcs);
  std::vector<double> alcohol(n), sport(n);
  for (NodeId i = 0; i < n; ++i) {
    alcohol[i] = double(1 + rng.uniformIndex(5));
    sport[i] = double(rng.uniformIndex(2));
  }
  ds.attrs = AttributeTable(n);
  ds.attrs.addContinuous("alcohol", alcohol);
  ds.attrs.addBinary("sport", sport);
  ds.model = kLifestyleModel;
  ds.trueTheta = {-6.5, 0.7, 0.0, 0.0, 1.2};
  const Model model(parseModel(ds.model, NetworkKind::Directed, ds.attrs), ds.net, ds.attrs);
  ds.outcome = simulateOutcome(model, ds.trueTheta, 0.2, 1000, 77);
  return ds;
}

std::vector<SmallProblem> smallProblems() {
  std::vector<SmallProblem> problems;
  auto add = [&](std::string label, NetworkKind kind, std::uint64_t seed, double p, std::string model,
                 std::vector<std::int8_t> y) {
    Rng rng(seed);
    SmallProblem sp{std::move(label), randomNetwork(kind, 10, p, rng), randomAttributes(10, rng, 0.0), {},
                    std::move(model)};
    sp.outcome = bindOutcome(sp.net, OutcomeVector(std::move(y)));
    problems.push_back(std::move(sp));
  };
  add("undirected density+contagion", NetworkKind::Undirected, 11, 0.3, "Density,Contagion",
      {1, 1, 0, 0, 1, 0, 1, 0, 0, 0});
  add("undirected density+activity+binary", NetworkKind::Undirected, 12, 0.3, "Density,Activity,oOb:b",
      {1, 0, 1, 0, 1, 0, 0, 1, 0, 0});
  add("directed density+contagion+sender", NetworkKind::Directed, 13, 0.2, "Density,Contagion,Sender",
      {0, 1, 1, 0, 0, 1, 0, 1, 0, 0});
  return problems;
}

void writeDataset(const std::filesystem::path& dir, const Dataset& ds) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "network.net");
    writeNetwork(out, ds.net);
  }
  {
    std::ofstream out(dir / "outcome.txt");
    for (auto v : ds.outcome.values()) out << (v == OutcomeVector::kFixedNA ? "NA" : std::to_string(int(v))) << '\n';
  }
  auto writeColumns = [&](const std::filesystem::path& path, AttributeKind kind) {
    std::vector<std::string> names;
    for (const auto& name : ds.attrs.names()) {
      if (ds.attrs.kindOf(name) == kind) names.push_back(name);
    }
    if (names.empty()) return;
    std::ofstream out(path);
    out << textio::join(names, " ") << '\n';
    for (NodeId i = 0; i < ds.net.nodeCount(); ++i) {
      for (std::size_t k = 0; k < names.size(); ++k) {
        const double v = kind == AttributeKind::Binary ? ds.attrs.binary(names[k])[i] : ds.attrs.continuous(names[k])[i];
        out << (k ? " " : "") << (isNA(v) ? std::string("NA") : textio::formatDouble(v));
      }
      out << '\n';
    }
  };
  writeColumns(dir / "binary.txt", AttributeKind::Binary);
  writeColumns(dir / "continuous.txt", AttributeKind::Continuous);
}

}  // namespace alaam::fixtures
