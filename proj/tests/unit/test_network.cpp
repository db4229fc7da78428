#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "alaam/error.hpp"
#include "alaam/network.hpp"
#include "alaam/rng.hpp"
#include "fixtures.hpp"

using namespace alaam;

namespace {

Network parse(const std::string& text, NetworkKind kind) {
  std::istringstream in(text);
  return parseNetwork(in, kind, "test");
}

LoadError::Code loadErrorCode(const std::string& text, NetworkKind kind, std::size_t* line = nullptr) {
  try {
    parse(text, kind);
  } catch (const LoadError& e) {
    if (line) *line = e.line();
    return e.code();
  }
  FAIL("expected a load error");
  return LoadError::Code::Io;
}

}  // namespace

TEST_SUITE("netcore") {
  TEST_CASE("undirected path graph from file") {
    auto net = parse("*vertices 3\n*edges\n1 2\n2 3\n", NetworkKind::Undirected);
    CHECK(net.nodeCount() == 3);
    CHECK(net.degree(0) == 1);
    CHECK(net.degree(1) == 2);
    CHECK(net.degree(2) == 1);
    CHECK(net.hasEdge(1, 0));
    CHECK_FALSE(net.hasEdge(0, 2));
  }

  TEST_CASE("directed arcs keep direction") {
    auto net = parse("*vertices 3\n*arcs\n1 2\n", NetworkKind::Directed);
    CHECK(net.outDegree(0) == 1);
    CHECK(net.inDegree(1) == 1);
    CHECK(net.inDegree(0) == 0);
    CHECK(net.hasArc(0, 1));
    CHECK_FALSE(net.hasArc(1, 0));
  }

  TEST_CASE("bipartite header carries the mode-A size") {
    auto net = parse("*vertices 5 3\n*edges\n1 4\n", NetworkKind::Bipartite);
    CHECK(net.modeASize() == 3);
    CHECK(net.isModeA(2));
    CHECK_FALSE(net.isModeA(3));
    CHECK(net.hasEdge(3, 0));
  }

  TEST_CASE("comments and vertex label lines are skipped") {
    auto net = parse("% comment\n*vertices 3\n1 \"a\"\n2 \"b\"\n3 \"c\"\n*edges\n% another\n1 3\n", NetworkKind::Undirected);
    CHECK(net.edgeCount() == 1);
    CHECK(net.hasEdge(0, 2));
  }

  TEST_CASE("each load failure has its own code and line") {
    std::size_t line = 0;
    CHECK(loadErrorCode("*vertex 3\n", NetworkKind::Undirected, &line) == LoadError::Code::MalformedHeader);
    CHECK(line == 1);
    CHECK(loadErrorCode("*vertices 3\n*edges\n1 4\n", NetworkKind::Undirected, &line) == LoadError::Code::NodeOutOfRange);
    CHECK(line == 3);
    CHECK(loadErrorCode("*vertices 3\n*edges\n1 2\n2 2\n", NetworkKind::Undirected, &line) == LoadError::Code::SelfLoop);
    CHECK(line == 4);
    CHECK(loadErrorCode("*vertices 5 3\n*edges\n1 2\n", NetworkKind::Bipartite, &line) == LoadError::Code::WithinModeEdge);
    CHECK(line == 3);
    CHECK(loadErrorCode("*vertices 3\n*edges\n1 x\n", NetworkKind::Undirected) == LoadError::Code::BadToken);
    CHECK(loadErrorCode("*edges\n1 2\n", NetworkKind::Undirected) == LoadError::Code::MalformedHeader);
  }

  TEST_CASE("missing file is an io error") {
    CHECK_THROWS_AS(loadNetwork("/nonexistent/net.txt", NetworkKind::Undirected), LoadError);
  }

  TEST_CASE("duplicate edges are merged") {
    auto net = parse("*vertices 3\n*edges\n1 2\n2 1\n1 2\n", NetworkKind::Undirected);
    CHECK(net.edgeCount() == 1);
  }

  TEST_CASE("write then load reproduces the edge set") {
    Rng rng(3);
    for (auto kind : {NetworkKind::Undirected, NetworkKind::Directed, NetworkKind::Bipartite}) {
      auto net = fixtures::randomNetwork(kind, 25, 0.2, rng, 10);
      std::ostringstream out;
      writeNetwork(out, net);
      auto back = parse(out.str(), kind);
      CHECK(back.edges() == net.edges());
      CHECK(back.modeASize() == net.modeASize());
      std::ostringstream again;
      writeNetwork(again, back);
      CHECK(again.str() == out.str());
    }
  }

  TEST_CASE("degree sum is twice the edge count") {
    Rng rng(4);
    auto net = fixtures::randomNetwork(NetworkKind::Undirected, 40, 0.15, rng);
    std::size_t sum = 0;
    for (NodeId i = 0; i < net.nodeCount(); ++i) {
      CHECK(static_cast<std::size_t>(net.degree(i)) == net.neighbors(i).size());
      sum += net.degree(i);
    }
    CHECK(sum == 2 * net.edgeCount());
  }

  TEST_CASE("two-path counts on small graphs") {
    auto path = parse("*vertices 3\n*edges\n1 2\n2 3\n", NetworkKind::Undirected);
    auto tp = TwoPathMatrix::build(path);
    CHECK(tp.count(0, 2) == 1);
    CHECK(tp.count(0, 1) == 0);
    auto cycle = parse("*vertices 4\n*edges\n1 2\n2 3\n3 4\n4 1\n", NetworkKind::Undirected);
    auto tc = TwoPathMatrix::build(cycle);
    CHECK(tc.count(0, 2) == 2);
    CHECK(tc.count(1, 3) == 2);
    CHECK(tc.count(0, 1) == 0);
  }

  TEST_CASE("two-path counts equal brute-force neighbour intersections") {
    Rng rng(5);
    for (int rep = 0; rep < 10; ++rep) {
      const auto kind = rep % 2 ? NetworkKind::Undirected : NetworkKind::Directed;
      auto net = fixtures::randomNetwork(kind, 20 + rep * 3, 0.2, rng);
      auto tp = TwoPathMatrix::build(net);
      std::size_t nonZero = 0;
      for (NodeId i = 0; i < net.nodeCount(); ++i) {
        for (NodeId j = 0; j < net.nodeCount(); ++j) {
          if (i == j) continue;
          int expected = 0;
          for (NodeId k = 0; k < net.nodeCount(); ++k) {
            if (k != i && k != j && net.hasEdge(i, k) && net.hasEdge(k, j)) ++expected;
          }
          CHECK(tp.count(i, j) == expected);
          nonZero += expected ? 1 : 0;
        }
      }
      CHECK(tp.nonZeroCount() == nonZero);
    }
  }

  TEST_CASE("outcome file with NA") {
    std::istringstream in("1\n0\nNA\n");
    auto y = parseOutcome(in);
    CHECK(y.value(0) == 1);
    CHECK(y.value(1) == 0);
    CHECK(y.value(2) == OutcomeVector::kFixedNA);
    std::vector<NodeId> freeNodes(y.freeNodes().begin(), y.freeNodes().end());
    std::sort(freeNodes.begin(), freeNodes.end());
    CHECK(freeNodes == std::vector<NodeId>{0, 1});
  }

  TEST_CASE("outcome rejects other tokens") {
    std::istringstream in("1\n2\n");
    CHECK_THROWS_AS(parseOutcome(in), LoadError);
  }

  TEST_CASE("binary attribute token 2 names the row") {
    std::istringstream in("smoker\n1\n2\n0\n");
    try {
      parseAttributes(in, AttributeKind::Binary, 3, "attrs");
      FAIL("expected a load error");
    } catch (const LoadError& e) {
      CHECK(e.code() == LoadError::Code::BadToken);
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
      CHECK(e.line() == 3);
    }
  }

  TEST_CASE("attribute tables: NA, duplicates and row counts") {
    std::istringstream ok("age group\n1.5 2\nNA 3\n");
    auto cont = parseAttributes(ok, AttributeKind::Continuous, 2);
    CHECK(cont.continuous("age")[0] == 1.5);
    CHECK(isNA(cont.continuous("age")[1]));
    std::istringstream cat("g\n2\nNA\n");
    auto table = parseAttributes(cat, AttributeKind::Categorical, 2);
    CHECK(table.categorical("g")[1] == AttributeTable::kCategoricalNA);

    std::istringstream dup("a a\n1 1\n");
    CHECK_THROWS_AS(parseAttributes(dup, AttributeKind::Binary, 1), LoadError);
    std::istringstream rows("a\n1\n");
    CHECK_THROWS_AS(parseAttributes(rows, AttributeKind::Binary, 2), LoadError);
    std::istringstream bad("a\nfoo\n");
    CHECK_THROWS_AS(parseAttributes(bad, AttributeKind::Continuous, 1), LoadError);

    AttributeTable merged(2);
    merged.merge(cont);
    CHECK_THROWS_AS(merged.merge(cont), LoadError);
  }

  TEST_CASE("zones follow the snowball invariant") {
    auto path = parse("*vertices 3\n*edges\n1 2\n2 3\n", NetworkKind::Undirected);
    std::istringstream ok("0\n1\n1\n");
    auto zones = parseZones(ok, path);
    CHECK(zones.maxZone == 1);
    std::istringstream bad("0\n1\n3\n");
    CHECK_THROWS_AS(parseZones(bad, path), LoadError);
    std::istringstream shortFile("0\n1\n");
    CHECK_THROWS_AS(parseZones(shortFile, path), LoadError);
  }

  TEST_CASE("snowball conditioning fixes only the outermost wave") {
    auto path = parse("*vertices 4\n*edges\n1 2\n2 3\n3 4\n", NetworkKind::Undirected);
    std::istringstream zin("0\n1\n2\n2\n");
    auto zones = parseZones(zin, path);
    auto y = bindOutcome(path, OutcomeVector(std::vector<std::int8_t>{1, 0, 1, 0}));
    applySnowballConditioning(y, zones);
    CHECK(y.isFree(0));
    CHECK(y.isFree(1));
    CHECK_FALSE(y.isFree(2));
    CHECK_FALSE(y.isFree(3));
    CHECK(y.value(2) == 1);

    std::istringstream single("0\n0\n0\n0\n");
    auto oneWave = parseZones(single, path);
    auto z = bindOutcome(path, OutcomeVector::zeros(4));
    applySnowballConditioning(z, oneWave);
    CHECK(z.freeNodes().size() == 4);
  }

  TEST_CASE("bipartite outcomes live on mode A") {
    auto net = parse("*vertices 5 3\n*edges\n1 4\n2 5\n", NetworkKind::Bipartite);
    auto y = bindOutcome(net, OutcomeVector(std::vector<std::int8_t>{1, 0, 1, 1, 0}));
    CHECK(y.value(3) == OutcomeVector::kFixedNA);
    CHECK(y.value(4) == OutcomeVector::kFixedNA);
    CHECK(y.freeNodes().size() == 3);
    CHECK_THROWS_AS(bindOutcome(net, OutcomeVector::zeros(4)), Error);
  }

  TEST_CASE("loading is deterministic") {
    const std::string text = "*vertices 6\n*edges\n1 2\n3 4\n2 5\n6 1\n";
    auto a = parse(text, NetworkKind::Undirected);
    auto b = parse(text, NetworkKind::Undirected);
    CHECK(a.edges() == b.edges());
    for (NodeId i = 0; i < 6; ++i) {
      CHECK(std::equal(a.neighbors(i).begin(), a.neighbors(i).end(), b.neighbors(i).begin(), b.neighbors(i).end()));
    }
  }
}
