#include "alaam/network.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "alaam/error.hpp"
#include "alaam/textio.hpp"

namespace alaam {

LoadError::LoadError(Code code, std::string source, std::size_t line, const std::string& what)
    : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
      code_(code),
      source_(std::move(source)),
      line_(line) {}

std::string_view toString(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::Undirected: return "undirected";
    case NetworkKind::Directed: return "directed";
    case NetworkKind::Bipartite: return "bipartite";
  }
  return "?";
}

NetworkKind parseNetworkKind(std::string_view text) {
  auto t = textio::toLower(text);
  if (t == "undirected") return NetworkKind::Undirected;
  if (t == "directed") return NetworkKind::Directed;
  if (t == "bipartite") return NetworkKind::Bipartite;
  throw Error("unknown network kind '" + std::string(text) + "'");
}

namespace {

std::ifstream openOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(LoadError::Code::Io, path.string(), 0, "cannot open file");
  return in;
}

}  // namespace

// ---------------------------------------------------------------- Network

Network Network::fromEdges(NetworkKind kind, NodeId nodeCount, std::span<const Edge> edges,
                           NodeId modeASize) {
  if (nodeCount <= 0) {
    throw LoadError(LoadError::Code::MalformedHeader, "<edges>", 0, "node count must be positive");
  }
  if (kind == NetworkKind::Bipartite && (modeASize <= 0 || modeASize >= nodeCount)) {
    throw LoadError(LoadError::Code::MalformedHeader, "<edges>", 0,
                    "bipartite mode A size must lie in [1, N-1]");
  }
  Network net;
  net.kind_ = kind;
  net.modeASize_ = kind == NetworkKind::Bipartite ? modeASize : 0;
  net.out_.assign(nodeCount, {});
  net.outSet_.assign(nodeCount, {});
  if (kind == NetworkKind::Directed) net.in_.assign(nodeCount, {});

  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= nodeCount || j >= nodeCount) {
      throw LoadError(LoadError::Code::NodeOutOfRange, "<edges>", 0,
                      "node id out of range in edge (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
    if (i == j) {
      throw LoadError(LoadError::Code::SelfLoop, "<edges>", 0, "self-loop on node " + std::to_string(i));
    }
    if (kind == NetworkKind::Bipartite && net.isModeA(i) == net.isModeA(j)) {
      throw LoadError(LoadError::Code::WithinModeEdge, "<edges>", 0,
                      "bipartite edge within one mode (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
    if (net.outSet_[i].contains(j)) continue;
    net.outSet_[i].insert(j);
    net.out_[i].push_back(j);
    if (kind == NetworkKind::Directed) {
      net.in_[j].push_back(i);
    } else {
      net.outSet_[j].insert(i);
      net.out_[j].push_back(i);
    }
    ++net.edgeCount_;
  }
  for (auto& v : net.out_) std::sort(v.begin(), v.end());
  for (auto& v : net.in_) std::sort(v.begin(), v.end());
  return net;
}

bool Network::hasEdge(NodeId i, NodeId j) const { return outSet_[i].contains(j); }

std::vector<Edge> Network::edges() const {
  std::vector<Edge> out;
  out.reserve(edgeCount_);
  for (NodeId i = 0; i < nodeCount(); ++i) {
    for (NodeId j : out_[i]) {
      if (isDirected() || i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

Network parseNetwork(std::istream& in, NetworkKind kind, const std::string& sourceName) {
  using Code = LoadError::Code;
  std::string line;
  std::size_t lineNo = 0;
  NodeId n = 0;
  NodeId modeA = 0;
  bool haveVertices = false;
  bool inEdges = false;
  std::vector<Edge> edges;

  auto isModeA = [&](NodeId id) { return id < modeA; };

  while (std::getline(in, line)) {
    ++lineNo;
    auto t = textio::trim(line);
    if (t.empty() || t.front() == '%') continue;
    auto tokens = textio::splitWhitespace(t);
    if (tokens.front().front() == '*') {
      auto keyword = textio::toLower(tokens.front());
      if (keyword == "*vertices") {
        if (haveVertices) throw LoadError(Code::MalformedHeader, sourceName, lineNo, "duplicate *vertices line");
        const std::size_t expected = kind == NetworkKind::Bipartite ? 3 : 2;
        if (tokens.size() != expected) {
          throw LoadError(Code::MalformedHeader, sourceName, lineNo,
                          kind == NetworkKind::Bipartite ? "expected '*vertices N M' for a bipartite network"
                                                         : "expected '*vertices N'");
        }
        auto nv = textio::parseInteger(tokens[1]);
        if (!nv || *nv <= 0) throw LoadError(Code::MalformedHeader, sourceName, lineNo, "bad vertex count");
        n = static_cast<NodeId>(*nv);
        if (kind == NetworkKind::Bipartite) {
          auto mv = textio::parseInteger(tokens[2]);
          if (!mv || *mv <= 0 || *mv >= n) {
            throw LoadError(Code::MalformedHeader, sourceName, lineNo, "bad mode A size (need 1 <= M < N)");
          }
          modeA = static_cast<NodeId>(*mv);
        }
        haveVertices = true;
      } else if (keyword == "*edges" || keyword == "*arcs") {
        if (!haveVertices) {
          throw LoadError(Code::MalformedHeader, sourceName, lineNo, keyword + " before *vertices");
        }
        inEdges = true;
      } else {
        throw LoadError(Code::MalformedHeader, sourceName, lineNo, "unknown section '" + std::string(tokens.front()) + "'");
      }
      continue;
    }
    if (!haveVertices) throw LoadError(Code::MalformedHeader, sourceName, lineNo, "missing *vertices header");
    if (!inEdges) continue;  // vertex label lines
    if (tokens.size() < 2) throw LoadError(Code::BadToken, sourceName, lineNo, "expected 'i j'");
    auto a = textio::parseInteger(tokens[0]);
    auto b = textio::parseInteger(tokens[1]);
    if (!a || !b) throw LoadError(Code::BadToken, sourceName, lineNo, "non-integer node id");
    if (*a < 1 || *a > n || *b < 1 || *b > n) {
      throw LoadError(Code::NodeOutOfRange, sourceName, lineNo,
                      "node id out of range 1.." + std::to_string(n));
    }
    NodeId i = static_cast<NodeId>(*a - 1);
    NodeId j = static_cast<NodeId>(*b - 1);
    if (i == j) throw LoadError(Code::SelfLoop, sourceName, lineNo, "self-loop on node " + std::to_string(*a));
    if (kind == NetworkKind::Bipartite && isModeA(i) == isModeA(j)) {
      throw LoadError(Code::WithinModeEdge, sourceName, lineNo, "bipartite edge within one mode");
    }
    edges.emplace_back(i, j);
  }
  if (!haveVertices) throw LoadError(Code::MalformedHeader, sourceName, 0, "missing *vertices header");
  return Network::fromEdges(kind, n, edges, modeA);
}

Network loadNetwork(const std::filesystem::path& path, NetworkKind kind) {
  auto in = openOrThrow(path);
  return parseNetwork(in, kind, path.string());
}

void writeNetwork(std::ostream& out, const Network& net) {
  out << "*vertices " << net.nodeCount();
  if (net.kind() == NetworkKind::Bipartite) out << ' ' << net.modeASize();
  out << '\n' << (net.isDirected() ? "*arcs" : "*edges") << '\n';
  for (const auto& [i, j] : net.edges()) out << i + 1 << ' ' << j + 1 << '\n';
}

// ---------------------------------------------------------------- attributes

std::string_view toString(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::Binary: return "binary";
    case AttributeKind::Continuous: return "continuous";
    case AttributeKind::Categorical: return "categorical";
  }
  return "?";
}

AttributeKind parseAttributeKind(std::string_view text) {
  auto t = textio::toLower(text);
  if (t == "binary" || t == "bin") return AttributeKind::Binary;
  if (t == "continuous" || t == "cont") return AttributeKind::Continuous;
  if (t == "categorical" || t == "cat") return AttributeKind::Categorical;
  throw Error("unknown attribute kind '" + std::string(text) + "'");
}

void AttributeTable::claimName(const std::string& name, AttributeKind kind, std::size_t length) {
  if (kinds_.contains(name)) {
    throw LoadError(LoadError::Code::DuplicateColumn, "<attributes>", 0, "duplicate attribute name '" + name + "'");
  }
  if (nodeCount_ == 0 && kinds_.empty()) nodeCount_ = static_cast<NodeId>(length);
  if (length != static_cast<std::size_t>(nodeCount_)) {
    throw LoadError(LoadError::Code::RowCountMismatch, "<attributes>", 0,
                    "attribute '" + name + "' has " + std::to_string(length) + " values, expected " +
                        std::to_string(nodeCount_));
  }
  kinds_.emplace(name, kind);
}

void AttributeTable::addBinary(std::string name, std::vector<double> values) {
  for (double v : values) {
    if (!isNA(v) && v != 0.0 && v != 1.0) throw Error("binary attribute '" + name + "' has a value other than 0/1/NA");
  }
  claimName(name, AttributeKind::Binary, values.size());
  binary_.emplace(std::move(name), std::move(values));
}

void AttributeTable::addContinuous(std::string name, std::vector<double> values) {
  claimName(name, AttributeKind::Continuous, values.size());
  continuous_.emplace(std::move(name), std::move(values));
}

void AttributeTable::addCategorical(std::string name, std::vector<int> values) {
  claimName(name, AttributeKind::Categorical, values.size());
  categorical_.emplace(std::move(name), std::move(values));
}

void AttributeTable::merge(const AttributeTable& other) {
  for (const auto& [name, v] : other.binary_) addBinary(name, v);
  for (const auto& [name, v] : other.continuous_) addContinuous(name, v);
  for (const auto& [name, v] : other.categorical_) addCategorical(name, v);
}

std::optional<AttributeKind> AttributeTable::kindOf(std::string_view name) const {
  auto it = kinds_.find(name);
  if (it == kinds_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> AttributeTable::binary(std::string_view name) const {
  auto it = binary_.find(name);
  if (it == binary_.end()) throw Error("no binary attribute '" + std::string(name) + "'");
  return it->second;
}

std::span<const double> AttributeTable::continuous(std::string_view name) const {
  auto it = continuous_.find(name);
  if (it == continuous_.end()) throw Error("no continuous attribute '" + std::string(name) + "'");
  return it->second;
}

std::span<const int> AttributeTable::categorical(std::string_view name) const {
  auto it = categorical_.find(name);
  if (it == categorical_.end()) throw Error("no categorical attribute '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> AttributeTable::names() const {
  std::vector<std::string> out;
  for (const auto& [name, kind] : kinds_) out.push_back(name);
  return out;
}

AttributeTable parseAttributes(std::istream& in, AttributeKind kind, NodeId nodeCount,
                               const std::string& sourceName) {
  using Code = LoadError::Code;
  std::string line;
  std::size_t lineNo = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++lineNo;
    auto t = textio::trim(line);
    if (t.empty()) continue;
    for (auto tok : textio::splitWhitespace(t)) {
      std::string name(tok);
      if (std::find(header.begin(), header.end(), name) != header.end()) {
        throw LoadError(Code::DuplicateColumn, sourceName, lineNo, "duplicate column name '" + name + "'");
      }
      header.push_back(std::move(name));
    }
  }
  if (header.empty()) throw LoadError(Code::MalformedHeader, sourceName, lineNo, "missing header line");

  const std::size_t cols = header.size();
  std::vector<std::vector<double>> real(cols);
  std::vector<std::vector<int>> cat(cols);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    auto t = textio::trim(line);
    if (t.empty()) continue;
    auto tokens = textio::splitWhitespace(t);
    ++rows;
    if (tokens.size() != cols) {
      throw LoadError(Code::BadToken, sourceName, lineNo,
                      "expected " + std::to_string(cols) + " fields, got " + std::to_string(tokens.size()));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      auto tok = tokens[c];
      auto bad = [&](const char* what) {
        return LoadError(Code::BadToken, sourceName, lineNo,
                         "row " + std::to_string(rows) + " column '" + header[c] + "': " + what + " '" +
                             std::string(tok) + "'");
      };
      if (kind == AttributeKind::Categorical) {
        if (tok == "NA") {
          cat[c].push_back(AttributeTable::kCategoricalNA);
          continue;
        }
        auto v = textio::parseInteger(tok);
        if (!v || *v < 0) throw bad("expected a non-negative integer or NA, got");
        cat[c].push_back(static_cast<int>(*v));
      } else {
        if (tok == "NA") {
          real[c].push_back(kNA);
          continue;
        }
        if (kind == AttributeKind::Binary) {
          if (tok != "0" && tok != "1") throw bad("expected 0, 1 or NA, got");
          real[c].push_back(tok == "1" ? 1.0 : 0.0);
        } else {
          auto v = textio::parseDouble(tok);
          if (!v || std::isnan(*v)) throw bad("expected a real number or NA, got");
          real[c].push_back(*v);
        }
      }
    }
  }
  if (rows != static_cast<std::size_t>(nodeCount)) {
    throw LoadError(Code::RowCountMismatch, sourceName, 0,
                    "found " + std::to_string(rows) + " rows, expected " + std::to_string(nodeCount));
  }
  AttributeTable table(nodeCount);
  for (std::size_t c = 0; c < cols; ++c) {
    switch (kind) {
      case AttributeKind::Binary: table.addBinary(header[c], std::move(real[c])); break;
      case AttributeKind::Continuous: table.addContinuous(header[c], std::move(real[c])); break;
      case AttributeKind::Categorical: table.addCategorical(header[c], std::move(cat[c])); break;
    }
  }
  return table;
}

AttributeTable loadAttributes(const std::filesystem::path& path, AttributeKind kind, NodeId nodeCount) {
  auto in = openOrThrow(path);
  return parseAttributes(in, kind, nodeCount, path.string());
}

// ---------------------------------------------------------------- outcome

OutcomeVector::OutcomeVector(std::vector<std::int8_t> values)
    : values_(std::move(values)), freeIndex_(values_.size(), -1) {
  for (NodeId i = 0; i < size(); ++i) {
    assert(values_[i] == kZero || values_[i] == kOne || values_[i] == kFixedNA);
    if (values_[i] != kFixedNA) {
      freeIndex_[i] = static_cast<NodeId>(free_.size());
      free_.push_back(i);
    }
  }
}

NodeId OutcomeVector::activeCount() const {
  return static_cast<NodeId>(std::count(values_.begin(), values_.end(), kOne));
}

std::vector<NodeId> OutcomeVector::activeNodes() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < size(); ++i) {
    if (values_[i] == kOne) out.push_back(i);
  }
  return out;
}

void OutcomeVector::toggle(NodeId i) {
  assert(isFree(i));
  values_[i] = values_[i] == kOne ? kZero : kOne;
}

void OutcomeVector::set(NodeId i, std::int8_t v) {
  assert(isFree(i) && (v == kZero || v == kOne));
  values_[i] = v;
}

void OutcomeVector::fix(NodeId i) {
  NodeId pos = freeIndex_[i];
  if (pos < 0) return;
  free_.erase(free_.begin() + pos);
  freeIndex_[i] = -1;
  for (std::size_t k = pos; k < free_.size(); ++k) freeIndex_[free_[k]] = static_cast<NodeId>(k);
}

OutcomeVector parseOutcome(std::istream& in, const std::string& sourceName) {
  std::vector<std::int8_t> values;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    auto t = textio::trim(line);
    if (t.empty()) continue;
    if (t == "0") {
      values.push_back(OutcomeVector::kZero);
    } else if (t == "1") {
      values.push_back(OutcomeVector::kOne);
    } else if (t == "NA") {
      values.push_back(OutcomeVector::kFixedNA);
    } else {
      throw LoadError(LoadError::Code::BadToken, sourceName, lineNo,
                      "expected 0, 1 or NA, got '" + std::string(t) + "'");
    }
  }
  return OutcomeVector(std::move(values));
}

OutcomeVector loadOutcome(const std::filesystem::path& path) {
  auto in = openOrThrow(path);
  return parseOutcome(in, path.string());
}

OutcomeVector bindOutcome(const Network& net, OutcomeVector outcome) {
  if (outcome.size() != net.nodeCount()) {
    throw LoadError(LoadError::Code::RowCountMismatch, "<outcome>", 0,
                    "outcome has " + std::to_string(outcome.size()) + " rows, network has " +
                        std::to_string(net.nodeCount()) + " nodes");
  }
  if (net.kind() != NetworkKind::Bipartite) return outcome;
  std::vector<std::int8_t> values(outcome.values().begin(), outcome.values().end());
  for (NodeId i = net.modeASize(); i < net.nodeCount(); ++i) values[i] = OutcomeVector::kFixedNA;
  OutcomeVector bound(std::move(values));
  for (NodeId i = 0; i < net.nodeCount(); ++i) {
    if (bound.isFree(i) && !outcome.isFree(i)) bound.fix(i);
  }
  return bound;
}

// ---------------------------------------------------------------- zones

ZoneAssignment parseZones(std::istream& in, const Network& net, const std::string& sourceName) {
  ZoneAssignment z;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    auto t = textio::trim(line);
    if (t.empty()) continue;
    auto v = textio::parseInteger(t);
    if (!v || *v < 0) {
      throw LoadError(LoadError::Code::BadToken, sourceName, lineNo,
                      "expected a non-negative integer zone, got '" + std::string(t) + "'");
    }
    z.zone.push_back(static_cast<int>(*v));
    z.maxZone = std::max(z.maxZone, static_cast<int>(*v));
  }
  if (z.zone.size() != static_cast<std::size_t>(net.nodeCount())) {
    throw LoadError(LoadError::Code::RowCountMismatch, sourceName, 0,
                    "found " + std::to_string(z.zone.size()) + " zones, expected " +
                        std::to_string(net.nodeCount()));
  }
  for (const auto& [i, j] : net.edges()) {
    if (std::abs(z.zone[i] - z.zone[j]) > 1) {
      throw LoadError(LoadError::Code::ZoneSpan, sourceName, 0,
                      "edge " + std::to_string(i + 1) + " " + std::to_string(j + 1) +
                          " spans zones differing by more than one");
    }
  }
  return z;
}

ZoneAssignment loadZones(const std::filesystem::path& path, const Network& net) {
  auto in = openOrThrow(path);
  return parseZones(in, net, path.string());
}

void applySnowballConditioning(OutcomeVector& outcome, const ZoneAssignment& zones) {
  assert(zones.zone.size() == static_cast<std::size_t>(outcome.size()));
  if (zones.maxZone < 1) return;
  for (NodeId i = 0; i < outcome.size(); ++i) {
    if (zones.zone[i] == zones.maxZone) outcome.fix(i);
  }
}

// ---------------------------------------------------------------- two-paths

TwoPathMatrix TwoPathMatrix::build(const Network& net) {
  TwoPathMatrix m;
  m.rows_.assign(net.nodeCount(), {});
  if (net.isDirected()) {
    for (NodeId k = 0; k < net.nodeCount(); ++k) {
      for (NodeId i : net.inNeighbors(k)) {
        for (NodeId j : net.outNeighbors(k)) {
          if (i != j) ++m.rows_[i][j];
        }
      }
    }
    return m;
  }
  for (NodeId k = 0; k < net.nodeCount(); ++k) {
    auto nb = net.neighbors(k);
    for (std::size_t a = 0; a < nb.size(); ++a) {
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        ++m.rows_[nb[a]][nb[b]];
        ++m.rows_[nb[b]][nb[a]];
      }
    }
  }
  return m;
}

int TwoPathMatrix::count(NodeId i, NodeId j) const {
  const auto& r = rows_[i];
  auto it = r.find(j);
  return it == r.end() ? 0 : it->second;
}

std::size_t TwoPathMatrix::nonZeroCount() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

}  // namespace alaam
