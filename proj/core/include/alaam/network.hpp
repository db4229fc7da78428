#pragma once

// Network, attribute, outcome and snowball-zone data model.
//
// Node ids are dense 0..N-1 in memory. All files use 1-based node ids for
// edges (Pajek convention) and one row per node, in id order, for tables.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace alaam {

using NodeId = std::int32_t;
using Edge = std::pair<NodeId, NodeId>;

enum class NetworkKind { Undirected, Directed, Bipartite };

std::string_view toString(NetworkKind kind);
// Accepts "undirected", "directed", "bipartite" (case-insensitive).
NetworkKind parseNetworkKind(std::string_view text);

class Network {
 public:
  // Validating constructor. Throws LoadError (line 0) on self-loops,
  // out-of-range ids or within-mode bipartite edges. Duplicate edges are
  // merged. For undirected/bipartite networks (i, j) and (j, i) are the same edge.
  static Network fromEdges(NetworkKind kind, NodeId nodeCount, std::span<const Edge> edges,
                           NodeId modeASize = 0);

  NetworkKind kind() const noexcept { return kind_; }
  bool isDirected() const noexcept { return kind_ == NetworkKind::Directed; }
  NodeId nodeCount() const noexcept { return static_cast<NodeId>(out_.size()); }
  // Bipartite only: nodes [0, modeASize) are mode A. Zero otherwise.
  NodeId modeASize() const noexcept { return modeASize_; }
  bool isModeA(NodeId i) const noexcept {
    return kind_ != NetworkKind::Bipartite || i < modeASize_;
  }

  // Undirected/bipartite: edge test (symmetric). Directed: arc i -> j.
  bool hasEdge(NodeId i, NodeId j) const;
  bool hasArc(NodeId i, NodeId j) const { return hasEdge(i, j); }

  // Sorted neighbour lists. For undirected and bipartite networks all three
  // return the same list.
  std::span<const NodeId> neighbors(NodeId i) const { return out_[i]; }
  std::span<const NodeId> outNeighbors(NodeId i) const { return out_[i]; }
  std::span<const NodeId> inNeighbors(NodeId i) const {
    return isDirected() ? std::span<const NodeId>(in_[i]) : std::span<const NodeId>(out_[i]);
  }

  NodeId degree(NodeId i) const { return static_cast<NodeId>(out_[i].size()); }
  NodeId outDegree(NodeId i) const { return degree(i); }
  NodeId inDegree(NodeId i) const { return static_cast<NodeId>(inNeighbors(i).size()); }

  // Number of edges (undirected/bipartite) or arcs (directed).
  std::size_t edgeCount() const noexcept { return edgeCount_; }

  // Order-normalised edge list: (i < j) for undirected edges, sorted.
  std::vector<Edge> edges() const;

 private:
  NetworkKind kind_ = NetworkKind::Undirected;
  NodeId modeASize_ = 0;
  std::size_t edgeCount_ = 0;
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<NodeId>> in_;
  std::vector<std::unordered_set<NodeId>> outSet_;
};

Network parseNetwork(std::istream& in, NetworkKind kind, const std::string& sourceName = "<stream>");
Network loadNetwork(const std::filesystem::path& path, NetworkKind kind);
void writeNetwork(std::ostream& out, const Network& net);

// Nodal covariates. NA is NaN for binary/continuous, -1 for categorical.
enum class AttributeKind { Binary, Continuous, Categorical };

std::string_view toString(AttributeKind kind);
AttributeKind parseAttributeKind(std::string_view text);

class AttributeTable {
 public:
  static constexpr int kCategoricalNA = -1;

  AttributeTable() = default;
  explicit AttributeTable(NodeId nodeCount) : nodeCount_(nodeCount) {}

  NodeId nodeCount() const noexcept { return nodeCount_; }

  // Values must have length nodeCount. Binary values must be 0, 1 or NaN.
  void addBinary(std::string name, std::vector<double> values);
  void addContinuous(std::string name, std::vector<double> values);
  void addCategorical(std::string name, std::vector<int> values);

  // Adds every column of other; throws on a name clash or length mismatch.
  void merge(const AttributeTable& other);

  std::optional<AttributeKind> kindOf(std::string_view name) const;
  std::span<const double> binary(std::string_view name) const;
  std::span<const double> continuous(std::string_view name) const;
  std::span<const int> categorical(std::string_view name) const;
  std::vector<std::string> names() const;
  bool empty() const noexcept { return kinds_.empty(); }

 private:
  void claimName(const std::string& name, AttributeKind kind, std::size_t length);

  NodeId nodeCount_ = 0;
  std::map<std::string, AttributeKind, std::less<>> kinds_;
  std::map<std::string, std::vector<double>, std::less<>> binary_;
  std::map<std::string, std::vector<double>, std::less<>> continuous_;
  std::map<std::string, std::vector<int>, std::less<>> categorical_;
};

inline bool isNA(double v) { return std::isnan(v); }
inline constexpr double kNA = std::numeric_limits<double>::quiet_NaN();

AttributeTable parseAttributes(std::istream& in, AttributeKind kind, NodeId nodeCount,
                               const std::string& sourceName = "<stream>");
AttributeTable loadAttributes(const std::filesystem::path& path, AttributeKind kind,
                              NodeId nodeCount);

// Per-node binary outcome. FixedNA entries (and any node fixed by
// conditioning) are never toggled.
class OutcomeVector {
 public:
  static constexpr std::int8_t kZero = 0;
  static constexpr std::int8_t kOne = 1;
  static constexpr std::int8_t kFixedNA = -1;

  OutcomeVector() = default;
  explicit OutcomeVector(std::vector<std::int8_t> values);
  static OutcomeVector zeros(NodeId n) { return OutcomeVector(std::vector<std::int8_t>(n, kZero)); }

  NodeId size() const noexcept { return static_cast<NodeId>(values_.size()); }
  std::int8_t value(NodeId i) const { return values_[i]; }
  bool isActive(NodeId i) const { return values_[i] == kOne; }
  bool isFree(NodeId i) const { return freeIndex_[i] >= 0; }
  std::span<const std::int8_t> values() const noexcept { return values_; }
  std::span<const NodeId> freeNodes() const noexcept { return free_; }
  NodeId activeCount() const;
  std::vector<NodeId> activeNodes() const;

  // Flip a free node between 0 and 1.
  void toggle(NodeId i);
  // Remove a node from the free set, keeping its value.
  void fix(NodeId i);
  // Sets a free node's value without the free-set check on the value itself.
  void set(NodeId i, std::int8_t v);

  bool operator==(const OutcomeVector& other) const { return values_ == other.values_ && free_ == other.free_; }

 private:
  std::vector<std::int8_t> values_;
  std::vector<NodeId> free_;
  std::vector<NodeId> freeIndex_;
};

OutcomeVector parseOutcome(std::istream& in, const std::string& sourceName = "<stream>");
OutcomeVector loadOutcome(const std::filesystem::path& path);
// Checks the length against the network and, for bipartite networks, marks
// every mode-B node FixedNA (the outcome lives on mode A).
OutcomeVector bindOutcome(const Network& net, OutcomeVector outcome);

struct ZoneAssignment {
  std::vector<int> zone;
  int maxZone = 0;
};

ZoneAssignment parseZones(std::istream& in, const Network& net, const std::string& sourceName = "<stream>");
ZoneAssignment loadZones(const std::filesystem::path& path, const Network& net);

// Snowball conditioning: when there are at least two waves, nodes in the
// outermost wave keep their observed outcome and are removed from the free set.
void applySnowballConditioning(OutcomeVector& outcome, const ZoneAssignment& zones);

// Sparse count of length-two paths. Undirected/bipartite: count(i, j) is
// |N(i) ∩ N(j)|. Directed: count(i, j) is #{k : i -> k -> j}. Immutable.
class TwoPathMatrix {
 public:
  static TwoPathMatrix build(const Network& net);

  int count(NodeId i, NodeId j) const;
  const std::unordered_map<NodeId, int>& row(NodeId i) const { return rows_[i]; }
  std::size_t nonZeroCount() const;

 private:
  std::vector<std::unordered_map<NodeId, int>> rows_;
};

}  // namespace alaam
