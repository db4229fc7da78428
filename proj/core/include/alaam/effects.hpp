#pragma once

// Model specification and change statistics.
//
// A change statistic is the increase of a model statistic when one node's
// outcome goes from 0 to 1, all else fixed. Samplers and estimators only
// ever need these; observed statistics are sums of change statistics.
//
// Catalogue (i is the toggled node, y the outcome, FixedNA counts as 0):
//
//   Density                1
//   Activity               d_i
//   Contagion (undir.)     sum_{u in N(i)} y_u
//   Contagion (dir.)       sum_{i->u} y_u + sum_{u->i} y_u
//   oOb:a / oOc:a          w_i                       (NA -> 0)
//   oO_Osame:c             #{u in N(i) : c_u == c_i} (NA matches nothing)
//   PartnerAttr:a          sum_{u in N(i)} w_u       (NA -> 0)
//   GWActivity:alpha       e^a (1 - (1 - e^-a)^d_i)
//   TriangleT1             #{u < v in N(i) : u ~ v}
//   TriangleT2             sum over triangles {i,u,v} of y_u + y_v
//   TriangleT3             sum over triangles {i,u,v} of y_u y_v
//   Sender / Receiver      d_i^out / d_i^in
//   EgoOutTwoStar          C(d_i^out, 2)
//   EgoInTwoStar           C(d_i^in, 2)
//   Reciprocity            #{u : i->u and u->i}
//   ContagionReciprocity   #{u : i->u and u->i and y_u = 1}
//   TwoPathContagion       sum_{u in mode A, u != i} twoPaths(i, u) y_u  (bipartite)
//
// Bipartite networks support Density, Activity and TwoPathContagion on mode A.
// New effects go in EffectKind, the name table in effects.cpp, the kind
// compatibility check and Model::changeStatistics.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alaam/network.hpp"

namespace alaam {

enum class EffectKind {
  Density,
  Activity,
  Contagion,
  EgoBinary,            // oOb
  EgoContinuous,        // oOc
  EgoCategoricalMatch,  // oO_Osame
  PartnerAttr,
  GWActivity,
  TriangleT1,
  TriangleT2,
  TriangleT3,
  Sender,
  Receiver,
  EgoInTwoStar,
  EgoOutTwoStar,
  Reciprocity,
  ContagionReciprocity,
  TwoPathContagion,
};

std::string_view effectToken(EffectKind kind);
std::optional<EffectKind> effectKindFromToken(std::string_view token);
// Which attribute kind an effect needs, if any.
std::optional<AttributeKind> requiredAttributeKind(EffectKind kind);
bool isGeometricallyWeighted(EffectKind kind);
bool supportsNetworkKind(EffectKind kind, NetworkKind netKind);
// Effects that read the two-path cache when one is built.
bool usesTwoPaths(EffectKind kind);

struct EffectSpec {
  EffectKind kind = EffectKind::Density;
  std::string attr;             // empty unless the kind takes an attribute
  std::optional<double> decay;  // geometrically weighted kinds only

  // Display / CSV name, e.g. "Contagion", "oOc_age", "GWActivity_2".
  std::string name() const;
  // Grammar form, e.g. "oOc:age", "GWActivity:2".
  std::string token() const;

  bool operator==(const EffectSpec&) const = default;
};

// Grammar only: Kind[:attrName][:decay].
EffectSpec parseEffect(std::string_view token);
// Grammar plus binding checks against the network kind and attributes.
EffectSpec parseEffect(std::string_view token, NetworkKind netKind, const AttributeTable& attrs);
void validateEffect(const EffectSpec& effect, NetworkKind netKind, const AttributeTable& attrs);

struct ModelSpec {
  std::vector<EffectSpec> effects;

  std::size_t size() const noexcept { return effects.size(); }
  std::vector<std::string> names() const;
  std::string tokens() const;  // comma-separated grammar form
  std::optional<std::size_t> indexOf(EffectKind kind) const;
};

// Comma-separated effect tokens, order preserved. Duplicate effects are an
// error. A missing leading Density produces a warning string, not an error.
ModelSpec parseModel(std::string_view text, NetworkKind netKind, const AttributeTable& attrs,
                     std::vector<std::string>* warnings = nullptr);

enum class TwoPathPolicy { Auto, Disabled };

// A ModelSpec bound to one network and its attributes. Holds a reference
// to the network, which must outlive the model.
class Model {
 public:
  Model(ModelSpec spec, const Network& net, const AttributeTable& attrs,
        TwoPathPolicy policy = TwoPathPolicy::Auto);

  std::size_t size() const noexcept { return spec_.size(); }
  const ModelSpec& spec() const noexcept { return spec_; }
  const Network& network() const noexcept { return *net_; }
  std::vector<std::string> names() const { return spec_.names(); }
  const TwoPathMatrix* twoPaths() const noexcept { return twoPaths_.get(); }

  // Requires y[i] != 1 (the change is for the 0 -> 1 toggle).
  void changeStatistics(std::span<const std::int8_t> y, NodeId i, std::span<double> out) const;
  std::vector<double> changeStatistics(const OutcomeVector& y, NodeId i) const;

  // z(y), accumulated from change statistics over the active nodes in
  // ascending id order.
  std::vector<double> observedStatistics(const OutcomeVector& y) const;
  // Same, adding the active nodes in the given order (must be a permutation
  // of y.activeNodes()).
  std::vector<double> observedStatistics(const OutcomeVector& y, std::span<const NodeId> order) const;

 private:
  struct Bound {
    EffectKind kind;
    // Per-node change statistic for effects that do not depend on y.
    std::vector<double> fixedDelta;
  };

  double dynamicDelta(const Bound& b, std::span<const std::int8_t> y, NodeId i) const;

  ModelSpec spec_;
  const Network* net_;
  std::shared_ptr<const TwoPathMatrix> twoPaths_;
  std::vector<Bound> bound_;
};

}  // namespace alaam
