#include "alaam/effects.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>

#include "alaam/error.hpp"
#include "alaam/textio.hpp"

namespace alaam {

namespace {

struct KindInfo {
  EffectKind kind;
  std::string_view token;
};

constexpr std::array kKinds{
    KindInfo{EffectKind::Density, "Density"},
    KindInfo{EffectKind::Activity, "Activity"},
    KindInfo{EffectKind::Contagion, "Contagion"},
    KindInfo{EffectKind::EgoBinary, "oOb"},
    KindInfo{EffectKind::EgoContinuous, "oOc"},
    KindInfo{EffectKind::EgoCategoricalMatch, "oO_Osame"},
    KindInfo{EffectKind::PartnerAttr, "PartnerAttr"},
    KindInfo{EffectKind::GWActivity, "GWActivity"},
    KindInfo{EffectKind::TriangleT1, "TriangleT1"},
    KindInfo{EffectKind::TriangleT2, "TriangleT2"},
    KindInfo{EffectKind::TriangleT3, "TriangleT3"},
    KindInfo{EffectKind::Sender, "Sender"},
    KindInfo{EffectKind::Receiver, "Receiver"},
    KindInfo{EffectKind::EgoInTwoStar, "EgoInTwoStar"},
    KindInfo{EffectKind::EgoOutTwoStar, "EgoOutTwoStar"},
    KindInfo{EffectKind::Reciprocity, "Reciprocity"},
    KindInfo{EffectKind::ContagionReciprocity, "ContagionReciprocity"},
    KindInfo{EffectKind::TwoPathContagion, "TwoPathContagion"},
};

// Sorted-list intersection size.
int commonNeighbors(std::span<const NodeId> a, std::span<const NodeId> b) {
  int n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

inline double active(std::span<const std::int8_t> y, NodeId u) {
  return y[u] == OutcomeVector::kOne ? 1.0 : 0.0;
}

}  // namespace

std::string_view effectToken(EffectKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.token;
  }
  return "?";
}

std::optional<EffectKind> effectKindFromToken(std::string_view token) {
  for (const auto& k : kKinds) {
    if (k.token == token) return k.kind;
  }
  return std::nullopt;
}

std::optional<AttributeKind> requiredAttributeKind(EffectKind kind) {
  switch (kind) {
    case EffectKind::EgoBinary: return AttributeKind::Binary;
    case EffectKind::EgoContinuous:
    case EffectKind::PartnerAttr: return AttributeKind::Continuous;
    case EffectKind::EgoCategoricalMatch: return AttributeKind::Categorical;
    default: return std::nullopt;
  }
}

bool isGeometricallyWeighted(EffectKind kind) { return kind == EffectKind::GWActivity; }

bool usesTwoPaths(EffectKind kind) {
  return kind == EffectKind::TriangleT1 || kind == EffectKind::TriangleT2 ||
         kind == EffectKind::TwoPathContagion;
}

bool supportsNetworkKind(EffectKind kind, NetworkKind netKind) {
  const bool und = netKind == NetworkKind::Undirected;
  const bool dir = netKind == NetworkKind::Directed;
  const bool bip = netKind == NetworkKind::Bipartite;
  switch (kind) {
    case EffectKind::Density: return true;
    case EffectKind::Activity: return und || bip;
    case EffectKind::Contagion:
    case EffectKind::EgoBinary:
    case EffectKind::EgoContinuous: return und || dir;
    case EffectKind::EgoCategoricalMatch:
    case EffectKind::PartnerAttr:
    case EffectKind::GWActivity:
    case EffectKind::TriangleT1:
    case EffectKind::TriangleT2:
    case EffectKind::TriangleT3: return und;
    case EffectKind::Sender:
    case EffectKind::Receiver:
    case EffectKind::EgoInTwoStar:
    case EffectKind::EgoOutTwoStar:
    case EffectKind::Reciprocity:
    case EffectKind::ContagionReciprocity: return dir;
    case EffectKind::TwoPathContagion: return bip;
  }
  return false;
}

std::string EffectSpec::name() const {
  std::string out(effectToken(kind));
  if (!attr.empty()) out += "_" + attr;
  if (decay) out += "_" + textio::formatDouble(*decay);
  return out;
}

std::string EffectSpec::token() const {
  std::string out(effectToken(kind));
  if (!attr.empty()) out += ":" + attr;
  if (decay) out += ":" + textio::formatDouble(*decay);
  return out;
}

EffectSpec parseEffect(std::string_view token) {
  auto text = textio::trim(token);
  auto parts = textio::split(text, ':');
  auto kind = effectKindFromToken(parts[0]);
  if (!kind) throw ModelError("unknown effect '" + parts[0] + "'");
  EffectSpec e;
  e.kind = *kind;
  const bool needsAttr = requiredAttributeKind(*kind).has_value();
  const bool needsDecay = isGeometricallyWeighted(*kind);
  const std::size_t expected = 1 + (needsAttr ? 1 : 0) + (needsDecay ? 1 : 0);
  if (parts.size() != expected) {
    std::string form(effectToken(*kind));
    if (needsAttr) form += ":<attribute>";
    if (needsDecay) form += ":<decay>";
    throw ModelError("effect '" + std::string(text) + "' must have the form " + form);
  }
  std::size_t next = 1;
  if (needsAttr) {
    e.attr = parts[next++];
    if (e.attr.empty()) throw ModelError("effect '" + std::string(text) + "' has an empty attribute name");
  }
  if (needsDecay) {
    auto d = textio::parseDouble(parts[next]);
    if (!d || !std::isfinite(*d) || *d <= 0.0) {
      throw ModelError("effect '" + std::string(text) + "': decay must be a positive real");
    }
    e.decay = *d;
  }
  return e;
}

void validateEffect(const EffectSpec& e, NetworkKind netKind, const AttributeTable& attrs) {
  if (!supportsNetworkKind(e.kind, netKind)) {
    throw ModelError("effect " + e.token() + " is not defined for " + std::string(toString(netKind)) +
                     " networks");
  }
  if (auto need = requiredAttributeKind(e.kind)) {
    auto have = attrs.kindOf(e.attr);
    if (!have) throw ModelError("effect " + e.token() + ": no attribute named '" + e.attr + "'");
    if (*have != *need) {
      throw ModelError("effect " + e.token() + ": attribute '" + e.attr + "' is " +
                       std::string(toString(*have)) + ", expected " + std::string(toString(*need)));
    }
  } else if (!e.attr.empty()) {
    throw ModelError("effect " + e.token() + " does not take an attribute");
  }
  if (isGeometricallyWeighted(e.kind) != e.decay.has_value()) {
    throw ModelError("effect " + e.token() + ": decay given iff geometrically weighted");
  }
  if (e.decay && !(*e.decay > 0.0)) throw ModelError("effect " + e.token() + ": decay must be positive");
}

EffectSpec parseEffect(std::string_view token, NetworkKind netKind, const AttributeTable& attrs) {
  auto e = parseEffect(token);
  validateEffect(e, netKind, attrs);
  return e;
}

std::vector<std::string> ModelSpec::names() const {
  std::vector<std::string> out;
  out.reserve(effects.size());
  for (const auto& e : effects) out.push_back(e.name());
  return out;
}

std::string ModelSpec::tokens() const {
  std::vector<std::string> out;
  for (const auto& e : effects) out.push_back(e.token());
  return textio::join(out, ",");
}

std::optional<std::size_t> ModelSpec::indexOf(EffectKind kind) const {
  for (std::size_t k = 0; k < effects.size(); ++k) {
    if (effects[k].kind == kind) return k;
  }
  return std::nullopt;
}

ModelSpec parseModel(std::string_view text, NetworkKind netKind, const AttributeTable& attrs,
                     std::vector<std::string>* warnings) {
  ModelSpec model;
  for (const auto& tok : textio::split(text, ',')) {
    if (textio::trim(tok).empty()) continue;
    auto e = parseEffect(tok, netKind, attrs);
    if (std::find(model.effects.begin(), model.effects.end(), e) != model.effects.end()) {
      throw ModelError("effect " + e.token() + " listed twice");
    }
    model.effects.push_back(std::move(e));
  }
  if (model.effects.empty()) throw ModelError("model has no effects");
  if (model.effects.front().kind != EffectKind::Density && warnings) {
    warnings->push_back("first effect is not Density; the model has no intercept term first");
  }
  return model;
}

// ---------------------------------------------------------------- Model

Model::Model(ModelSpec spec, const Network& net, const AttributeTable& attrs, TwoPathPolicy policy)
    : spec_(std::move(spec)), net_(&net) {
  const NodeId n = net.nodeCount();
  bool wantTwoPaths = false;
  for (const auto& e : spec_.effects) {
    validateEffect(e, net.kind(), attrs);
    wantTwoPaths = wantTwoPaths || usesTwoPaths(e.kind);
  }
  if (wantTwoPaths && policy == TwoPathPolicy::Auto) {
    twoPaths_ = std::make_shared<const TwoPathMatrix>(TwoPathMatrix::build(net));
  }

  for (const auto& e : spec_.effects) {
    Bound b{e.kind, {}};
    auto fill = [&](auto&& f) {
      b.fixedDelta.resize(n);
      for (NodeId i = 0; i < n; ++i) b.fixedDelta[i] = f(i);
    };
    switch (e.kind) {
      case EffectKind::Density: fill([](NodeId) { return 1.0; }); break;
      case EffectKind::Activity:
      case EffectKind::Sender: fill([&](NodeId i) { return double(net.outDegree(i)); }); break;
      case EffectKind::Receiver: fill([&](NodeId i) { return double(net.inDegree(i)); }); break;
      case EffectKind::EgoInTwoStar:
        fill([&](NodeId i) {
          double d = net.inDegree(i);
          return d * (d - 1) / 2;
        });
        break;
      case EffectKind::EgoOutTwoStar:
        fill([&](NodeId i) {
          double d = net.outDegree(i);
          return d * (d - 1) / 2;
        });
        break;
      case EffectKind::Reciprocity:
        fill([&](NodeId i) {
          double c = 0;
          for (NodeId u : net.outNeighbors(i)) c += net.hasArc(u, i) ? 1.0 : 0.0;
          return c;
        });
        break;
      case EffectKind::EgoBinary: {
        auto w = attrs.binary(e.attr);
        fill([&](NodeId i) { return isNA(w[i]) ? 0.0 : w[i]; });
        break;
      }
      case EffectKind::EgoContinuous: {
        auto w = attrs.continuous(e.attr);
        fill([&](NodeId i) { return isNA(w[i]) ? 0.0 : w[i]; });
        break;
      }
      case EffectKind::PartnerAttr: {
        auto w = attrs.continuous(e.attr);
        fill([&](NodeId i) {
          double s = 0;
          for (NodeId u : net.neighbors(i)) s += isNA(w[u]) ? 0.0 : w[u];
          return s;
        });
        break;
      }
      case EffectKind::EgoCategoricalMatch: {
        auto c = attrs.categorical(e.attr);
        fill([&](NodeId i) {
          if (c[i] == AttributeTable::kCategoricalNA) return 0.0;
          double s = 0;
          for (NodeId u : net.neighbors(i)) s += c[u] == c[i] ? 1.0 : 0.0;
          return s;
        });
        break;
      }
      case EffectKind::GWActivity: {
        const double alpha = *e.decay;
        const double scale = std::exp(alpha);
        const double base = 1.0 - std::exp(-alpha);
        fill([&](NodeId i) { return scale * (1.0 - std::pow(base, net.degree(i))); });
        break;
      }
      case EffectKind::TriangleT1:
        fill([&](NodeId i) {
          long long pairs = 0;
          for (NodeId u : net.neighbors(i)) {
            pairs += twoPaths_ ? twoPaths_->count(i, u) : commonNeighbors(net.neighbors(i), net.neighbors(u));
          }
          return double(pairs / 2);
        });
        break;
      case EffectKind::Contagion:
      case EffectKind::TriangleT2:
      case EffectKind::TriangleT3:
      case EffectKind::ContagionReciprocity:
      case EffectKind::TwoPathContagion: break;
    }
    bound_.push_back(std::move(b));
  }
}

double Model::dynamicDelta(const Bound& b, std::span<const std::int8_t> y, NodeId i) const {
  const Network& net = *net_;
  switch (b.kind) {
    case EffectKind::Contagion: {
      double s = 0;
      for (NodeId u : net.outNeighbors(i)) s += active(y, u);
      if (net.isDirected()) {
        for (NodeId u : net.inNeighbors(i)) s += active(y, u);
      }
      return s;
    }
    case EffectKind::ContagionReciprocity: {
      double s = 0;
      for (NodeId u : net.outNeighbors(i)) {
        if (y[u] == OutcomeVector::kOne && net.hasArc(u, i)) s += 1.0;
      }
      return s;
    }
    case EffectKind::TriangleT2: {
      double s = 0;
      for (NodeId u : net.neighbors(i)) {
        if (y[u] != OutcomeVector::kOne) continue;
        s += twoPaths_ ? twoPaths_->count(i, u) : commonNeighbors(net.neighbors(i), net.neighbors(u));
      }
      return s;
    }
    case EffectKind::TriangleT3: {
      double s = 0;
      for (NodeId u : net.neighbors(i)) {
        if (y[u] != OutcomeVector::kOne) continue;
        for (NodeId v : net.neighbors(u)) {
          if (v > u && y[v] == OutcomeVector::kOne && net.hasEdge(i, v)) s += 1.0;
        }
      }
      return s;
    }
    case EffectKind::TwoPathContagion: {
      double s = 0;
      if (twoPaths_) {
        for (const auto& [u, count] : twoPaths_->row(i)) s += count * active(y, u);
      } else {
        for (NodeId k : net.neighbors(i)) {
          for (NodeId u : net.neighbors(k)) {
            if (u != i) s += active(y, u);
          }
        }
      }
      return s;
    }
    default: break;
  }
  assert(false && "static effect reached dynamicDelta");
  return 0.0;
}

void Model::changeStatistics(std::span<const std::int8_t> y, NodeId i, std::span<double> out) const {
  assert(y[i] != OutcomeVector::kOne && "change statistics are for the 0 -> 1 toggle");
  assert(out.size() == bound_.size());
  for (std::size_t k = 0; k < bound_.size(); ++k) {
    const Bound& b = bound_[k];
    out[k] = b.fixedDelta.empty() ? dynamicDelta(b, y, i) : b.fixedDelta[i];
  }
}

std::vector<double> Model::changeStatistics(const OutcomeVector& y, NodeId i) const {
  std::vector<double> out(size());
  changeStatistics(y.values(), i, out);
  return out;
}

std::vector<double> Model::observedStatistics(const OutcomeVector& y) const {
  auto order = y.activeNodes();
  return observedStatistics(y, order);
}

std::vector<double> Model::observedStatistics(const OutcomeVector& y, std::span<const NodeId> order) const {
  std::vector<std::int8_t> work(y.values().begin(), y.values().end());
  for (auto& v : work) {
    if (v == OutcomeVector::kOne) v = OutcomeVector::kZero;
  }
  std::vector<double> z(size(), 0.0);
  std::vector<double> delta(size());
  for (NodeId i : order) {
    assert(y.isActive(i) && work[i] == OutcomeVector::kZero);
    changeStatistics(work, i, delta);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += delta[k];
    work[i] = OutcomeVector::kOne;
  }
  return z;
}

}  // namespace alaam
