#pragma once

// logic.hpp
//
// Formula trees over embedding predicates. A predicate compares the
// distance between the current embedding and a named target against a
// threshold; reach means "get within eps", avoid means "stay farther
// than eps". Both are stored in the signed normal form f(z) > 0:
//   reach: f(z) = eps - dist(z, target)
//   avoid: f(z) = dist(z, target) - eps
//
// The core operators are Pred, True, Not, And, Until; Or / Eventually /
// Always are first-class nodes for readable printing and are reduced by
// normalize() to their definitions:
//   F p     =  true U p
//   G p     =  ! (true U ! p)
//   a | b   =  ! (! a & ! b)

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "etl/core.hpp"
#include "etl/metrics.hpp"

namespace etl {

// Named target embedding referenced by predicates.
struct TargetRef {
  std::string name;
  Embedding embedding;
  Metric metric = Metric::l2;
  std::string role;  // free-form label ("goal", "avoid", ...)

  TargetRef(std::string name_, Embedding embedding_, Metric metric_,
            std::string role_ = "")
      : name(std::move(name_)),
        embedding(std::move(embedding_)),
        metric(metric_),
        role(std::move(role_)) {
    if (!metric_compatible(metric, embedding.kind()))
      throw Error(Errc::incompatible_metric,
                  "target '" + name + "': " + metric_name(metric) +
                      " cannot evaluate " + kind_name(embedding.kind()) +
                      " embeddings");
  }

  friend bool operator==(const TargetRef& a, const TargetRef& b) {
    return a.name == b.name && a.metric == b.metric &&
           a.embedding == b.embedding;
  }
};

enum class Sense { reach, avoid };

struct Predicate {
  TargetRef target;
  double threshold = 0.0;
  Sense sense = Sense::reach;

  Predicate(TargetRef target_, double threshold_, Sense sense_)
      : target(std::move(target_)), threshold(threshold_), sense(sense_) {
    if (!(threshold >= 0.0) || !std::isfinite(threshold))
      throw Error(Errc::negative_threshold,
                  "predicate threshold must be finite and >= 0");
  }

  friend bool operator==(const Predicate& a, const Predicate& b) {
    return a.sense == b.sense && a.threshold == b.threshold &&
           a.target == b.target;
  }
};

enum class Op {
  pred,
  truth,
  negation,
  conjunction,
  disjunction,
  until,
  eventually,
  always,
};

// Immutable formula tree with shared subterms.
class Formula {
 public:
  struct Node {
    Op op;
    std::shared_ptr<const Predicate> pred;  // op == pred only
    std::shared_ptr<const Node> lhs;        // unary child / left operand
    std::shared_ptr<const Node> rhs;        // right operand of binaries
  };

  static Formula predicate(Predicate p) {
    return Formula(std::make_shared<Node>(
        Node{Op::pred, std::make_shared<Predicate>(std::move(p)), nullptr,
             nullptr}));
  }
  static Formula truth() {
    return Formula(std::make_shared<Node>(Node{Op::truth, nullptr, nullptr,
                                               nullptr}));
  }
  static Formula negation(Formula f) {
    return unary(Op::negation, std::move(f));
  }
  static Formula conjunction(Formula a, Formula b) {
    return binary(Op::conjunction, std::move(a), std::move(b));
  }
  static Formula disjunction(Formula a, Formula b) {
    return binary(Op::disjunction, std::move(a), std::move(b));
  }
  static Formula until(Formula a, Formula b) {
    return binary(Op::until, std::move(a), std::move(b));
  }
  static Formula eventually(Formula f) {
    return unary(Op::eventually, std::move(f));
  }
  static Formula always(Formula f) { return unary(Op::always, std::move(f)); }

  Op op() const { return node_->op; }
  const Predicate& pred() const { return *node_->pred; }
  Formula lhs() const { return Formula(node_->lhs); }
  Formula rhs() const { return Formula(node_->rhs); }
  Formula child() const { return Formula(node_->lhs); }

  bool is_leaf() const { return node_->op == Op::pred || node_->op == Op::truth; }

  std::size_t depth() const { return depth_of(node_.get()); }

  friend bool operator==(const Formula& a, const Formula& b) {
    return equal(a.node_.get(), b.node_.get());
  }

 private:
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static Formula unary(Op op, Formula f) {
    return Formula(
        std::make_shared<Node>(Node{op, nullptr, std::move(f.node_), nullptr}));
  }
  static Formula binary(Op op, Formula a, Formula b) {
    return Formula(std::make_shared<Node>(
        Node{op, nullptr, std::move(a.node_), std::move(b.node_)}));
  }

  static std::size_t depth_of(const Node* n) {
    if (!n) return 0;
    return 1 + std::max(depth_of(n->lhs.get()), depth_of(n->rhs.get()));
  }

  static bool equal(const Node* a, const Node* b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->op != b->op) return false;
    if (a->op == Op::pred) return *a->pred == *b->pred;
    return equal(a->lhs.get(), b->lhs.get()) && equal(a->rhs.get(), b->rhs.get());
  }

  std::shared_ptr<const Node> node_;
};

// ── task pattern builders ─────────────────────────────────────────

/// F(eps - dist(z, target) > 0): eventually get within eps of target.
inline Formula reach(const TargetRef& target, double eps) {
  return Formula::eventually(
      Formula::predicate(Predicate(target, eps, Sense::reach)));
}

/// G(dist(z, target) - eps > 0): always stay farther than eps.
inline Formula always_avoid(const TargetRef& target, double eps) {
  return Formula::always(
      Formula::predicate(Predicate(target, eps, Sense::avoid)));
}

/// Reach-and-avoid: F(reach goal) & G(avoid a_1) & ... & G(avoid a_m),
/// left-associated in list order. An empty avoid list degenerates to
/// the bare reach formula.
inline Formula reach_avoid(
    const TargetRef& goal, double eps_goal,
    const std::vector<std::pair<TargetRef, double>>& avoid) {
  Formula f = reach(goal, eps_goal);
  for (const auto& [target, eps] : avoid)
    f = Formula::conjunction(std::move(f), always_avoid(target, eps));
  return f;
}

/// Sequenced visit: F(reach g1 & F(reach g2)); g1 is visited first.
inline Formula sequenced_visit(const TargetRef& g1, double e1,
                               const TargetRef& g2, double e2) {
  Formula second = reach(g2, e2);
  return Formula::eventually(Formula::conjunction(
      Formula::predicate(Predicate(g1, e1, Sense::reach)), std::move(second)));
}

/// Stability: F G(reach goal) -- reach the region and stay inside.
inline Formula stability(const TargetRef& goal, double eps) {
  return Formula::eventually(Formula::always(
      Formula::predicate(Predicate(goal, eps, Sense::reach))));
}

/// Equivalent formula over the minimal core {Pred, True, Not, And, Until}.
inline Formula normalize(const Formula& f) {
  switch (f.op()) {
    case Op::pred:
    case Op::truth:
      return f;
    case Op::negation:
      return Formula::negation(normalize(f.child()));
    case Op::conjunction:
      return Formula::conjunction(normalize(f.lhs()), normalize(f.rhs()));
    case Op::disjunction:
      return Formula::negation(
          Formula::conjunction(Formula::negation(normalize(f.lhs())),
                               Formula::negation(normalize(f.rhs()))));
    case Op::until:
      return Formula::until(normalize(f.lhs()), normalize(f.rhs()));
    case Op::eventually:
      return Formula::until(Formula::truth(), normalize(f.child()));
    case Op::always:
      return Formula::negation(Formula::until(
          Formula::truth(), Formula::negation(normalize(f.child()))));
  }
  throw Error(Errc::schema_error, "unknown formula operator");
}

}  // namespace etl
