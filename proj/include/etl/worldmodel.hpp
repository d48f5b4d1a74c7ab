#pragma once

// worldmodel.hpp
//
// World-model interface (observation / transition / optional decoder)
// and two analytically exact instantiations on a planar point mass:
//
//   PointMassWorld   x' = x + a,      z = E x,  z' = z + E a
//   DriftWorld       x' = x + a + b,  z' = z + E (a + b)
//
// E is a d x 2 encoder with orthogonal columns of norm s, built
// deterministically from a seed, so latent L2 distances equal s times
// physical distances and latent rollouts match encoded physical ones.

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "etl/core.hpp"

namespace etl {

using Observation = std::vector<double>;
using Action = std::vector<double>;

namespace detail {

// Deterministic uniform stream; the [0,1) mapping is pinned to the
// mt19937_64 bit stream rather than std::uniform_real_distribution so
// that identical seeds reproduce identical draws everywhere.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : gen_(seed) {}

  double next01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double next(double lo, double hi) { return lo + (hi - lo) * next01(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace detail

// Interface shared by every transition model: encode observations into
// the latent space and predict the next embedding from bounded
// histories. step must not mutate shared state; the true environment
// lives with the caller.
class WorldModel {
 public:
  virtual ~WorldModel() = default;

  virtual std::size_t context_horizon() const = 0;  // H
  virtual std::size_t action_dim() const = 0;
  virtual std::size_t latent_dim() const = 0;
  virtual double action_bound() const = 0;  // box half-width a_max

  virtual Embedding encode(const Observation& obs) const = 0;
  virtual Embedding step(const Trace& latent_history,
                         const std::vector<Action>& action_history,
                         const Action& next_action) const = 0;

  /// Optional inverse of encode; absent by default.
  virtual std::optional<Observation> decode(const Embedding&) const {
    return std::nullopt;
  }
};

class PointMassWorld : public WorldModel {
 public:
  PointMassWorld(std::size_t latent_dim, double scale, double a_max,
                 std::uint64_t seed)
      : latent_dim_(latent_dim), scale_(scale), a_max_(a_max), seed_(seed) {
    if (latent_dim_ < 2)
      throw Error(Errc::invalid_dimension,
                  "point-mass latent dimension must be >= 2");
    if (!(scale_ > 0.0))
      throw Error(Errc::config_error, "encoder scale must be > 0");
    if (!(a_max_ > 0.0))
      throw Error(Errc::config_error, "action bound must be > 0");
    build_encoder();
  }

  std::size_t context_horizon() const override { return 1; }
  std::size_t action_dim() const override { return 2; }
  std::size_t latent_dim() const override { return latent_dim_; }
  double action_bound() const override { return a_max_; }
  std::uint64_t seed() const { return seed_; }
  double scale() const { return scale_; }

  /// d x 2 encoder, row-major.
  const std::vector<double>& encoder_matrix() const { return encoder_; }

  Embedding encode(const Observation& obs) const override {
    require_planar(obs, "observation");
    std::vector<double> z(latent_dim_);
    for (std::size_t i = 0; i < latent_dim_; ++i)
      z[i] = encoder_[2 * i] * obs[0] + encoder_[2 * i + 1] * obs[1];
    return Embedding::vector(std::move(z));
  }

  Embedding step(const Trace& latent_history,
                 const std::vector<Action>& /*action_history*/,
                 const Action& next_action) const override {
    if (latent_history.size() < context_horizon())
      throw Error(Errc::insufficient_history,
                  "point-mass step needs at least one past embedding");
    const Embedding& z = latent_history[latent_history.size() - 1];
    if (z.kind() != Kind::vector || z.dim() != latent_dim_)
      throw Error(Errc::dimension_mismatch,
                  "latent history does not match the model's latent space");
    check_action(next_action);

    std::vector<double> next(z.flat().begin(), z.flat().end());
    const double ax = next_action[0] + drift_[0];
    const double ay = next_action[1] + drift_[1];
    for (std::size_t i = 0; i < latent_dim_; ++i)
      next[i] += encoder_[2 * i] * ax + encoder_[2 * i + 1] * ay;
    return Embedding::vector(std::move(next));
  }

  /// Pseudo-inverse E^T z / s^2; exact on embeddings in the image of E.
  std::optional<Observation> decode(const Embedding& z) const override {
    if (z.kind() != Kind::vector || z.dim() != latent_dim_)
      throw Error(Errc::dimension_mismatch,
                  "decode expects a latent-space vector embedding");
    const auto flat = z.flat();
    double x = 0.0, y = 0.0;
    for (std::size_t i = 0; i < latent_dim_; ++i) {
      x += encoder_[2 * i] * flat[i];
      y += encoder_[2 * i + 1] * flat[i];
    }
    const double s2 = scale_ * scale_;
    return Observation{x / s2, y / s2};
  }

  void check_action(const Action& a) const {
    require_planar(a, "action");
    if (std::abs(a[0]) > a_max_ || std::abs(a[1]) > a_max_)
      throw Error(Errc::action_out_of_bounds,
                  "action leaves the [-a_max, a_max]^2 box");
  }

 protected:
  void set_drift(double bx, double by) {
    if (!std::isfinite(bx) || !std::isfinite(by))
      throw Error(Errc::non_finite_entry, "drift must be finite");
    drift_[0] = bx;
    drift_[1] = by;
  }

 private:
  static void require_planar(const std::vector<double>& v, const char* what) {
    if (v.size() != 2)
      throw Error(Errc::dimension_mismatch,
                  std::string(what) + " must have dimension 2");
    if (!std::isfinite(v[0]) || !std::isfinite(v[1]))
      throw Error(Errc::non_finite_entry,
                  std::string(what) + " has a non-finite entry");
  }

  // Orthonormalize a seeded random d x 2 draw, then scale by s.
  void build_encoder() {
    detail::UniformRng rng(seed_);
    std::vector<double> c0(latent_dim_), c1(latent_dim_);

    auto draw = [&](std::vector<double>& col) {
      for (auto& v : col) v = rng.next(-1.0, 1.0);
    };
    auto norm = [](const std::vector<double>& col) {
      double acc = 0.0;
      for (double v : col) acc += v * v;
      return std::sqrt(acc);
    };

    draw(c0);
    while (norm(c0) < 1e-9) draw(c0);
    const double n0 = norm(c0);
    for (auto& v : c0) v /= n0;

    draw(c1);
    for (;;) {
      double dot = 0.0;
      for (std::size_t i = 0; i < latent_dim_; ++i) dot += c0[i] * c1[i];
      for (std::size_t i = 0; i < latent_dim_; ++i) c1[i] -= dot * c0[i];
      const double n1 = norm(c1);
      if (n1 >= 1e-9) {
        for (auto& v : c1) v /= n1;
        break;
      }
      draw(c1);
    }

    encoder_.resize(2 * latent_dim_);
    for (std::size_t i = 0; i < latent_dim_; ++i) {
      encoder_[2 * i] = scale_ * c0[i];
      encoder_[2 * i + 1] = scale_ * c1[i];
    }
  }

  std::size_t latent_dim_;
  double scale_;
  double a_max_;
  std::uint64_t seed_;
  std::vector<double> encoder_;
  double drift_[2] = {0.0, 0.0};
};

/// Point mass with a constant bias folded into every transition; the
/// planner has to counteract it to keep avoid specifications true.
class DriftWorld final : public PointMassWorld {
 public:
  DriftWorld(std::size_t latent_dim, double scale, double a_max,
             std::uint64_t seed, double drift_x, double drift_y)
      : PointMassWorld(latent_dim, scale, a_max, seed) {
    set_drift(drift_x, drift_y);
    drift_ = {drift_x, drift_y};
  }

  const Action& drift() const { return drift_; }

 private:
  Action drift_;
};

inline PointMassWorld make_point_mass(std::size_t latent_dim, double scale,
                                      double a_max, std::uint64_t seed) {
  return PointMassWorld(latent_dim, scale, a_max, seed);
}

/// Autoregressive latent rollout: predicts one embedding per future
/// action, feeding each prediction back as context. Returns only the
/// predictions (empty for an empty action list).
inline Trace rollout(const WorldModel& model, const Trace& latent_history,
                     const std::vector<Action>& action_history,
                     const std::vector<Action>& future_actions) {
  if (latent_history.size() < model.context_horizon())
    throw Error(Errc::insufficient_history,
                "rollout needs at least H = " +
                    std::to_string(model.context_horizon()) +
                    " past embeddings");

  Trace context = latent_history;
  std::vector<Action> actions = action_history;
  Trace predictions;
  for (const Action& a : future_actions) {
    Embedding next = model.step(context, actions, a);
    context.push_back(next);
    actions.push_back(a);
    predictions.push_back(std::move(next));
  }
  return predictions;
}

}  // namespace etl
