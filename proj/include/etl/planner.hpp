#pragma once

// planner.hpp
//
// Receding-horizon random-shooting planner. Each step samples N
// uniform action sequences of length K inside the action box, rolls
// each out through the world model, scores the concatenated
// past-plus-predicted trace against the formula from index 0, and
// applies the first action of the best candidate. The objective is the
// violation cost max(0, -score), so satisfying predictive traces all
// cost zero and ties fall back to raw score, then sample index.

#include <chrono>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "etl/core.hpp"
#include "etl/logic.hpp"
#include "etl/semantics.hpp"
#include "etl/worldmodel.hpp"

namespace etl {

// True environment the episode acts on. observe() returns the raw
// observation the model's encoder consumes.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual Observation observe() const = 0;
  virtual void apply(const Action& action) = 0;
};

// How the scoring bound T is chosen. The predictive trace always ends
// at t + K, and T sits at its last index.
enum class BoundPolicy { fixed_horizon };

struct PlanConfig {
  std::size_t horizon = 8;    // K
  std::size_t samples = 512;  // N
  std::uint64_t seed = 0;
  std::size_t max_steps = 40;
  BoundPolicy bound_policy = BoundPolicy::fixed_horizon;
  unsigned threads = 1;  // candidate-evaluation parallelism

  void validate() const {
    if (horizon < 1 || samples < 1 || max_steps < 1 || threads < 1)
      throw Error(Errc::config_error,
                  "horizon, samples, max_steps and threads must be >= 1");
  }
};

struct EpisodeResult {
  std::vector<Action> actions;
  Trace trace;                      // observed embeddings, actions + 1 long
  std::vector<double> step_costs;   // chosen candidate's cost per step
  std::vector<double> step_scores;  // observed-trace score after each step
  double final_score = 0.0;
  bool satisfied = false;
};

/// Violation cost max(0, -score) over the whole trace; zero exactly on
/// traces with nonnegative score.
inline double cost(const Formula& f, const Trace& trace) {
  return std::max(0.0, -score(f, ScoreContext(trace)));
}

/// True when the score can only grow as the trace extends, i.e. the
/// formula has no Until (hence no G) in negative position once
/// normalized. Only such formulas may stop an episode early on a
/// positive score.
inline bool score_monotone_in_bound(const Formula& f, bool positive = true) {
  switch (f.op()) {
    case Op::pred:
    case Op::truth:
      return true;
    case Op::negation:
      return score_monotone_in_bound(f.child(), !positive);
    case Op::conjunction:
    case Op::disjunction:
      return score_monotone_in_bound(f.lhs(), positive) &&
             score_monotone_in_bound(f.rhs(), positive);
    case Op::until:
      return positive && score_monotone_in_bound(f.lhs(), positive) &&
             score_monotone_in_bound(f.rhs(), positive);
    case Op::eventually:
      return positive && score_monotone_in_bound(f.child(), positive);
    case Op::always:
      return !positive && score_monotone_in_bound(f.child(), positive);
  }
  throw Error(Errc::schema_error, "unknown formula operator");
}

struct PlanStep {
  Action action;   // first action of the chosen candidate
  double cost;     // chosen candidate's violation cost
  double score;    // chosen candidate's predictive-trace score
};

namespace detail {

inline std::vector<std::vector<Action>> sample_candidates(
    const WorldModel& model, const PlanConfig& cfg, UniformRng& rng) {
  const double a_max = model.action_bound();
  std::vector<std::vector<Action>> candidates(cfg.samples);
  for (auto& seq : candidates) {
    seq.resize(cfg.horizon);
    for (auto& a : seq) {
      a.resize(model.action_dim());
      for (auto& v : a) v = rng.next(-a_max, a_max);
    }
  }
  return candidates;
}

}  // namespace detail

/// One planning step with an explicit RNG stream; candidate draws
/// consume the stream in sample-major order regardless of thread
/// count, so parallel evaluation cannot change the chosen action.
inline PlanStep plan_step_detailed(const WorldModel& model,
                                   const Trace& observed,
                                   const std::vector<Action>& actions_so_far,
                                   const Formula& f, const PlanConfig& cfg,
                                   detail::UniformRng& rng) {
  cfg.validate();
  if (observed.empty())
    throw Error(Errc::insufficient_history,
                "plan_step needs at least one observed embedding");

  const auto candidates = detail::sample_candidates(model, cfg, rng);
  std::vector<double> scores(cfg.samples);

  auto evaluate = [&](std::size_t n) {
    Trace predictive = observed;
    for (const Embedding& z :
         rollout(model, observed, actions_so_far, candidates[n]))
      predictive.push_back(z);
    scores[n] = score(f, ScoreContext(predictive));
  };

  if (cfg.threads == 1 || cfg.samples == 1) {
    for (std::size_t n = 0; n < cfg.samples; ++n) evaluate(n);
  } else {
    const std::size_t workers =
        std::min<std::size_t>(cfg.threads, cfg.samples);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t n = w; n < cfg.samples; n += workers) evaluate(n);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Deterministic reduction: minimum cost, then higher raw score, then
  // lower sample index.
  std::size_t best = 0;
  double best_cost = std::max(0.0, -scores[0]);
  for (std::size_t n = 1; n < cfg.samples; ++n) {
    const double c = std::max(0.0, -scores[n]);
    if (c < best_cost || (c == best_cost && scores[n] > scores[best])) {
      best = n;
      best_cost = c;
    }
  }
  return PlanStep{candidates[best].front(), best_cost, scores[best]};
}

/// One planning step with a fresh stream seeded from cfg.seed.
inline Action plan_step(const WorldModel& model, const Trace& observed,
                        const std::vector<Action>& actions_so_far,
                        const Formula& f, const PlanConfig& cfg) {
  detail::UniformRng rng(cfg.seed);
  return plan_step_detailed(model, observed, actions_so_far, f, cfg, rng)
      .action;
}

/// Full receding-horizon episode: plan, apply the first action,
/// re-observe, repeat. Stops early on a positive observed-trace score
/// when the formula's score is monotone in the bound; otherwise runs
/// to max_steps. step_millis, when given, receives per-step planning
/// wall-clock times (kept out of EpisodeResult so results stay
/// bit-reproducible).
inline EpisodeResult run_receding_horizon(
    Environment& env, const WorldModel& model, const Formula& f,
    const PlanConfig& cfg, std::vector<double>* step_millis = nullptr) {
  cfg.validate();
  const bool may_stop_early = score_monotone_in_bound(f);

  EpisodeResult result;
  result.trace.push_back(model.encode(env.observe()));
  result.final_score = score(f, ScoreContext(result.trace));

  detail::UniformRng rng(cfg.seed);
  if (!(may_stop_early && result.final_score > 0.0)) {
    for (std::size_t step = 0; step < cfg.max_steps; ++step) {
      const auto t0 = std::chrono::steady_clock::now();
      const PlanStep chosen = plan_step_detailed(
          model, result.trace, result.actions, f, cfg, rng);
      env.apply(chosen.action);
      result.trace.push_back(model.encode(env.observe()));
      result.actions.push_back(chosen.action);
      result.step_costs.push_back(chosen.cost);
      const double observed_score = score(f, ScoreContext(result.trace));
      result.step_scores.push_back(observed_score);
      if (step_millis) {
        const std::chrono::duration<double, std::milli> ms =
            std::chrono::steady_clock::now() - t0;
        step_millis->push_back(ms.count());
      }
      result.final_score = observed_score;
      if (may_stop_early && observed_score > 0.0) break;
    }
  }
  result.satisfied = result.final_score > 0.0;
  return result;
}

}  // namespace etl
