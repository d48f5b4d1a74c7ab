#pragma once

// harness.hpp
//
// Desk-scale experiments on the planar point-mass world: named task
// patterns over disc regions, the pairwise distance heatmap, the
// experiment-config file format, and report serialization.
//
// Regions are discs in physical space. Their centers are encoded with
// the model's encoder to form target embeddings, and thresholds are
// physical radii times the encoder scale, so the isometric encoder
// keeps specification thresholds spatially grounded.

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "etl/core.hpp"
#include "etl/io.hpp"
#include "etl/logic.hpp"
#include "etl/metrics.hpp"
#include "etl/planner.hpp"
#include "etl/semantics.hpp"
#include "etl/speclang.hpp"
#include "etl/worldmodel.hpp"

namespace etl {

// ── heatmap ───────────────────────────────────────────────────────

/// Pairwise distance matrix over >= 2 mutually compatible embeddings:
/// zero diagonal, symmetric, nonnegative.
inline std::vector<std::vector<double>> heatmap(
    const std::vector<Embedding>& embeddings, Metric metric) {
  const std::size_t n = embeddings.size();
  if (n < 2)
    throw Error(Errc::config_error, "heatmap needs at least two embeddings");
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(embeddings[i], embeddings[j], metric);
      m[i][j] = d;
      m[j][i] = d;
    }
  return m;
}

inline void write_csv_matrix(const std::vector<std::vector<double>>& m,
                             const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
  for (const auto& row : m) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << detail::format_threshold(row[j]);
    }
    out << '\n';
  }
}

// ── experiment configuration ──────────────────────────────────────

struct Region {
  std::string name;
  double cx = 0.0, cy = 0.0;
  double radius = 0.0;
};

struct ModelConfig {
  std::string kind = "point_mass";  // or "drift"
  std::size_t latent_dim = 16;
  double scale = 1.0;
  double a_max = 0.25;
  std::uint64_t seed = 7;
  double drift_x = 0.0, drift_y = 0.0;  // drift models only
};

struct ExperimentConfig {
  ModelConfig model;
  Observation start{0.0, 0.0};
  std::vector<Region> goals;
  std::vector<Region> avoids;
  std::string spec_name;      // named pattern, or empty when spec_text set
  std::string spec_text;      // raw formula text
  std::string manifest_path;  // manifest for spec_text targets
  Metric metric = Metric::l2;
  PlanConfig plan;
};

inline const std::vector<std::string>& known_spec_names() {
  static const std::vector<std::string> names = {
      "phi1", "phi2", "phi3", "psi-reach", "psi-avoid", "psi-reach-avoid"};
  return names;
}

// Planar environment with ground-truth state history. Drift matches
// the drift world model's bias so the model stays exact.
class PointMassEnv final : public Environment {
 public:
  PointMassEnv(Observation start, double drift_x = 0.0, double drift_y = 0.0)
      : position_(std::move(start)), drift_{drift_x, drift_y} {
    if (position_.size() != 2)
      throw Error(Errc::dimension_mismatch, "start position must be planar");
    history_.push_back(position_);
  }

  Observation observe() const override { return position_; }

  void apply(const Action& action) override {
    if (action.size() != 2)
      throw Error(Errc::dimension_mismatch, "action must be planar");
    position_[0] += action[0] + drift_[0];
    position_[1] += action[1] + drift_[1];
    history_.push_back(position_);
  }

  const std::vector<Observation>& history() const { return history_; }

 private:
  Observation position_;
  double drift_[2];
  std::vector<Observation> history_;
};

struct Report {
  EpisodeResult episode;
  std::vector<Observation> states;  // ground-truth positions, start first
  std::map<std::string, double> score_table;  // metric -> observed score
  std::vector<double> step_wall_ms;
  std::string spec_pretty;
};

namespace detail {

inline std::unique_ptr<PointMassWorld> build_model(const ModelConfig& mc) {
  if (mc.kind == "point_mass")
    return std::make_unique<PointMassWorld>(mc.latent_dim, mc.scale, mc.a_max,
                                            mc.seed);
  if (mc.kind == "drift")
    return std::make_unique<DriftWorld>(mc.latent_dim, mc.scale, mc.a_max,
                                        mc.seed, mc.drift_x, mc.drift_y);
  throw Error(Errc::config_error, "unknown model kind '" + mc.kind + "'");
}

inline TargetRef region_target(const Region& r, const PointMassWorld& model,
                               Metric metric, const std::string& role) {
  return TargetRef(r.name, model.encode({r.cx, r.cy}), metric, role);
}

/// Builds the named specification over region targets; thresholds are
/// radii scaled into the latent space.
inline Formula build_named_spec(const std::string& name,
                                const std::vector<Region>& goals,
                                const std::vector<Region>& avoids,
                                const PointMassWorld& model, Metric metric) {
  const double s = model.scale();
  auto goal_target = [&](std::size_t i) {
    if (goals.size() <= i)
      throw Error(Errc::config_error,
                  "spec '" + name + "' needs at least " +
                      std::to_string(i + 1) + " goal region(s)");
    return region_target(goals[i], model, metric, "goal");
  };
  auto avoid_pairs = [&] {
    if (avoids.empty())
      throw Error(Errc::config_error,
                  "spec '" + name + "' needs at least one avoid region");
    std::vector<std::pair<TargetRef, double>> pairs;
    for (const Region& r : avoids)
      pairs.emplace_back(region_target(r, model, metric, "avoid"),
                         r.radius * s);
    return pairs;
  };

  if (name == "phi1" || name == "psi-reach")
    return reach(goal_target(0), goals[0].radius * s);
  if (name == "phi2")
    return Formula::disjunction(reach(goal_target(0), goals[0].radius * s),
                                reach(goal_target(1), goals[1].radius * s));
  if (name == "phi3")
    return sequenced_visit(goal_target(0), goals[0].radius * s,
                           goal_target(1), goals[1].radius * s);
  if (name == "psi-avoid") {
    Formula f = Formula::truth();
    bool first = true;
    for (auto& [target, eps] : avoid_pairs()) {
      Formula g = always_avoid(target, eps);
      f = first ? std::move(g) : Formula::conjunction(std::move(f), std::move(g));
      first = false;
    }
    return f;
  }
  if (name == "psi-reach-avoid")
    return reach_avoid(goal_target(0), goals[0].radius * s, avoid_pairs());
  throw Error(Errc::config_error, "unknown spec name '" + name + "'");
}

}  // namespace detail

/// Runs one experiment: build the model and environment, instantiate
/// the specification, plan receding-horizon, and assemble the report.
inline Report run_experiment(const ExperimentConfig& cfg) {
  cfg.plan.validate();
  auto model = detail::build_model(cfg.model);

  const bool drifting = cfg.model.kind == "drift";
  PointMassEnv env(cfg.start, drifting ? cfg.model.drift_x : 0.0,
                   drifting ? cfg.model.drift_y : 0.0);

  Formula spec = [&] {
    if (!cfg.spec_text.empty()) {
      Manifest manifest;
      if (!cfg.manifest_path.empty()) manifest = load_manifest(cfg.manifest_path);
      return parse(cfg.spec_text, manifest);
    }
    if (cfg.spec_name.empty())
      throw Error(Errc::config_error, "config needs a spec name or spec text");
    return detail::build_named_spec(cfg.spec_name, cfg.goals, cfg.avoids,
                                    *model, cfg.metric);
  }();

  Report report;
  report.spec_pretty = pretty(spec);
  report.episode =
      run_receding_horizon(env, *model, spec, cfg.plan, &report.step_wall_ms);
  report.states = env.history();

  // Score table: re-evaluate the observed trace under each metric that
  // can read the targets (the planning metric's entry matches the
  // episode's final score by construction).
  const ScoreContext ctx(report.episode.trace);
  if (!cfg.spec_name.empty()) {
    for (Metric m : {Metric::l1, Metric::l2, Metric::cosine}) {
      Formula remetriced = detail::build_named_spec(
          cfg.spec_name, cfg.goals, cfg.avoids, *model, m);
      try {
        report.score_table[metric_name(m)] = score(remetriced, ctx);
      } catch (const Error&) {
        report.score_table[metric_name(m)] =
            std::numeric_limits<double>::quiet_NaN();
      }
    }
  } else {
    report.score_table["as-specified"] = score(spec, ctx);
  }
  return report;
}

// ── serialization ─────────────────────────────────────────────────

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (!j.is_object())
    throw Error(Errc::schema_error, "experiment config must be an object");

  if (j.contains("model")) {
    const auto& m = j.at("model");
    cfg.model.kind = m.value("model", cfg.model.kind);
    cfg.model.latent_dim = m.value("latent_dim", cfg.model.latent_dim);
    cfg.model.scale = m.value("scale", cfg.model.scale);
    cfg.model.a_max = m.value("a_max", cfg.model.a_max);
    cfg.model.seed = m.value("seed", cfg.model.seed);
    if (m.contains("drift")) {
      const auto drift = m.at("drift").get<std::vector<double>>();
      if (drift.size() != 2)
        throw Error(Errc::schema_error, "model drift must be [bx, by]");
      cfg.model.drift_x = drift[0];
      cfg.model.drift_y = drift[1];
    }
  }

  if (j.contains("environment")) {
    const auto& e = j.at("environment");
    if (e.contains("start")) {
      cfg.start = e.at("start").get<Observation>();
      if (cfg.start.size() != 2)
        throw Error(Errc::schema_error, "start must be [x, y]");
    }
    auto read_regions = [&](const char* key) {
      std::vector<Region> rs;
      if (!e.contains(key)) return rs;
      for (const auto& r : e.at(key)) {
        Region region;
        region.name = r.at("name").get<std::string>();
        const auto c = r.at("center").get<std::vector<double>>();
        if (c.size() != 2)
          throw Error(Errc::schema_error, "region center must be [x, y]");
        region.cx = c[0];
        region.cy = c[1];
        region.radius = r.at("radius").get<double>();
        rs.push_back(std::move(region));
      }
      return rs;
    };
    cfg.goals = read_regions("goals");
    cfg.avoids = read_regions("avoids");
  }

  if (j.contains("spec")) {
    const auto& s = j.at("spec");
    if (s.is_string()) {
      cfg.spec_name = s.get<std::string>();
    } else if (s.is_object()) {
      cfg.spec_text = s.value("text", "");
      cfg.manifest_path = s.value("manifest", "");
    } else {
      throw Error(Errc::schema_error,
                  "spec must be a name or {\"text\", \"manifest\"}");
    }
  }

  if (j.contains("metric"))
    cfg.metric = parse_metric(j.at("metric").get<std::string>());

  if (j.contains("plan")) {
    const auto& p = j.at("plan");
    cfg.plan.horizon = p.value("horizon", cfg.plan.horizon);
    cfg.plan.samples = p.value("samples", cfg.plan.samples);
    cfg.plan.seed = p.value("seed", cfg.plan.seed);
    cfg.plan.max_steps = p.value("max_steps", cfg.plan.max_steps);
    cfg.plan.threads = p.value("threads", cfg.plan.threads);
    if (p.contains("bound_policy") &&
        p.at("bound_policy").get<std::string>() != "fixed")
      throw Error(Errc::schema_error,
                  "the only supported bound_policy is \"fixed\"");
  }
  return cfg;
}

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["model"] = {{"model", cfg.model.kind},
                {"latent_dim", cfg.model.latent_dim},
                {"scale", cfg.model.scale},
                {"a_max", cfg.model.a_max},
                {"seed", cfg.model.seed}};
  if (cfg.model.kind == "drift")
    j["model"]["drift"] = {cfg.model.drift_x, cfg.model.drift_y};

  auto regions = [](const std::vector<Region>& rs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rs)
      arr.push_back({{"name", r.name},
                     {"center", {r.cx, r.cy}},
                     {"radius", r.radius}});
    return arr;
  };
  j["environment"] = {{"start", cfg.start},
                      {"goals", regions(cfg.goals)},
                      {"avoids", regions(cfg.avoids)}};
  if (!cfg.spec_text.empty()) {
    j["spec"] = {{"text", cfg.spec_text}, {"manifest", cfg.manifest_path}};
  } else {
    j["spec"] = cfg.spec_name;
  }
  j["metric"] = metric_name(cfg.metric);
  j["plan"] = {{"horizon", cfg.plan.horizon},
               {"samples", cfg.plan.samples},
               {"seed", cfg.plan.seed},
               {"max_steps", cfg.plan.max_steps},
               {"threads", cfg.plan.threads},
               {"bound_policy", "fixed"}};
  return j;
}

inline nlohmann::json episode_to_json(const EpisodeResult& e) {
  nlohmann::json j;
  j["actions"] = e.actions;
  j["trace"] = trace_to_json(e.trace);
  j["step_costs"] = e.step_costs;
  j["step_scores"] = e.step_scores;
  j["final_score"] = e.final_score;
  j["satisfied"] = e.satisfied;
  return j;
}

inline nlohmann::json report_to_json(const Report& r) {
  nlohmann::json j;
  j["spec"] = r.spec_pretty;
  j["episode"] = episode_to_json(r.episode);
  j["states"] = r.states;
  j["score_table"] = r.score_table;  // NaN serializes as null
  j["step_wall_ms"] = r.step_wall_ms;
  return j;
}

/// Per-step CSV for plotting: step, observed score, chosen cost, action.
inline void write_episode_csv(const EpisodeResult& e, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
  out << "step,score,cost";
  const std::size_t adim = e.actions.empty() ? 0 : e.actions.front().size();
  for (std::size_t d = 0; d < adim; ++d) out << ",a" << d;
  out << '\n';
  for (std::size_t i = 0; i < e.actions.size(); ++i) {
    out << i << ',' << detail::format_threshold(e.step_scores[i]) << ','
        << detail::format_threshold(e.step_costs[i]);
    for (double v : e.actions[i]) out << ',' << detail::format_threshold(v);
    out << '\n';
  }
}

// ── built-in demo experiments ─────────────────────────────────────

/// Canned desk-scale configuration for each named specification.
inline ExperimentConfig demo_config(const std::string& spec_name) {
  ExperimentConfig cfg;
  cfg.spec_name = spec_name;
  cfg.plan.horizon = 8;
  cfg.plan.samples = 512;
  cfg.plan.seed = 7;
  cfg.plan.max_steps = 40;

  if (spec_name == "phi1") {
    cfg.goals = {{"g1", 1.0, 0.6, 0.3}};
  } else if (spec_name == "phi2") {
    cfg.goals = {{"g1", 0.9, 0.5, 0.3}, {"g2", -1.1, 0.7, 0.3}};
  } else if (spec_name == "phi3") {
    cfg.goals = {{"g1", 0.8, 0.0, 0.3}, {"g2", 0.8, 0.9, 0.3}};
  } else if (spec_name == "psi-reach") {
    cfg.goals = {{"g", 1.2, -0.5, 0.3}};
  } else if (spec_name == "psi-avoid") {
    cfg.model.kind = "drift";
    cfg.model.drift_x = 0.06;
    cfg.avoids = {{"a1", 0.9, 0.0, 0.3}, {"a2", 0.0, 0.8, 0.3}};
  } else if (spec_name == "psi-reach-avoid") {
    cfg.goals = {{"g", 1.4, 0.0, 0.3}};
    cfg.avoids = {{"a1", 0.7, 0.0, 0.25}};
  } else {
    throw Error(Errc::config_error, "unknown demo '" + spec_name + "'");
  }
  return cfg;
}

}  // namespace etl
