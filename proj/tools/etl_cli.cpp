// Command-line front end: check/score formulas over trace files, run
// planning experiments, and emit distance heatmaps. Machine-readable
// JSON/CSV goes to stdout or files; the human summary line goes to
// stderr. plan/demo exit 0 iff the episode satisfied its spec.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "etl/etl.hpp"

namespace {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw etl::Error(etl::Errc::io_error, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CheckArgs {
  std::string formula;
  std::string formula_file;
  std::string manifest_path;
  std::string trace_path;
  long long from = 0;
  long long to = -1;  // -1: end of trace
};

int run_check(const CheckArgs& args) {
  std::string text = args.formula;
  if (text.empty() && !args.formula_file.empty())
    text = read_text_file(args.formula_file);
  if (text.empty())
    throw etl::Error(etl::Errc::config_error,
                     "provide a formula via --formula or --formula-file");

  etl::Manifest manifest;
  if (!args.manifest_path.empty())
    manifest = etl::load_manifest(args.manifest_path);
  const etl::Formula f = etl::parse(text, manifest);
  const etl::Trace trace = etl::load_trace(args.trace_path);

  const std::size_t i = static_cast<std::size_t>(args.from);
  const std::size_t T = args.to < 0 ? trace.size() - 1
                                    : static_cast<std::size_t>(args.to);
  const etl::ScoreContext ctx(trace, i, T);
  const double rho = etl::score(f, ctx);
  const bool ok = etl::sat(f, ctx);

  nlohmann::json out;
  out["sat"] = ok;
  out["score"] = rho;
  out["window"] = {i, T};
  std::cout << out.dump() << '\n';
  std::cerr << (ok ? "satisfied" : "violated") << " with score " << rho
            << " over window [" << i << ", " << T << "]\n";
  return 0;
}

int run_plan(const etl::ExperimentConfig& cfg, const std::string& out_path,
             const std::string& csv_path) {
  const etl::Report report = etl::run_experiment(cfg);
  const nlohmann::json j = etl::report_to_json(report);
  if (!out_path.empty())
    etl::save_json(j, out_path);
  else
    std::cout << j.dump(2) << '\n';
  if (!csv_path.empty()) etl::write_episode_csv(report.episode, csv_path);

  std::cerr << (report.episode.satisfied ? "satisfied" : "violated")
            << " after " << report.episode.actions.size()
            << " steps with final score " << report.episode.final_score
            << '\n';
  return report.episode.satisfied ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal specifications over embedding traces"};
  app.require_subcommand(1);

  CheckArgs check_args;
  auto add_check_flags = [&](CLI::App* cmd) {
    cmd->add_option("--formula", check_args.formula, "formula text");
    cmd->add_option("--formula-file", check_args.formula_file,
                    "file containing the formula");
    cmd->add_option("--manifest", check_args.manifest_path,
                    "target manifest JSON");
    cmd->add_option("--trace", check_args.trace_path,
                    "trace file (JSON array or JSON Lines)")
        ->required();
    cmd->add_option("--from", check_args.from, "window start index");
    cmd->add_option("--to", check_args.to,
                    "window end index (default: last)");
  };
  CLI::App* check = app.add_subcommand(
      "check", "evaluate Boolean satisfaction and score over a trace");
  add_check_flags(check);
  CLI::App* score = app.add_subcommand(
      "score", "evaluate the satisfaction score over a trace");
  add_check_flags(score);

  std::string config_path, out_path, csv_path;
  CLI::App* plan =
      app.add_subcommand("plan", "run a planning experiment from a config");
  plan->add_option("--config", config_path, "experiment config JSON")
      ->required();
  plan->add_option("--out", out_path, "write the report JSON here");
  plan->add_option("--csv", csv_path, "write per-step CSV here");

  std::string emb_path, metric_name = "l2", hm_out;
  CLI::App* heatmap =
      app.add_subcommand("heatmap", "pairwise distance matrix as CSV");
  heatmap->add_option("--embeddings", emb_path,
                      "embeddings file (JSON array or JSON Lines)")
      ->required();
  heatmap->add_option("--metric", metric_name, "l1|l2|cosine|chamfer");
  heatmap->add_option("--out", hm_out, "output CSV path");

  std::string demo_name;
  CLI::App* demo =
      app.add_subcommand("demo", "run a built-in planning experiment");
  demo->add_option("name", demo_name, "phi1|phi2|phi3|psi-reach|psi-avoid|psi-reach-avoid")
      ->required();
  demo->add_option("--out", out_path, "write the report JSON here");
  demo->add_option("--csv", csv_path, "write per-step CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed() || score->parsed()) return run_check(check_args);

    if (plan->parsed()) {
      const auto cfg = etl::experiment_config_from_json(
          etl::detail::parse_json(read_text_file(config_path), config_path));
      return run_plan(cfg, out_path, csv_path);
    }

    if (heatmap->parsed()) {
      const auto matrix = etl::heatmap(etl::load_embedding_list(emb_path),
                                       etl::parse_metric(metric_name));
      if (!hm_out.empty()) {
        etl::write_csv_matrix(matrix, hm_out);
      } else {
        for (const auto& row : matrix) {
          for (std::size_t j = 0; j < row.size(); ++j)
            std::cout << (j ? "," : "") << row[j];
          std::cout << '\n';
        }
      }
      std::cerr << matrix.size() << "x" << matrix.size() << " " << metric_name
                << " heatmap done\n";
      return 0;
    }

    if (demo->parsed())
      return run_plan(etl::demo_config(demo_name), out_path, csv_path);
  } catch (const etl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
