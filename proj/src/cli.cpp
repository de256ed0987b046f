#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "ratiotv/experiments.hpp"

namespace ratiotv {

namespace {

RunOutput dispatch_experiment(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "onebar") return run_onebar_sweep(cfg);
  if (name == "twobar") return run_twobar_sweep(cfg);
  if (name == "superres") return run_superres(cfg);
  if (name == "mri") return run_mri_radial(cfg);
  if (name == "ct") return run_ct_limited(cfg);
  if (name == "sensitivity") return run_sensitivity_grid(cfg);
  if (name == "ablation") return run_ablations(cfg);
  throw std::invalid_argument("unknown experiment: " + name);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

int run_experiment(const std::string& subcommand, ExperimentConfig cfg, const std::string& out_dir) {
  RunOutput out = dispatch_experiment(subcommand, cfg);

  // Reject typo'd keys: everything supplied must have been consumed by the run.
  const auto unused = cfg.unused_keys();
  if (!unused.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unused) msg += " " + k;
    throw std::runtime_error(msg);
  }
  if (out.rows.empty()) {
    std::fprintf(stderr, "error: experiment produced no results\n");
    return 2;
  }

  // All validation passed; only now touch the filesystem.
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_text(dir / "results.csv", rows_to_csv(out.rows));
  for (const auto& [id, trace] : out.traces) write_text(dir / ("trace_" + id + ".json"), trace.dump(2) + "\n");

  nlohmann::json manifest;
  manifest["subcommand"] = subcommand;
  manifest["version"] = "0.1.0";
  nlohmann::json kv = nlohmann::json::object();
  for (const auto& [key, value] : cfg.resolved()) kv[key] = value;
  manifest["config"] = kv;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"Constrained gradient-sparsity reconstruction experiments"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string out;
    std::string config_path;
    std::vector<std::string> sets;
    std::string seed;
  };
  const std::vector<std::string> names = {"onebar", "twobar", "superres", "mri",
                                          "ct",     "sensitivity", "ablation"};
  const std::vector<std::string> descriptions = {
      "single-bar width sweep on lowpass 1D data",
      "two-bar height sweep on lowpass 1D data",
      "square lowfreq-mask image recovery",
      "radial-mask Fourier image recovery",
      "limited-angle tomography recovery",
      "parameter grid for the ratio solver",
      "solver variant studies (box constraint, inner budget)"};
  std::map<std::string, SubArgs> sub_args;
  std::map<std::string, CLI::App*> subs;
  for (size_t i = 0; i < names.size(); ++i) {
    auto& sa = sub_args[names[i]];
    sa.out = "runs/" + names[i];
    CLI::App* sc = app.add_subcommand(names[i], descriptions[i]);
    sc->add_option("--out", sa.out, "output directory (default: runs/" + names[i] + ")");
    sc->add_option("--config", sa.config_path, "key = value config file");
    sc->add_option("--set", sa.sets, "override a config key (key=value), repeatable");
    sc->add_option("--seed", sa.seed, "base RNG seed");
    subs[names[i]] = sc;
  }

  std::string manifest_path;
  std::string rerun_out = "runs/rerun";
  CLI::App* rerun = app.add_subcommand("rerun", "repeat a run from its manifest.json");
  rerun->add_option("manifest", manifest_path, "path to manifest.json")->required();
  rerun->add_option("--out", rerun_out, "output directory");

  // CLI11 wants argc/argv or a reversed vector; feed it the reversed form.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (rerun->parsed()) {
      std::ifstream f(manifest_path);
      if (!f) throw std::runtime_error("cannot open manifest: " + manifest_path);
      nlohmann::json manifest = nlohmann::json::parse(f);
      const std::string subcommand = manifest.at("subcommand").get<std::string>();
      std::map<std::string, std::string> kv;
      for (const auto& [key, value] : manifest.at("config").items()) kv[key] = value.get<std::string>();
      return run_experiment(subcommand, ExperimentConfig(std::move(kv)), rerun_out);
    }
    for (const auto& name : names) {
      if (!subs[name]->parsed()) continue;
      const auto& sa = sub_args.at(name);
      ExperimentConfig cfg =
          sa.config_path.empty() ? ExperimentConfig() : ExperimentConfig::from_file(sa.config_path);
      for (const auto& kv : sa.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::runtime_error("--set expects key=value, got: " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (!sa.seed.empty()) cfg.set("seed", sa.seed);
      return run_experiment(name, std::move(cfg), sa.out);
    }
    throw std::runtime_error("no subcommand parsed");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace ratiotv
