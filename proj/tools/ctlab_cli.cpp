// Command-line front end: one experiment per invocation, CSV output only.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "ctlab/ctlab.hpp"

namespace {

constexpr int kUsageError = 64;

int default_workers() {
  if (const char* env = std::getenv("CTLAB_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring invalid CTLAB_WORKERS=" << env << "\n";
  }
  return 1;
}

void write_all(const std::string& dir, const ctlab::Artifacts& files) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, text] : files) ctlab::csv::write_file((std::filesystem::path(dir) / name).string(), text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ctlab: continuity equation with damping, numerical checks"};
  app.require_subcommand(1);
  std::string config_path, out_dir = "ctlab-out";
  int workers = default_workers();
  bool force = false;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "JSON configuration file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker threads (default: CTLAB_WORKERS or 1)")->check(CLI::PositiveNumber);
    sub->add_flag("--force", force, "continue when hypothesis validation fails");
  };
  auto* run = app.add_subcommand("run", "solve one scenario and write densities");
  auto* conv = app.add_subcommand("convergence", "refinement study with fitted orders");
  auto* bmo = app.add_subcommand("bmo-analyze", "BMO seminorm, tail and superlevel analysis");
  auto* cert = app.add_subcommand("certify", "uniqueness certificate for a pair of solutions");
  auto* list = app.add_subcommand("list-scenarios", "print the built-in scenarios");
  for (auto* sub : {run, conv, bmo, cert}) add_common(sub, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  if (list->parsed()) {
    ctlab::csv::Table tab({"name", "description"});
    for (const auto& [name, desc] : ctlab::builtin_scenarios()) tab.row({name, "\"" + desc + "\""});
    std::cout << tab.str();
    return 0;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    const ctlab::Json cfg = ctlab::config::load(config_path);
    ctlab::Artifacts files;
    int code = 0;
    std::string verb;
    if (run->parsed()) {
      verb = "run";
      files = ctlab::run(cfg, workers, force);
    } else if (conv->parsed()) {
      verb = "convergence";
      files = ctlab::convergence(cfg, workers, force);
    } else if (bmo->parsed()) {
      verb = "bmo-analyze";
      files = ctlab::bmo_analyze(cfg, workers);
    } else {
      verb = "certify";
      ctlab::Verdict verdict{};
      files = ctlab::certify(cfg, workers, force, &verdict);
      code = ctlab::exit_code(verdict);
      std::cout << "verdict: " << ctlab::to_string(verdict) << "\n";
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ctlab::Manifest manifest;
    manifest.add("verb", verb);
    manifest.add("version", CTLAB_VERSION);
    manifest.add("config_path", config_path);
    manifest.add("config", cfg.dump());
    manifest.add("workers", std::to_string(workers));
    manifest.add("force", force ? "1" : "0");
    manifest.add("wall_seconds", ctlab::csv::num(wall));
    std::string listing;
    for (const auto& [name, text] : files) listing += (listing.empty() ? "" : ";") + name;
    manifest.add("files", listing);
    files["manifest.csv"] = manifest.str();
    write_all(out_dir, files);
    std::cout << "wrote " << files.size() << " files to " << out_dir << "\n";
    return code;
  } catch (const ctlab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
