// Command-line front end for the multi-task architecture search engine.
//
//   monas run --config cfg.json [--seed N] [--workers N] [--out DIR]
//   monas compare --configs a.json b.json ... --seeds 1,2,3 [--out DIR]

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "monas/config.hpp"
#include "monas/orchestrator.hpp"

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& arg) {
  std::vector<std::uint64_t> seeds;
  std::string token;
  for (char c : arg + ",") {
    if (c == ',') {
      if (!token.empty()) {
        seeds.push_back(std::stoull(token));
        token.clear();
      }
    } else {
      token += c;
    }
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective multi-task architecture genotype search"};
  app.require_subcommand(1);

  std::string config_path;
  std::int64_t seed_override = -1;
  int workers_override = -1;
  std::string out_override;

  CLI::App* run_cmd = app.add_subcommand("run", "Execute one search run");
  run_cmd->add_option("--config", config_path, "Run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed_override, "Override the config seed");
  run_cmd->add_option("--workers", workers_override, "Override the worker count");
  run_cmd->add_option("--out", out_override, "Override the output directory");

  std::vector<std::string> config_paths;
  std::string seeds_arg;
  std::string compare_out = "out";

  CLI::App* cmp_cmd = app.add_subcommand(
      "compare", "Run several config variants over shared seeds and tabulate HV");
  cmp_cmd->add_option("--configs", config_paths, "Variant configurations (JSON)")
      ->required()
      ->expected(2, -1)
      ->check(CLI::ExistingFile);
  cmp_cmd->add_option("--seeds", seeds_arg, "Comma-separated seed list")->required();
  cmp_cmd->add_option("--out", compare_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      monas::RunConfig cfg = monas::load_config(config_path);
      if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
      if (workers_override >= 0) cfg.workers = workers_override;
      if (!out_override.empty()) cfg.out_dir = out_override;
      monas::validate_config(cfg);
      const monas::RunResult result = monas::run(cfg);
      for (const monas::HvRow& row : result.hv) {
        std::cout << "task " << row.task << ": front size "
                  << result.fronts.at(row.task).size() << ", hv "
                  << monas::format_double(row.hv) << "\n";
      }
      std::cout << "outputs written to " << cfg.out_dir << "\n";
    } else {
      std::vector<monas::NamedConfig> variants;
      for (const std::string& path : config_paths) {
        monas::NamedConfig v;
        v.name = std::filesystem::path(path).stem().string();
        v.config = monas::load_config(path);
        variants.push_back(std::move(v));
      }
      const auto seeds = parse_seed_list(seeds_arg);
      const monas::CompareResult result = monas::compare(variants, seeds, compare_out);
      for (const monas::HvSummary& s : result.summary) {
        std::cout << "task " << s.task << " " << s.run << ": hv "
                  << monas::format_double(s.mean) << " +- "
                  << monas::format_double(s.stddev) << "\n";
      }
      std::cout << "outputs written to " << compare_out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
