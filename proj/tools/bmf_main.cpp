#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <curl/curl.h>

#include "bmf/commands.hpp"
#include "bmf/datasets.hpp"

namespace {

void add_run_flags(CLI::App* app, bmf::RunConfig& cfg) {
  app->add_option("--dataset", cfg.dataset, "Dataset name (see recipes/)");
  app->add_option("--matrix", cfg.matrix, "Matrix file in the n m / rows format");
  app->add_option("--k", cfg.k, "Target rank")->check(CLI::PositiveNumber);
  app->add_option("--rho", cfg.rho, "Zero-cover weight in (0, 1]")
      ->check(CLI::Range(1e-12, 1.0));
  app->add_option("--pricing", cfg.pricing, "exact, heur or heur-multi")
      ->check(CLI::IsMember({"exact", "heur", "heur-multi", "heur_multi"}));
  app->add_option("--budget-secs", cfg.budget_secs, "Column generation budget")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--mip-secs", cfg.mip_secs, "Time cap per integer solve")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--seed", cfg.seed, "Master seed");
  app->add_option("--warm-start", cfg.warm_start, "kgreedy, none or file")
      ->check(CLI::IsMember({"kgreedy", "none", "file"}));
  app->add_option("--warm-file", cfg.warm_file, "Factorisation JSON for --warm-start file");
  app->add_option("--recipe-dir", cfg.recipe_dir, "Recipe directory");
  app->add_option("--data-dir", cfg.data_dir, "Raw dataset directory");
}

std::size_t write_to_file(char* ptr, std::size_t size, std::size_t nmemb,
                          void* stream) {
  return std::fwrite(ptr, size, nmemb, static_cast<std::FILE*>(stream));
}

int fetch(const bmf::DatasetManifest& m, const std::string& dir) {
  std::filesystem::create_directories(dir);
  if (m.url.empty()) {
    std::cerr << m.name << ": recipe has no url\n";
    return 1;
  }
  curl_global_init(CURL_GLOBAL_DEFAULT);
  int status = 0;
  for (const auto& source : m.sources) {
    // A url ending in '/' is a directory holding every source file.
    std::string url = m.url;
    if (url.back() == '/') url += source;
    const auto path = (std::filesystem::path(dir) / source).string();
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) {
      std::cerr << "cannot write " << path << '\n';
      status = 1;
      continue;
    }
    CURL* curl = curl_easy_init();
    curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
    curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
    curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, write_to_file);
    curl_easy_setopt(curl, CURLOPT_WRITEDATA, f);
    const CURLcode rc = curl_easy_perform(curl);
    curl_easy_cleanup(curl);
    std::fclose(f);
    if (rc != CURLE_OK) {
      std::cerr << url << ": " << curl_easy_strerror(rc) << '\n';
      std::filesystem::remove(path);
      status = 1;
    } else {
      std::cerr << "fetched " << url << " -> " << path << '\n';
    }
  }
  curl_global_cleanup();
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boolean matrix factorisation by column generation"};
  app.set_config("--config", "", "TOML/INI file mirroring the flags");
  app.require_subcommand(1);

  bmf::RunConfig solve_cfg;
  auto* solve = app.add_subcommand("solve", "Factorise one matrix");
  add_run_flags(solve, solve_cfg);
  solve->add_option("--out", solve_cfg.out, "Output directory");
  bool quiet = false;
  solve->add_flag("--quiet", quiet, "No per-iteration progress");

  bmf::RunConfig bench_cfg;
  std::vector<std::string> bench_inputs;
  std::vector<std::size_t> bench_ks = {2, 5, 10};
  std::string bench_csv;
  auto* bench = app.add_subcommand("bench", "MLP/MIP table over datasets and ranks");
  add_run_flags(bench, bench_cfg);
  bench->add_option("--inputs", bench_inputs, "Dataset names or matrix files");
  bench->add_option("--ks", bench_ks, "Ranks");
  bench->add_option("--csv", bench_csv, "Also write the table as CSV");

  bmf::OracleCheckConfig oracle_cfg;
  auto* oracle = app.add_subcommand("oracle-check", "Sweep tiny matrices against brute force");
  oracle->add_option("--n", oracle_cfg.n, "Rows");
  oracle->add_option("--m", oracle_cfg.m, "Columns");
  oracle->add_option("--k-max", oracle_cfg.k_max, "Largest rank");
  oracle->add_option("--samples", oracle_cfg.samples, "Random samples (0: all)");
  oracle->add_option("--seed", oracle_cfg.seed, "Sampling seed");
  oracle->add_flag("--inject-fault", oracle_cfg.inject_fault,
                   "Flip reduced-cost signs (harness self-test)");

  std::string prep_name, prep_src, prep_out, prep_recipes;
  auto* prep = app.add_subcommand("prepare", "Binarize a dataset");
  prep->add_option("name", prep_name, "Dataset name")->required();
  prep->add_option("--source-dir", prep_src, "Raw dataset directory");
  prep->add_option("--out", prep_out, "Output matrix file");
  prep->add_option("--recipe-dir", prep_recipes, "Recipe directory");

  std::string fetch_name, fetch_dir, fetch_recipes;
  auto* fetch_cmd = app.add_subcommand("fetch", "Download dataset sources");
  fetch_cmd->add_option("name", fetch_name, "Dataset name")->required();
  fetch_cmd->add_option("--dir", fetch_dir, "Destination directory");
  fetch_cmd->add_option("--recipe-dir", fetch_recipes, "Recipe directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      solve_cfg.progress = !quiet;
      const auto s = bmf::cmd_solve(solve_cfg, std::cerr);
      std::cout << "error " << s.error << " lp " << s.lp_value << " bound "
                << s.dual_bound << " gap " << s.gap << "% (" << s.termination
                << ")\n";
      return 0;
    }
    if (*bench) {
      bench_cfg.progress = false;
      const auto rows = bmf::cmd_bench(bench_inputs, bench_ks, bench_cfg, std::cerr);
      bmf::write_bench_markdown(std::cout, rows);
      if (!bench_csv.empty()) {
        std::ofstream out(bench_csv);
        bmf::write_bench_csv(out, rows);
      }
      return 0;
    }
    if (*oracle) {
      const auto rep = bmf::cmd_oracle_check(oracle_cfg, std::cerr);
      std::cout << (rep.pass ? "pass" : "FAIL") << ": " << rep.matrices
                << " matrices, " << rep.checks << " checks, "
                << rep.failures.size() << " failures\n";
      return rep.pass ? 0 : 1;
    }
    if (*prep) {
      const auto d = bmf::cmd_prepare(prep_name, prep_src, prep_out, prep_recipes);
      for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << prep_name << ": " << d.matrix.rows() << "x" << d.matrix.cols()
                << " density " << d.density << "%\n";
      return 0;
    }
    if (*fetch_cmd) {
      const auto m = bmf::load_manifest(
          fetch_name, fetch_recipes.empty() ? bmf::default_recipe_dir() : fetch_recipes);
      return fetch(m, fetch_dir.empty() ? bmf::default_data_dir() : fetch_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
