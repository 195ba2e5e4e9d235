// Command-line runner for the sgkink experiments.
#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "sgkink/experiments.hpp"

namespace fs = std::filesystem;

namespace {

unsigned thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SGKINK_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) cap = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring invalid SGKINK_THREADS=" << env << '\n';
    }
  }
  return cap;
}

std::string output_dir(const std::string& out, const std::string& config_path, std::size_t count) {
  if (count == 1) return out;
  return (fs::path(out) / fs::path(config_path).stem()).string();
}

int run(const std::vector<std::string>& configs, const std::string& out) {
  std::vector<sgk::ExperimentConfig> parsed;
  for (const auto& p : configs) parsed.push_back(sgk::load_config(p));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> all_ok{true};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i = next++; i < parsed.size(); i = next++) {
      const std::string dir = output_dir(out, configs[i], configs.size());
      try {
        const sgk::Report r = sgk::run_experiment(parsed[i]);
        sgk::write_report(r, dir);
        std::lock_guard<std::mutex> lock(io);
        for (const auto& c : r.checks)
          std::cout << configs[i] << ": " << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << '\n';
        std::cout << configs[i] << ": " << (r.passed() ? "passed" : "FAILED") << " -> " << dir << '\n';
        if (!r.passed()) all_ok = false;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io);
        std::cerr << configs[i] << ": error: " << e.what() << '\n';
        all_ok = false;
      }
    }
  };
  const unsigned n = std::min<unsigned>(thread_cap(), static_cast<unsigned>(parsed.size()));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sine-Gordon kink stability experiments"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run one or more experiment configs");
  std::vector<std::string> run_configs;
  std::string out = "out";
  run_cmd->add_option("configs", run_configs, "config JSON files")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out, "output directory (one subdirectory per config when several are given)");

  auto* list_cmd = app.add_subcommand("list", "list available experiments");

  auto* val_cmd = app.add_subcommand("validate", "validate experiment configs");
  std::vector<std::string> val_configs;
  val_cmd->add_option("configs", val_configs, "config JSON files")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list_cmd) {
      for (const auto& [name, desc] : sgk::experiment_catalog()) std::cout << name << "  " << desc << '\n';
      return 0;
    }
    if (*val_cmd) {
      int rc = 0;
      for (const auto& p : val_configs) {
        try {
          const auto cfg = sgk::load_config(p);
          std::cout << p << ": ok (" << cfg.name << ")\n";
        } catch (const std::exception& e) {
          std::cerr << p << ": invalid: " << e.what() << '\n';
          rc = 1;
        }
      }
      return rc;
    }
    if (*run_cmd) return run(run_configs, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
