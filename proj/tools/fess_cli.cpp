// Copyright 2026 The FESS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Links only the C API in fess/fess.h.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fess/fess.h"

namespace {

struct ConfigDeleter {
  void operator()(fess_config* c) const { fess_config_free(c); }
};
using ConfigPtr = std::unique_ptr<fess_config, ConfigDeleter>;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::string out;
  std::string data;
  std::string checkpoint;
};

int report(fess_status status) {
  if (status != FESS_OK) {
    std::fprintf(stderr, "error: %s\n", fess_last_error());
  }
  return static_cast<int>(status);
}

// Loads the config, applies flag overrides and validates.
fess_status load(const Options& o, ConfigPtr& out) {
  fess_config* raw = nullptr;
  fess_status st = o.config.empty() ? fess_config_default(&raw)
                                    : fess_config_load(o.config.c_str(), &raw);
  if (st != FESS_OK) return st;
  out.reset(raw);
  if (o.seed && (st = fess_config_set_seed(raw, *o.seed)) != FESS_OK) return st;
  if (o.jobs && (st = fess_config_set_jobs(raw, *o.jobs)) != FESS_OK) return st;
  return fess_config_validate(raw);
}

std::string provenance(const fess_config* cfg) {
  char buf[128];
  if (fess_config_provenance(cfg, buf, sizeof buf, nullptr) != FESS_OK) return {};
  return buf;
}

void print_canonical(const fess_config* cfg) {
  std::size_t needed = 0;
  fess_config_canonical(cfg, nullptr, 0, &needed);
  std::string text(needed, '\0');
  if (fess_config_canonical(cfg, text.data(), text.size(), nullptr) == FESS_OK) {
    std::fputs(text.c_str(), stdout);
  }
}

void print_metrics(const fess_metrics& m) {
  std::printf("%-12s %.6f\n", "dice", m.dice);
  std::printf("%-12s %.6f\n", "iou", m.iou);
  std::printf("%-12s %.6f\n", "precision", m.precision);
  std::printf("%-12s %.6f\n", "specificity", m.specificity);
  std::printf("%-12s %.6f\n", "sensitivity", m.sensitivity);
  std::printf("%-12s tp=%llu fp=%llu tn=%llu fn=%llu\n", "counts",
              static_cast<unsigned long long>(m.tp),
              static_cast<unsigned long long>(m.fp),
              static_cast<unsigned long long>(m.tn),
              static_cast<unsigned long long>(m.fn));
}

void on_gradcheck(const char* name, std::uint64_t seed, double err, double tol,
                  int passed, void*) {
  std::printf("%s %-36s seed=%020llu max_rel_error=%.3e tol=%.0e\n",
              passed ? "PASS" : "FAIL", name,
              static_cast<unsigned long long>(seed), err, tol);
}

int run_generate(const Options& o) {
  ConfigPtr cfg;
  if (fess_status st = load(o, cfg)) return report(st);
  if (fess_status st = fess_generate(cfg.get(), o.out.c_str())) return report(st);
  std::printf("# %s\nwrote dataset to %s\n", provenance(cfg.get()).c_str(),
              o.out.c_str());
  return 0;
}

int run_train(const Options& o) {
  ConfigPtr cfg;
  if (fess_status st = load(o, cfg)) return report(st);
  fess_metrics m{};
  if (fess_status st = fess_train(cfg.get(), o.data.c_str(), o.out.c_str(), &m)) {
    return report(st);
  }
  std::printf("# %s\n", provenance(cfg.get()).c_str());
  print_metrics(m);
  return 0;
}

int run_eval(const Options& o) {
  ConfigPtr cfg;
  if (fess_status st = load(o, cfg)) return report(st);
  fess_metrics m{};
  std::size_t volumes = 0;
  if (fess_status st = fess_eval(cfg.get(), o.checkpoint.c_str(), o.data.c_str(),
                                 &m, &volumes)) {
    return report(st);
  }
  std::printf("# %s volumes=%zu\n", provenance(cfg.get()).c_str(), volumes);
  print_metrics(m);
  return 0;
}

int run_gradcheck(const Options& o) {
  ConfigPtr cfg;
  if (fess_status st = load(o, cfg)) return report(st);
  std::printf("# %s\n", provenance(cfg.get()).c_str());
  std::size_t failures = 0;
  if (fess_status st =
          fess_gradcheck(cfg.get(), on_gradcheck, nullptr, &failures)) {
    return report(st);
  }
  if (failures > 0) {
    std::fprintf(stderr, "error: %zu gradient check(s) failed\n", failures);
    return FESS_ERR_NUMERICAL;
  }
  std::printf("all gradient checks passed\n");
  return 0;
}

int run_experiment(const Options& o) {
  ConfigPtr cfg;
  if (fess_status st = load(o, cfg)) return report(st);
  if (fess_status st = fess_experiment(cfg.get(), o.out.c_str())) {
    return report(st);
  }
  std::printf("# %s\nwrote results to %s\n", provenance(cfg.get()).c_str(),
              o.out.c_str());
  return 0;
}

int run_config(const Options& o) {
  ConfigPtr cfg;
  if (fess_status st = load(o, cfg)) return report(st);
  print_canonical(cfg.get());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segmentation training with a previous-batch contrastive loss"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fess_version());
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Config file (key = value lines)");
    sub->add_option("--seed", o.seed, "Override the config seed");
  };

  CLI::App* gen = app.add_subcommand("generate", "Write a synthetic dataset");
  common(gen);
  gen->add_option("--out", o.out, "Output directory")->required();

  CLI::App* train = app.add_subcommand("train", "Train a model");
  common(train);
  train->add_option("--data", o.data, "Dataset directory from 'generate'")
      ->required();
  train->add_option("--out", o.out, "Output directory")->required();

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  common(eval);
  eval->add_option("--checkpoint", o.checkpoint, "Checkpoint file")->required();
  eval->add_option("--data", o.data, "Dataset directory")->required();

  CLI::App* grad = app.add_subcommand("gradcheck", "Run the gradient-check suite");
  common(grad);

  CLI::App* exp = app.add_subcommand("experiment",
                                     "Loss comparison and training-size ablation");
  common(exp);
  exp->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  exp->add_option("--out", o.out, "Output directory")->required();

  CLI::App* show = app.add_subcommand("config", "Print the canonical config");
  common(show);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : FESS_ERR_VALIDATION;
  }

  if (gen->parsed()) return run_generate(o);
  if (train->parsed()) return run_train(o);
  if (eval->parsed()) return run_eval(o);
  if (grad->parsed()) return run_gradcheck(o);
  if (exp->parsed()) return run_experiment(o);
  return run_config(o);
}
