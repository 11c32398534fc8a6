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

#include "fess/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <thread>

#include "fess/error.hpp"
#include "fess/rng.hpp"

namespace fess {

void ExperimentSpec::validate() const {
  if (variants.empty()) throw ValidationError("experiment needs >= 1 variant");
  if (train_sizes.empty()) {
    throw ValidationError("experiment needs >= 1 training size");
  }
  for (std::size_t s : train_sizes) {
    if (s < 1) throw ValidationError("training sizes must be >= 1");
  }
  if (repeats < 1) throw ValidationError("repeats must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train_fraction must lie in (0,1)");
  }
  if (jobs < 1) throw ValidationError("jobs must be >= 1");
  data.validate();
  for (LossVariant v : variants) {
    TrainerConfig t = trainer;
    t.loss.variant = v;
    t.validate();
  }
  const auto train_count = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(pool_size)));
  if (train_count < 1 || train_count >= pool_size) {
    throw ValidationError("pool_size " + std::to_string(pool_size) +
                          " leaves an empty training or test split");
  }
}

std::uint64_t repeat_seed(std::uint64_t seed, std::size_t repeat) {
  return Rng::stream(seed, "repeat", repeat).next_u64();
}

ExperimentData prepare_data(const ExperimentSpec& spec) {
  SyntheticSpec ds = spec.data;
  ds.seed = Rng::stream(spec.seed, "data").next_u64();
  const std::vector<Sample> pool = generate(ds, spec.pool_size);
  auto [train, test] =
      split(pool, spec.train_fraction, Rng::stream(spec.seed, "pool_split").next_u64());
  return {std::move(train), std::move(test)};
}

std::vector<std::size_t> ablation_subset(std::uint64_t seed,
                                         std::size_t pool_size,
                                         std::size_t size,
                                         std::size_t repeat) {
  if (size > pool_size) {
    throw ValidationError("training size " + std::to_string(size) +
                          " exceeds the training pool of " +
                          std::to_string(pool_size));
  }
  Rng rng = Rng::stream(seed, "subset_" + std::to_string(size), repeat);
  std::vector<std::size_t> idx(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) idx[i] = i;
  for (std::size_t i = 0; i < size; ++i) {
    std::swap(idx[i], idx[i + rng.below(pool_size - i)]);
  }
  idx.resize(size);
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

// Runs fn(0..count-1) on up to `jobs` threads. Each result slot is written by
// exactly one task, so the merged output is independent of scheduling. The
// lowest-index failure is rethrown after every worker has finished.
template <typename Fn>
void run_cells(std::size_t count, std::size_t jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, count);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RunOutcome train_cell(const ExperimentSpec& spec, LossVariant variant,
                      std::size_t repeat, const std::vector<Sample>& train_set,
                      const std::vector<Sample>& test_set) {
  TrainerConfig cfg = spec.trainer;
  cfg.loss.variant = variant;
  cfg.seed = repeat_seed(spec.seed, repeat);
  const TrainResult res = train(cfg, train_set, test_set);
  RunOutcome out;
  out.variant = variant;
  out.train_size = train_set.size();
  out.repeat = repeat;
  out.seed = cfg.seed;
  out.report = res.log.evals.back().report;
  out.volume_dice = summarize(res.log.evals.back().per_volume_dice);
  return out;
}

template <typename Get>
Summary summarize_runs(const std::vector<RunOutcome>& runs, std::size_t first,
                       std::size_t count, Get get) {
  std::vector<double> values;
  for (std::size_t i = first; i < first + count; ++i) {
    values.push_back(get(runs[i].report));
  }
  return summarize(values);
}

std::ofstream open_output(const std::filesystem::path& path,
                          const std::string& comment) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  if (!comment.empty()) out << "# " << comment << '\n';
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

ComparisonResult run_loss_comparison(const ExperimentSpec& spec) {
  spec.validate();
  return run_loss_comparison(spec, prepare_data(spec));
}

ComparisonResult run_loss_comparison(const ExperimentSpec& spec,
                                     const ExperimentData& data) {
  spec.validate();
  const std::size_t nv = spec.variants.size();
  ComparisonResult result;
  result.runs.resize(nv * spec.repeats);
  run_cells(result.runs.size(), spec.jobs, [&](std::size_t cell) {
    const std::size_t v = cell / spec.repeats;
    const std::size_t r = cell % spec.repeats;
    result.runs[cell] =
        train_cell(spec, spec.variants[v], r, data.train_pool, data.test_set);
  });
  for (std::size_t v = 0; v < nv; ++v) {
    const std::size_t first = v * spec.repeats;
    ComparisonRow row;
    row.variant = spec.variants[v];
    row.dice = summarize_runs(result.runs, first, spec.repeats,
                              [](const MetricReport& m) { return m.dice; });
    row.iou = summarize_runs(result.runs, first, spec.repeats,
                             [](const MetricReport& m) { return m.iou; });
    row.precision =
        summarize_runs(result.runs, first, spec.repeats,
                       [](const MetricReport& m) { return m.precision; });
    row.specificity =
        summarize_runs(result.runs, first, spec.repeats,
                       [](const MetricReport& m) { return m.specificity; });
    row.sensitivity =
        summarize_runs(result.runs, first, spec.repeats,
                       [](const MetricReport& m) { return m.sensitivity; });
    result.rows.push_back(row);
  }
  return result;
}

AblationResult run_data_ablation(const ExperimentSpec& spec) {
  spec.validate();
  return run_data_ablation(spec, prepare_data(spec));
}

AblationResult run_data_ablation(const ExperimentSpec& spec,
                                 const ExperimentData& data) {
  spec.validate();
  const std::size_t nv = spec.variants.size();
  const std::size_t ns = spec.train_sizes.size();
  const std::size_t nr = spec.repeats;

  // Subsets are fixed before training so every variant shares them.
  std::vector<std::vector<Sample>> subsets(ns * nr);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t r = 0; r < nr; ++r) {
      for (std::size_t i : ablation_subset(spec.seed, data.train_pool.size(),
                                           spec.train_sizes[s], r)) {
        subsets[s * nr + r].push_back(data.train_pool[i]);
      }
    }
  }

  AblationResult result;
  result.runs.resize(nv * ns * nr);
  run_cells(result.runs.size(), spec.jobs, [&](std::size_t cell) {
    const std::size_t v = cell / (ns * nr);
    const std::size_t s = (cell / nr) % ns;
    const std::size_t r = cell % nr;
    result.runs[cell] = train_cell(spec, spec.variants[v], r,
                                   subsets[s * nr + r], data.test_set);
  });
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t s = 0; s < ns; ++s) {
      AblationPoint p;
      p.variant = spec.variants[v];
      p.train_size = spec.train_sizes[s];
      p.dice = summarize_runs(result.runs, (v * ns + s) * nr, nr,
                              [](const MetricReport& m) { return m.dice; });
      result.points.push_back(p);
    }
  }
  return result;
}

std::vector<Curve> ablation_curves(const AblationResult& result) {
  std::vector<Curve> curves;
  for (const AblationPoint& p : result.points) {
    const std::string label(to_string(p.variant));
    if (curves.empty() || curves.back().label != label) {
      curves.push_back({label, {}});
    }
    curves.back().points.push_back({static_cast<double>(p.train_size),
                                    p.dice.mean, p.dice.std_error});
  }
  return curves;
}

void write_comparison(const std::filesystem::path& dir,
                      const ComparisonResult& result,
                      const std::string& comment) {
  const auto table = dir / "comparison.csv";
  std::ofstream out = open_output(table, comment);
  out << "variant,dice_mean,dice_std,iou_mean,iou_std,precision_mean,"
         "precision_std,specificity_mean,specificity_std,sensitivity_mean,"
         "sensitivity_std\n";
  for (const ComparisonRow& row : result.rows) {
    out << to_string(row.variant);
    for (const Summary* s : {&row.dice, &row.iou, &row.precision,
                             &row.specificity, &row.sensitivity}) {
      out << ',' << format_double(s->mean) << ',' << format_double(s->stddev);
    }
    out << '\n';
  }
  finish(out, table);

  const auto raw = dir / "comparison_raw.csv";
  std::ofstream rout = open_output(raw, comment);
  rout << "variant,repeat,seed,dice,iou,precision,specificity,sensitivity,"
          "volume_dice_mean,volume_dice_stderr\n";
  for (const RunOutcome& r : result.runs) {
    const MetricReport& m = r.report;
    rout << to_string(r.variant) << ',' << r.repeat << ',' << r.seed << ','
         << format_double(m.dice) << ',' << format_double(m.iou) << ','
         << format_double(m.precision) << ',' << format_double(m.specificity)
         << ',' << format_double(m.sensitivity) << ','
         << format_double(r.volume_dice.mean) << ','
         << format_double(r.volume_dice.std_error) << '\n';
  }
  finish(rout, raw);
}

void write_ablation(const std::filesystem::path& dir,
                    const AblationResult& result, const std::string& comment) {
  const auto raw = dir / "ablation.csv";
  std::ofstream out = open_output(raw, comment);
  out << "variant,train_size,seed,dice\n";
  for (const RunOutcome& r : result.runs) {
    out << to_string(r.variant) << ',' << r.train_size << ',' << r.seed << ','
        << format_double(r.report.dice) << '\n';
  }
  finish(out, raw);

  const auto agg = dir / "ablation_agg.csv";
  std::ofstream aout = open_output(agg, comment);
  aout << "variant,train_size,dice_mean,dice_stderr,repeats\n";
  for (const AblationPoint& p : result.points) {
    aout << to_string(p.variant) << ',' << p.train_size << ','
         << format_double(p.dice.mean) << ',' << format_double(p.dice.std_error)
         << ',' << p.dice.count << '\n';
  }
  finish(aout, agg);

  emit_plot(ablation_curves(result), dir / "ablation.svg", comment);
}

void run_experiment(const ExperimentSpec& spec, const std::filesystem::path& dir,
                    const std::string& comment) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const ExperimentData data = prepare_data(spec);
  write_comparison(dir, run_loss_comparison(spec, data), comment);
  write_ablation(dir, run_data_ablation(spec, data), comment);
}

}  // namespace fess
