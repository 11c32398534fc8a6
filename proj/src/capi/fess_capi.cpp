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

#include "fess/fess.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <system_error>

#include "fess/config.hpp"
#include "fess/data.hpp"
#include "fess/error.hpp"
#include "fess/experiments.hpp"
#include "fess/gradcheck_suite.hpp"
#include "fess/losses.hpp"
#include "fess/metrics.hpp"
#include "fess/model.hpp"
#include "fess/trainer.hpp"

struct fess_config {
  fess::RunConfig cfg;
};

struct fess_volume {
  fess::Volume value;
};

struct fess_model {
  fess::UNet3DParams params;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
fess_status guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return FESS_OK;
  } catch (const fess::Error& e) {
    g_last_error = e.what();
    return static_cast<fess_status>(static_cast<int>(e.kind()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return FESS_ERR_INTERNAL;
}

template <typename T>
const T& need(const T* p, const char* what) {
  if (!p) throw fess::ValidationError(std::string(what) + " is null");
  return *p;
}

template <typename T>
T& need(T* p, const char* what) {
  if (!p) throw fess::ValidationError(std::string(what) + " is null");
  return *p;
}

const char* text(const char* s, const char* what) {
  if (!s) throw fess::ValidationError(std::string(what) + " is null");
  return s;
}

void copy_string(const std::string& s, char* buf, std::size_t cap,
                 std::size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf || cap < s.size() + 1) {
    throw fess::ValidationError("buffer of " + std::to_string(cap) +
                                " bytes is too small, need " +
                                std::to_string(s.size() + 1));
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
}

fess_metrics to_c(const fess::MetricReport& r) {
  return {r.dice,      r.iou,       r.precision, r.specificity, r.sensitivity,
          r.counts.tp, r.counts.fp, r.counts.tn, r.counts.fn};
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw fess::IoError("cannot create " + dir.string() + ": " + ec.message());
}

void require_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw fess::IoError("missing data directory " + dir.string());
  }
}

}  // namespace

extern "C" {

const char* fess_version(void) { return "1.0.0"; }

const char* fess_last_error(void) { return g_last_error.c_str(); }

fess_status fess_config_default(fess_config** out) {
  return guard([&] { need(out, "out") = new fess_config{}; });
}

fess_status fess_config_parse(const char* config_text, fess_config** out) {
  return guard([&] {
    auto cfg = fess::parse_config(text(config_text, "text"));
    need(out, "out") = new fess_config{std::move(cfg)};
  });
}

fess_status fess_config_load(const char* path, fess_config** out) {
  return guard([&] {
    auto cfg = fess::load_config(text(path, "path"));
    need(out, "out") = new fess_config{std::move(cfg)};
  });
}

void fess_config_free(fess_config* cfg) { delete cfg; }

fess_status fess_config_validate(const fess_config* cfg) {
  return guard([&] { need(cfg, "config").cfg.validate(); });
}

fess_status fess_config_set_seed(fess_config* cfg, uint64_t seed) {
  return guard([&] { need(cfg, "config").cfg.seed = seed; });
}

fess_status fess_config_set_jobs(fess_config* cfg, size_t jobs) {
  return guard([&] {
    if (jobs < 1) throw fess::ValidationError("jobs must be >= 1");
    need(cfg, "config").cfg.jobs = jobs;
  });
}

fess_status fess_config_seed(const fess_config* cfg, uint64_t* out) {
  return guard([&] { need(out, "out") = need(cfg, "config").cfg.seed; });
}

fess_status fess_config_canonical(const fess_config* cfg, char* buf,
                                  size_t cap, size_t* needed) {
  return guard([&] {
    copy_string(fess::canonical_text(need(cfg, "config").cfg), buf, cap, needed);
  });
}

fess_status fess_config_provenance(const fess_config* cfg, char* buf,
                                   size_t cap, size_t* needed) {
  return guard([&] {
    copy_string(fess::provenance(need(cfg, "config").cfg), buf, cap, needed);
  });
}

fess_status fess_volume_create(const size_t* shape, size_t rank,
                               const double* data, fess_volume** out) {
  return guard([&] {
    if (rank > 0) need(shape, "shape");
    fess::Shape s(shape, shape + rank);
    const std::size_t n = fess::shape_size(s);
    need(data, "data");
    auto* v = new fess_volume{fess::Volume(s, std::vector<double>(data, data + n))};
    need(out, "out") = v;
  });
}

void fess_volume_free(fess_volume* v) { delete v; }

size_t fess_volume_rank(const fess_volume* v) { return v ? v->value.rank() : 0; }

size_t fess_volume_extent(const fess_volume* v, size_t axis) {
  return v && axis < v->value.rank() ? v->value.extent(axis) : 0;
}

size_t fess_volume_size(const fess_volume* v) { return v ? v->value.size() : 0; }

const double* fess_volume_data(const fess_volume* v) {
  return v ? v->value.data().data() : nullptr;
}

fess_status fess_volume_load(const char* path, fess_volume** out) {
  return guard([&] {
    auto v = fess::load_volume(text(path, "path"));
    need(out, "out") = new fess_volume{std::move(v)};
  });
}

fess_status fess_volume_save(const fess_volume* v, const char* path) {
  return guard([&] { fess::save_volume(text(path, "path"), need(v, "volume").value); });
}

fess_status fess_mask_load(const char* path, fess_volume** out) {
  return guard([&] {
    auto m = fess::load_mask(text(path, "path"));
    need(out, "out") = new fess_volume{m.volume()};
  });
}

fess_status fess_mask_save(const fess_volume* mask, const char* path) {
  return guard([&] {
    fess::save_mask(text(path, "path"), fess::BinaryMask(need(mask, "mask").value));
  });
}

fess_status fess_loss_dice(const fess_volume* pred, const fess_volume* truth,
                           double epsilon, double* out) {
  return guard([&] {
    fess::Tape tape;
    const fess::BinaryMask mask(need(truth, "truth").value);
    fess::Var p = tape.constant(need(pred, "pred").value);
    need(out, "out") = tape.value(fess::loss_dice(p, mask, epsilon)).item();
  });
}

fess_status fess_loss_contrastive(const fess_volume* current,
                                  const fess_volume* previous,
                                  const char* variant, double delta, double eta,
                                  double* out) {
  return guard([&] {
    const auto v = fess::parse_loss_variant(text(variant, "variant"));
    if (!v || *v == fess::LossVariant::kDiceOnly) {
      throw fess::ValidationError(std::string("unknown contrastive variant '") +
                                  variant + "'");
    }
    fess::Tape tape;
    const fess::EmbeddingPair pair{tape.constant(need(current, "current").value),
                                   tape.constant(need(previous, "previous").value)};
    fess::Var loss;
    if (*v == fess::LossVariant::kFess) {
      fess::LossConfig cfg;
      cfg.delta = delta;
      cfg.eta = eta;
      cfg.validate();
      loss = fess::loss_contrastive_fess(pair, cfg);
    } else if (*v == fess::LossVariant::kNtXent) {
      loss = fess::loss_ntxent(pair, delta);
    } else {
      loss = fess::loss_infonce(pair, delta);
    }
    need(out, "out") = tape.value(loss).item();
  });
}

fess_status fess_metrics_compute(const fess_volume* pred,
                                 const fess_volume* truth, double threshold,
                                 fess_metrics* out) {
  return guard([&] {
    const fess::BinaryMask mask(need(truth, "truth").value);
    const auto counts = fess::confusion(need(pred, "pred").value, mask, threshold);
    need(out, "out") = to_c(fess::report(counts));
  });
}

fess_status fess_model_init(uint64_t seed, fess_model** out) {
  return guard([&] { need(out, "out") = new fess_model{fess::init_params(seed, 1)}; });
}

fess_status fess_model_load(const char* path, fess_model** out) {
  return guard([&] {
    auto params = fess::load_checkpoint(text(path, "path"));
    need(out, "out") = new fess_model{std::move(params)};
  });
}

fess_status fess_model_save(const fess_model* m, const char* path) {
  return guard([&] {
    fess::save_checkpoint(text(path, "path"), need(m, "model").params);
  });
}

void fess_model_free(fess_model* m) { delete m; }

size_t fess_model_parameter_count(const fess_model* m) {
  return m ? m->params.parameter_count() : 0;
}

fess_status fess_model_predict(const fess_model* m, const fess_volume* image,
                               fess_volume** probs) {
  return guard([&] {
    const fess::Volume& img = need(image, "image").value;
    const bool single = img.rank() == 3;
    if (!single && img.rank() != 4) {
      throw fess::ValidationError("image must have rank 3 or 4, got shape " +
                                  fess::shape_to_string(img.shape()));
    }
    fess::Shape batch_shape = img.shape();
    if (single) batch_shape.insert(batch_shape.begin(), 1);
    fess::Tape tape;
    const auto bound = fess::bind_params(tape, need(m, "model").params, true);
    const auto fw = fess::forward(bound, tape.constant(img.reshaped(batch_shape)));
    need(probs, "probs") =
        new fess_volume{tape.value(fw.probs).reshaped(img.shape())};
  });
}

fess_status fess_generate(const fess_config* cfg, const char* out_dir) {
  return guard([&] {
    const fess::RunConfig& rc = need(cfg, "config").cfg;
    rc.validate();
    const std::filesystem::path dir = text(out_dir, "out_dir");
    const auto samples = fess::generate(rc.synthetic_spec(), rc.data_count);
    auto [train, test] =
        fess::split(samples, rc.experiment.train_fraction, rc.seed);
    ensure_dir(dir / "train");
    ensure_dir(dir / "test");
    fess::save_samples(dir / "train", train);
    fess::save_samples(dir / "test", test);
  });
}

fess_status fess_train(const fess_config* cfg, const char* data_dir,
                       const char* out_dir, fess_metrics* last) {
  return guard([&] {
    const fess::RunConfig& rc = need(cfg, "config").cfg;
    rc.validate();
    const std::filesystem::path data = text(data_dir, "data_dir");
    const std::filesystem::path out = text(out_dir, "out_dir");
    require_dir(data / "train");
    require_dir(data / "test");
    const auto train = fess::load_samples(data / "train");
    const auto test = fess::load_samples(data / "test");
    const auto result = fess::train(rc.trainer_config(), train, test);
    ensure_dir(out);
    const std::string header = fess::provenance(rc);
    fess::write_step_csv(out / "steps.csv", result.log, header);
    fess::write_eval_csv(out / "eval.csv", result.log, header);
    fess::save_checkpoint(out / "model.ckpt", result.params);
    if (last) *last = to_c(result.log.evals.back().report);
  });
}

fess_status fess_eval(const fess_config* cfg, const char* checkpoint,
                      const char* data_dir, fess_metrics* out,
                      size_t* volumes) {
  return guard([&] {
    const fess::RunConfig& rc = need(cfg, "config").cfg;
    rc.validate();
    const auto params = fess::load_checkpoint(text(checkpoint, "checkpoint"));
    std::filesystem::path dir = text(data_dir, "data_dir");
    require_dir(dir);
    std::error_code ec;
    if (std::filesystem::is_directory(dir / "test", ec)) dir /= "test";
    const auto samples = fess::load_samples(dir);
    const auto rec = fess::evaluate(params, samples, rc.trainer.threshold);
    need(out, "out") = to_c(rec.report);
    if (volumes) *volumes = samples.size();
  });
}

fess_status fess_gradcheck(const fess_config* cfg, fess_gradcheck_fn on_case,
                           void* user, size_t* failures) {
  return guard([&] {
    const fess::RunConfig& rc = need(cfg, "config").cfg;
    rc.validate();
    std::size_t failed = 0;
    fess::run_gradcheck_suite(
        rc.gradcheck, rc.seed, [&](const fess::GradcheckCase& c) {
          if (!c.report.passed) ++failed;
          if (on_case) {
            on_case(c.name.c_str(), c.seed, c.report.max_rel_error, c.tolerance,
                    c.report.passed ? 1 : 0, user);
          }
        });
    if (failures) *failures = failed;
  });
}

fess_status fess_experiment(const fess_config* cfg, const char* out_dir) {
  return guard([&] {
    const fess::RunConfig& rc = need(cfg, "config").cfg;
    rc.validate();
    fess::run_experiment(rc.experiment_spec(), text(out_dir, "out_dir"),
                         fess::provenance(rc));
  });
}

}  // extern "C"
