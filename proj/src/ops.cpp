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

#include "fess/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "fess/error.hpp"

namespace fess::ops {

namespace {

const Volume& val(Var v) {
  if (v.tape == nullptr) throw ValidationError("null tape handle");
  return v.tape->value(v);
}

template <typename Forward, typename Derivative>
Var unary(std::string_view kind, Var a, Forward f, Derivative dydx) {
  const Volume& x = val(a);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = f(x[i]);
  Volume out(x.shape(), std::move(y));
  const Var inputs[] = {a};
  return a.tape->record(kind, inputs, std::move(out),
                        [dydx](const BackwardContext& ctx) {
                          std::vector<double>* gx = ctx.input_grads[0];
                          if (!gx) return;
                          const Volume& x = *ctx.inputs[0];
                          for (std::size_t i = 0; i < gx->size(); ++i) {
                            (*gx)[i] += ctx.output_grad[i] *
                                        dydx(x[i], ctx.output[i]);
                          }
                        });
}

struct Spatial {
  std::size_t n, ni, nj, nk, c;
  std::size_t voxels() const { return ni * nj * nk; }
};

Spatial spatial_of(std::string_view op, const Volume& v) {
  if (v.rank() != 5) {
    throw ValidationError(std::string(op) +
                          ": expected (n,i,j,k,c) feature map, got " +
                          shape_to_string(v.shape()));
  }
  const Shape& s = v.shape();
  return {s[0], s[1], s[2], s[3], s[4]};
}

// Column matrix for the i-planes [i0, i1) of one sample: shape
// (27 * c_in) x tile with tile = (i1 - i0) * nj * nk. Row r = offset * c_in + ci
// holds input channel ci shifted by the kernel offset; padding is zero.
void im2col(const double* x, const Spatial& g, std::size_t i0, std::size_t i1,
            std::vector<double>& col) {
  const std::size_t plane = g.nj * g.nk;
  const std::size_t tile = (i1 - i0) * plane;
  col.resize(27 * g.c * tile);
  std::size_t offset = 0;
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      for (int dk = -1; dk <= 1; ++dk, ++offset) {
        const std::size_t k0 = dk < 0 ? 1 : 0;
        const std::size_t k1 = dk > 0 ? g.nk - 1 : g.nk;
        for (std::size_t ci = 0; ci < g.c; ++ci) {
          double* row = col.data() + (offset * g.c + ci) * tile;
          for (std::size_t i = i0; i < i1; ++i) {
            const std::ptrdiff_t si = static_cast<std::ptrdiff_t>(i) + di;
            const bool row_in = si >= 0 && si < static_cast<std::ptrdiff_t>(g.ni);
            for (std::size_t j = 0; j < g.nj; ++j) {
              double* dst = row + (i - i0) * plane + j * g.nk;
              const std::ptrdiff_t sj = static_cast<std::ptrdiff_t>(j) + dj;
              if (!row_in || sj < 0 || sj >= static_cast<std::ptrdiff_t>(g.nj)) {
                std::fill_n(dst, g.nk, 0.0);
                continue;
              }
              const double* src =
                  x + ((static_cast<std::size_t>(si) * g.nj +
                        static_cast<std::size_t>(sj)) * g.nk) * g.c + ci;
              if (k0) dst[0] = 0.0;
              if (k1 < g.nk) dst[g.nk - 1] = 0.0;
              for (std::size_t k = k0; k < k1; ++k) {
                dst[k] = src[(k + dk) * g.c];
              }
            }
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatter-adds a column tile back onto the input layout.
void col2im(const std::vector<double>& col, const Spatial& g, std::size_t i0,
            std::size_t i1, double* gx) {
  const std::size_t plane = g.nj * g.nk;
  const std::size_t tile = (i1 - i0) * plane;
  std::size_t offset = 0;
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      for (int dk = -1; dk <= 1; ++dk, ++offset) {
        const std::size_t k0 = dk < 0 ? 1 : 0;
        const std::size_t k1 = dk > 0 ? g.nk - 1 : g.nk;
        for (std::size_t ci = 0; ci < g.c; ++ci) {
          const double* row = col.data() + (offset * g.c + ci) * tile;
          for (std::size_t i = i0; i < i1; ++i) {
            const std::ptrdiff_t si = static_cast<std::ptrdiff_t>(i) + di;
            if (si < 0 || si >= static_cast<std::ptrdiff_t>(g.ni)) continue;
            for (std::size_t j = 0; j < g.nj; ++j) {
              const std::ptrdiff_t sj = static_cast<std::ptrdiff_t>(j) + dj;
              if (sj < 0 || sj >= static_cast<std::ptrdiff_t>(g.nj)) continue;
              const double* src = row + (i - i0) * plane + j * g.nk;
              double* dst =
                  gx + ((static_cast<std::size_t>(si) * g.nj +
                         static_cast<std::size_t>(sj)) * g.nk) * g.c + ci;
              for (std::size_t k = k0; k < k1; ++k) {
                dst[(k + dk) * g.c] += src[k];
              }
            }
          }
        }
      }
    }
  }
}

// Number of i-planes per tile so a column tile stays cache-sized.
std::size_t planes_per_tile(const Spatial& g) {
  constexpr std::size_t kTileVoxels = 256;
  const std::size_t plane = g.nj * g.nk;
  return std::clamp<std::size_t>(kTileVoxels / plane, 1, g.ni);
}

// Dot product with four independent partial sums so the loop vectorizes
// without reassociation flags; the summation order is fixed.
double dot4(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += a[i] * b[i];
    acc[1] += a[i + 1] * b[i + 1];
    acc[2] += a[i + 2] * b[i + 2];
    acc[3] += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) acc[0] += a[i] * b[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

// Four dot products against one shared vector c, each with four partial sums.
void dot4x4(const double* const g[4], const double* c, std::size_t n,
            double out[4]) {
  double acc[4][4] = {};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int r = 0; r < 4; ++r) {
      for (int l = 0; l < 4; ++l) acc[r][l] += g[r][i + l] * c[i + l];
    }
  }
  for (int r = 0; r < 4; ++r) {
    for (std::size_t t = i; t < n; ++t) acc[r][0] += g[r][t] * c[t];
    out[r] = (acc[r][0] + acc[r][1]) + (acc[r][2] + acc[r][3]);
  }
}

}  // namespace

Var add(Var a, Var b) {
  Volume out = elementwise(val(a), val(b), ElementwiseOp::kAdd);
  const Var inputs[] = {a, b};
  return a.tape->record("add", inputs, std::move(out),
                        [](const BackwardContext& ctx) {
                          for (auto* g : ctx.input_grads) {
                            if (!g) continue;
                            for (std::size_t i = 0; i < g->size(); ++i) {
                              (*g)[i] += ctx.output_grad[i];
                            }
                          }
                        });
}

Var sub(Var a, Var b) {
  Volume out = elementwise(val(a), val(b), ElementwiseOp::kSub);
  const Var inputs[] = {a, b};
  return a.tape->record("sub", inputs, std::move(out),
                        [](const BackwardContext& ctx) {
                          if (auto* g = ctx.input_grads[0]) {
                            for (std::size_t i = 0; i < g->size(); ++i) {
                              (*g)[i] += ctx.output_grad[i];
                            }
                          }
                          if (auto* g = ctx.input_grads[1]) {
                            for (std::size_t i = 0; i < g->size(); ++i) {
                              (*g)[i] -= ctx.output_grad[i];
                            }
                          }
                        });
}

Var mul(Var a, Var b) {
  Volume out = elementwise(val(a), val(b), ElementwiseOp::kMul);
  const Var inputs[] = {a, b};
  return a.tape->record(
      "mul", inputs, std::move(out), [](const BackwardContext& ctx) {
        const Volume& x = *ctx.inputs[0];
        const Volume& y = *ctx.inputs[1];
        if (auto* g = ctx.input_grads[0]) {
          for (std::size_t i = 0; i < g->size(); ++i) {
            (*g)[i] += ctx.output_grad[i] * y[i];
          }
        }
        if (auto* g = ctx.input_grads[1]) {
          for (std::size_t i = 0; i < g->size(); ++i) {
            (*g)[i] += ctx.output_grad[i] * x[i];
          }
        }
      });
}

Var scale(Var a, double factor) {
  Volume out = fess::scale(val(a), factor);
  const Var inputs[] = {a};
  return a.tape->record("scale", inputs, std::move(out),
                        [factor](const BackwardContext& ctx) {
                          if (auto* g = ctx.input_grads[0]) {
                            for (std::size_t i = 0; i < g->size(); ++i) {
                              (*g)[i] += factor * ctx.output_grad[i];
                            }
                          }
                        });
}

Var sum(Var a) {
  Volume out = reduce_sum(val(a));
  const Var inputs[] = {a};
  return a.tape->record("sum", inputs, std::move(out),
                        [](const BackwardContext& ctx) {
                          if (auto* g = ctx.input_grads[0]) {
                            for (double& v : *g) v += ctx.output_grad[0];
                          }
                        });
}

Var mean(Var a) {
  const double n = static_cast<double>(val(a).size());
  Volume out = Volume::scalar(reduce_sum(val(a)).item() / n);
  const Var inputs[] = {a};
  return a.tape->record("mean", inputs, std::move(out),
                        [n](const BackwardContext& ctx) {
                          if (auto* g = ctx.input_grads[0]) {
                            for (double& v : *g) v += ctx.output_grad[0] / n;
                          }
                        });
}

Var sqrt(Var a) {
  return unary(
      "sqrt", a, [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / y; });
}

Var exp(Var a) {
  return unary(
      "exp", a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Var log(Var a) {
  return unary(
      "log", a, [](double x) { return std::log(std::max(x, kLogFloor)); },
      [](double x, double) { return x > kLogFloor ? 1.0 / x : 0.0; });
}

Var reciprocal(Var a) {
  return unary(
      "reciprocal", a, [](double x) { return 1.0 / x; },
      [](double, double y) { return -y * y; });
}

Var relu(Var a) {
  return unary(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(Var a) {
  return unary(
      "sigmoid", a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var conv3d(Var input, Var kernel, Var bias) {
  const Volume& x = val(input);
  const Volume& w = val(kernel);
  const Volume& b = val(bias);
  const Spatial g = spatial_of("conv3d", x);
  if (w.rank() != 5 || w.extent(1) != 3 || w.extent(2) != 3 ||
      w.extent(3) != 3 || w.extent(4) != g.c) {
    throw ValidationError("conv3d: kernel shape " + shape_to_string(w.shape()) +
                          " incompatible with input " +
                          shape_to_string(x.shape()));
  }
  const std::size_t cout = w.extent(0);
  if (b.shape() != Shape{cout}) {
    throw ValidationError("conv3d: bias shape " + shape_to_string(b.shape()) +
                          " does not match " + std::to_string(cout) +
                          " output channels");
  }
  const std::size_t voxels = g.voxels();
  const std::size_t plane = g.nj * g.nk;
  const std::size_t rows = 27 * g.c;
  const std::size_t step = planes_per_tile(g);
  const double* wd = w.data().data();

  std::vector<double> y(g.n * voxels * cout);
  std::vector<double> col;
  std::vector<double> acc;
  for (std::size_t n = 0; n < g.n; ++n) {
    const double* xn = x.data().data() + n * voxels * g.c;
    double* yn = y.data() + n * voxels * cout;
    for (std::size_t i0 = 0; i0 < g.ni; i0 += step) {
      const std::size_t i1 = std::min(i0 + step, g.ni);
      const std::size_t tile = (i1 - i0) * plane;
      im2col(xn, g, i0, i1, col);
      acc.resize(cout * tile);
      for (std::size_t co = 0; co < cout; ++co) {
        std::fill_n(acc.begin() + co * tile, tile, b[co]);
      }
      for (std::size_t r = 0; r < rows; ++r) {
        const double* cr = col.data() + r * tile;
        for (std::size_t co = 0; co < cout; ++co) {
          const double wv = wd[co * rows + r];
          double* out = acc.data() + co * tile;
          for (std::size_t t = 0; t < tile; ++t) out[t] += wv * cr[t];
        }
      }
      double* yt = yn + i0 * plane * cout;
      for (std::size_t t = 0; t < tile; ++t) {
        for (std::size_t co = 0; co < cout; ++co) {
          yt[t * cout + co] = acc[co * tile + t];
        }
      }
    }
  }
  Volume out({g.n, g.ni, g.nj, g.nk, cout}, std::move(y));

  const Var inputs[] = {input, kernel, bias};
  return input.tape->record(
      "conv3d", inputs, std::move(out),
      [g, cout, voxels, plane, rows, step](const BackwardContext& ctx) {
        const Volume& x = *ctx.inputs[0];
        const double* wd = ctx.inputs[1]->data().data();
        std::vector<double>* gx = ctx.input_grads[0];
        std::vector<double>* gw = ctx.input_grads[1];
        std::vector<double>* gb = ctx.input_grads[2];
        std::vector<double> col;
        std::vector<double> gt;
        std::vector<double> dcol;
        for (std::size_t n = 0; n < g.n; ++n) {
          const double* xn = x.data().data() + n * voxels * g.c;
          for (std::size_t i0 = 0; i0 < g.ni; i0 += step) {
            const std::size_t i1 = std::min(i0 + step, g.ni);
            const std::size_t tile = (i1 - i0) * plane;
            const double* gy =
                ctx.output_grad.data() + (n * voxels + i0 * plane) * cout;
            gt.resize(cout * tile);
            for (std::size_t t = 0; t < tile; ++t) {
              for (std::size_t co = 0; co < cout; ++co) {
                gt[co * tile + t] = gy[t * cout + co];
              }
            }
            if (gb) {
              for (std::size_t co = 0; co < cout; ++co) {
                double s = 0.0;
                const double* gr = gt.data() + co * tile;
                for (std::size_t t = 0; t < tile; ++t) s += gr[t];
                (*gb)[co] += s;
              }
            }
            if (gw) {
              im2col(xn, g, i0, i1, col);
              std::size_t co = 0;
              for (; co + 4 <= cout; co += 4) {
                const double* gr[4] = {gt.data() + co * tile,
                                       gt.data() + (co + 1) * tile,
                                       gt.data() + (co + 2) * tile,
                                       gt.data() + (co + 3) * tile};
                double d[4];
                for (std::size_t r = 0; r < rows; ++r) {
                  dot4x4(gr, col.data() + r * tile, tile, d);
                  for (std::size_t q = 0; q < 4; ++q) {
                    (*gw)[(co + q) * rows + r] += d[q];
                  }
                }
              }
              for (; co < cout; ++co) {
                const double* gr = gt.data() + co * tile;
                for (std::size_t r = 0; r < rows; ++r) {
                  (*gw)[co * rows + r] += dot4(gr, col.data() + r * tile, tile);
                }
              }
            }
            if (gx) {
              dcol.assign(rows * tile, 0.0);
              for (std::size_t r = 0; r < rows; ++r) {
                double* dr = dcol.data() + r * tile;
                std::size_t co = 0;
                for (; co + 4 <= cout; co += 4) {
                  const double w0 = wd[co * rows + r];
                  const double w1 = wd[(co + 1) * rows + r];
                  const double w2 = wd[(co + 2) * rows + r];
                  const double w3 = wd[(co + 3) * rows + r];
                  const double* g0 = gt.data() + co * tile;
                  const double* g1 = g0 + tile;
                  const double* g2 = g1 + tile;
                  const double* g3 = g2 + tile;
                  for (std::size_t t = 0; t < tile; ++t) {
                    dr[t] += (w0 * g0[t] + w1 * g1[t]) + (w2 * g2[t] + w3 * g3[t]);
                  }
                }
                for (; co < cout; ++co) {
                  const double wv = wd[co * rows + r];
                  const double* gr = gt.data() + co * tile;
                  for (std::size_t t = 0; t < tile; ++t) dr[t] += wv * gr[t];
                }
              }
              col2im(dcol, g, i0, i1, gx->data() + n * voxels * g.c);
            }
          }
        }
      });
}

Var maxpool3d(Var input) {
  const Volume& x = val(input);
  const Spatial g = spatial_of("maxpool3d", x);
  if (g.ni % 2 || g.nj % 2 || g.nk % 2) {
    throw ValidationError("maxpool3d: spatial extents must be even, got " +
                          shape_to_string(x.shape()));
  }
  const Spatial h{g.n, g.ni / 2, g.nj / 2, g.nk / 2, g.c};
  auto argmax = std::make_shared<std::vector<std::size_t>>(
      h.n * h.voxels() * h.c);
  std::vector<double> y(argmax->size());
  std::size_t o = 0;
  for (std::size_t n = 0; n < h.n; ++n) {
    for (std::size_t i = 0; i < h.ni; ++i) {
      for (std::size_t j = 0; j < h.nj; ++j) {
        for (std::size_t k = 0; k < h.nk; ++k) {
          for (std::size_t c = 0; c < h.c; ++c, ++o) {
            std::size_t best = 0;
            double best_v = 0.0;
            bool first = true;
            for (std::size_t a = 0; a < 8; ++a) {
              const std::size_t si = 2 * i + (a >> 2);
              const std::size_t sj = 2 * j + ((a >> 1) & 1);
              const std::size_t sk = 2 * k + (a & 1);
              const std::size_t src =
                  (((n * g.ni + si) * g.nj + sj) * g.nk + sk) * g.c + c;
              if (first || x[src] > best_v) {
                best = src;
                best_v = x[src];
                first = false;
              }
            }
            y[o] = best_v;
            (*argmax)[o] = best;
          }
        }
      }
    }
  }
  Volume out({h.n, h.ni, h.nj, h.nk, h.c}, std::move(y));
  const Var inputs[] = {input};
  return input.tape->record("maxpool3d", inputs, std::move(out),
                            [argmax](const BackwardContext& ctx) {
                              auto* gx = ctx.input_grads[0];
                              if (!gx) return;
                              for (std::size_t o = 0; o < argmax->size(); ++o) {
                                (*gx)[(*argmax)[o]] += ctx.output_grad[o];
                              }
                            });
}

Var upsample3d(Var input) {
  const Volume& x = val(input);
  const Spatial g = spatial_of("upsample3d", x);
  const Spatial h{g.n, g.ni * 2, g.nj * 2, g.nk * 2, g.c};
  // Source flat index for every output element.
  auto source = std::make_shared<std::vector<std::size_t>>(
      h.n * h.voxels() * h.c);
  std::vector<double> y(source->size());
  std::size_t o = 0;
  for (std::size_t n = 0; n < h.n; ++n) {
    for (std::size_t i = 0; i < h.ni; ++i) {
      for (std::size_t j = 0; j < h.nj; ++j) {
        for (std::size_t k = 0; k < h.nk; ++k) {
          const std::size_t base =
              (((n * g.ni + i / 2) * g.nj + j / 2) * g.nk + k / 2) * g.c;
          for (std::size_t c = 0; c < h.c; ++c, ++o) {
            (*source)[o] = base + c;
            y[o] = x[base + c];
          }
        }
      }
    }
  }
  Volume out({h.n, h.ni, h.nj, h.nk, h.c}, std::move(y));
  const Var inputs[] = {input};
  return input.tape->record("upsample3d", inputs, std::move(out),
                            [source](const BackwardContext& ctx) {
                              auto* gx = ctx.input_grads[0];
                              if (!gx) return;
                              for (std::size_t o = 0; o < source->size(); ++o) {
                                (*gx)[(*source)[o]] += ctx.output_grad[o];
                              }
                            });
}

Var concat_channels(Var a, Var b) {
  const Volume& x = val(a);
  const Volume& z = val(b);
  if (x.rank() != z.rank() || x.rank() == 0 ||
      !std::equal(x.shape().begin(), x.shape().end() - 1, z.shape().begin())) {
    throw ValidationError("concat_channels: incompatible shapes " +
                          shape_to_string(x.shape()) + " and " +
                          shape_to_string(z.shape()));
  }
  const std::size_t ca = x.shape().back();
  const std::size_t cb = z.shape().back();
  const std::size_t rows = x.size() / ca;
  std::vector<double> y(rows * (ca + cb));
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(x.data().begin() + r * ca, ca, y.begin() + r * (ca + cb));
    std::copy_n(z.data().begin() + r * cb, cb,
                y.begin() + r * (ca + cb) + ca);
  }
  Shape shape = x.shape();
  shape.back() = ca + cb;
  Volume out(std::move(shape), std::move(y));
  const Var inputs[] = {a, b};
  return a.tape->record(
      "concat_channels", inputs, std::move(out),
      [rows, ca, cb](const BackwardContext& ctx) {
        auto* ga = ctx.input_grads[0];
        auto* gb = ctx.input_grads[1];
        for (std::size_t r = 0; r < rows; ++r) {
          const double* g = ctx.output_grad.data() + r * (ca + cb);
          if (ga) {
            for (std::size_t c = 0; c < ca; ++c) (*ga)[r * ca + c] += g[c];
          }
          if (gb) {
            for (std::size_t c = 0; c < cb; ++c) (*gb)[r * cb + c] += g[ca + c];
          }
        }
      });
}

Var l2_normalize(Var a, double epsilon) {
  const Volume& x = val(a);
  if (x.rank() == 0) throw ValidationError("l2_normalize: scalar input");
  if (!(epsilon > 0.0)) {
    throw ValidationError("l2_normalize: epsilon must be positive");
  }
  const std::size_t samples = x.extent(0);
  const std::size_t block = x.size() / samples;
  auto norms = std::make_shared<std::vector<double>>(samples);
  std::vector<double> y(x.size());
  for (std::size_t n = 0; n < samples; ++n) {
    double ss = 0.0;
    for (std::size_t d = 0; d < block; ++d) {
      ss += x[n * block + d] * x[n * block + d];
    }
    const double norm = std::sqrt(ss);
    (*norms)[n] = norm;
    const double s = std::max(norm, epsilon);
    for (std::size_t d = 0; d < block; ++d) y[n * block + d] = x[n * block + d] / s;
  }
  Volume out(x.shape(), std::move(y));
  const Var inputs[] = {a};
  return a.tape->record(
      "l2_normalize", inputs, std::move(out),
      [norms, block, epsilon](const BackwardContext& ctx) {
        auto* gx = ctx.input_grads[0];
        if (!gx) return;
        const Volume& y = ctx.output;
        for (std::size_t n = 0; n < norms->size(); ++n) {
          const double norm = (*norms)[n];
          const double* g = ctx.output_grad.data() + n * block;
          double* out = gx->data() + n * block;
          if (norm > epsilon) {
            double dot = 0.0;
            for (std::size_t d = 0; d < block; ++d) dot += y[n * block + d] * g[d];
            for (std::size_t d = 0; d < block; ++d) {
              out[d] += (g[d] - y[n * block + d] * dot) / norm;
            }
          } else {
            for (std::size_t d = 0; d < block; ++d) out[d] += g[d] / epsilon;
          }
        }
      });
}

Var reshape(Var a, Shape shape) {
  Volume out = val(a).reshaped(std::move(shape));
  const Var inputs[] = {a};
  return a.tape->record("reshape", inputs, std::move(out),
                        [](const BackwardContext& ctx) {
                          if (auto* g = ctx.input_grads[0]) {
                            for (std::size_t i = 0; i < g->size(); ++i) {
                              (*g)[i] += ctx.output_grad[i];
                            }
                          }
                        });
}

}  // namespace fess::ops
