// Copyright 2026 The mcm-avqa Authors
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

#include "avqa/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "avqa/error.hpp"

namespace avqa::numerics {
namespace {

[[noreturn]] void mismatch(const char* op, const Var& a, const Var& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + shape_string(a.shape()) + " and " +
                       shape_string(b.shape()));
}

void require_rank(const char* op, const Var& x, std::size_t rank) {
  if (x.shape().size() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got shape " +
                         shape_string(x.shape()));
  }
}

constexpr double kSigmoidClamp = 500.0;

}  // namespace

Var matmul(const Var& a, const Var& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2 || a.shape()[1] != b.shape()[0]) mismatch("matmul", a, b);
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  const auto av = a.value();
  const auto bv = b.value();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double x = av[i * k + p];
      const double* brow = &bv[p * n];
      double* orow = &out[i * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += x * brow[j];
    }
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record({m, n}, std::move(out), {a, b}, [ia, ib, m, k, n](Tape& t, std::size_t self) {
    const auto g = t.out_grad(self);
    const auto& av = t.value(ia);
    const auto& bv = t.value(ib);
    if (auto ga = t.in_grad(ia); !ga.empty()) {
      // dA = G * B^T
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * bv[p * n + j];
          ga[i * k + p] += acc;
        }
    }
    if (auto gb = t.in_grad(ib); !gb.empty()) {
      // dB = A^T * G
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double x = av[i * k + p];
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += x * g[i * n + j];
        }
    }
  });
}

Var add(const Var& a, const Var& b) {
  if (a.shape() != b.shape()) mismatch("add", a, b);
  const auto av = a.value();
  const auto bv = b.value();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(a.shape(), std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const auto g = t.out_grad(self);
    for (std::size_t id : {ia, ib})
      if (auto gi = t.in_grad(id); !gi.empty())
        for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i];
  });
}

Var mul(const Var& a, const Var& b) {
  if (a.shape() != b.shape()) mismatch("mul", a, b);
  const auto av = a.value();
  const auto bv = b.value();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(a.shape(), std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const auto g = t.out_grad(self);
    const auto& av = t.value(ia);
    const auto& bv = t.value(ib);
    if (auto ga = t.in_grad(ia); !ga.empty())
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    if (auto gb = t.in_grad(ib); !gb.empty())
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
  });
}

Var add_bias(const Var& x, const Var& bias) {
  require_rank("add_bias", x, 2);
  const std::size_t m = x.shape()[0], n = x.shape()[1];
  if (bias.size() != n || bias.shape().size() > 2 || (bias.shape().size() == 2 && bias.shape()[0] != 1)) {
    mismatch("add_bias", x, bias);
  }
  const auto xv = x.value();
  const auto bv = bias.value();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = xv[i * n + j] + bv[j];
  const std::size_t ix = x.id(), ib = bias.id();
  return x.tape().record({m, n}, std::move(out), {x, bias}, [ix, ib, m, n](Tape& t, std::size_t self) {
    const auto g = t.out_grad(self);
    if (auto gx = t.in_grad(ix); !gx.empty())
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    if (auto gb = t.in_grad(ib); !gb.empty())
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
  });
}

Var scale_rows(const Var& x, const Var& s) {
  require_rank("scale_rows", x, 2);
  const std::size_t m = x.shape()[0], n = x.shape()[1];
  if (s.size() != m || s.shape().size() != 2 || s.shape()[1] != 1) mismatch("scale_rows", x, s);
  const auto xv = x.value();
  const auto sv = s.value();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = xv[i * n + j] * sv[i];
  const std::size_t ix = x.id(), is = s.id();
  return x.tape().record({m, n}, std::move(out), {x, s}, [ix, is, m, n](Tape& t, std::size_t self) {
    const auto g = t.out_grad(self);
    const auto& xv = t.value(ix);
    const auto& sv = t.value(is);
    if (auto gx = t.in_grad(ix); !gx.empty())
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += g[i * n + j] * sv[i];
    if (auto gs = t.in_grad(is); !gs.empty())
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * xv[i * n + j];
        gs[i] += acc;
      }
  });
}

double sigmoid(double x) {
  const double z = std::clamp(x, -kSigmoidClamp, kSigmoidClamp);
  const double y = 1.0 / (1.0 + std::exp(-z));
  // exp(-z) vanishes against 1 for z > ~37; keep the open interval.
  return std::min(y, std::nextafter(1.0, 0.0));
}

Var sigmoid(const Var& x) {
  const auto xv = x.value();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigmoid(xv[i]);
  const std::size_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), {x}, [ix](Tape& t, std::size_t self) {
    const auto g = t.out_grad(self);
    const auto& y = t.value(self);
    if (auto gx = t.in_grad(ix); !gx.empty())
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var relu(const Var& x) {
  const auto xv = x.value();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] > 0.0 ? xv[i] : 0.0;
  const std::size_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), {x}, [ix](Tape& t, std::size_t self) {
    const auto g = t.out_grad(self);
    const auto& xv = t.value(ix);
    if (auto gx = t.in_grad(ix); !gx.empty())
      for (std::size_t i = 0; i < g.size(); ++i)
        if (xv[i] > 0.0) gx[i] += g[i];
  });
}

Var sum(const Var& x) {
  double acc = 0.0;
  for (double v : x.value()) acc += v;
  const std::size_t ix = x.id();
  return x.tape().record({1}, {acc}, {x}, [ix](Tape& t, std::size_t self) {
    const double g = t.out_grad(self)[0];
    if (auto gx = t.in_grad(ix); !gx.empty())
      for (double& v : gx) v += g;
  });
}

Var mean(const Var& x) {
  const double n = static_cast<double>(x.size());
  double acc = 0.0;
  for (double v : x.value()) acc += v;
  const std::size_t ix = x.id();
  return x.tape().record({1}, {acc / n}, {x}, [ix, n](Tape& t, std::size_t self) {
    const double g = t.out_grad(self)[0] / n;
    if (auto gx = t.in_grad(ix); !gx.empty())
      for (double& v : gx) v += g;
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no operands");
  const std::size_t m = parts[0].shape().size() == 2 ? parts[0].shape()[0] : 0;
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Var& p : parts) {
    if (p.shape().size() != 2 || p.shape()[0] != m) mismatch("concat_cols", parts[0], p);
    widths.push_back(p.shape()[1]);
    total += p.shape()[1];
  }
  std::vector<double> out(m * total);
  std::vector<std::size_t> ids;
  std::size_t offset = 0;
  for (std::size_t q = 0; q < parts.size(); ++q) {
    const auto v = parts[q].value();
    const std::size_t w = widths[q];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < w; ++j) out[i * total + offset + j] = v[i * w + j];
    offset += w;
    ids.push_back(parts[q].id());
  }
  return parts[0].tape().record({m, total}, std::move(out), parts,
                                [ids, widths, m, total](Tape& t, std::size_t self) {
                                  const auto g = t.out_grad(self);
                                  std::size_t offset = 0;
                                  for (std::size_t q = 0; q < ids.size(); ++q) {
                                    const std::size_t w = widths[q];
                                    if (auto gi = t.in_grad(ids[q]); !gi.empty())
                                      for (std::size_t i = 0; i < m; ++i)
                                        for (std::size_t j = 0; j < w; ++j) gi[i * w + j] += g[i * total + offset + j];
                                    offset += w;
                                  }
                                });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no operands");
  const std::size_t n = parts[0].shape().size() == 2 ? parts[0].shape()[1] : 0;
  std::size_t rows = 0;
  std::vector<std::size_t> ids, sizes;
  std::vector<double> out;
  for (const Var& p : parts) {
    if (p.shape().size() != 2 || p.shape()[1] != n) mismatch("concat_rows", parts[0], p);
    rows += p.shape()[0];
    const auto v = p.value();
    out.insert(out.end(), v.begin(), v.end());
    ids.push_back(p.id());
    sizes.push_back(v.size());
  }
  return parts[0].tape().record({rows, n}, std::move(out), parts, [ids, sizes](Tape& t, std::size_t self) {
    const auto g = t.out_grad(self);
    std::size_t offset = 0;
    for (std::size_t q = 0; q < ids.size(); ++q) {
      if (auto gi = t.in_grad(ids[q]); !gi.empty())
        for (std::size_t i = 0; i < sizes[q]; ++i) gi[i] += g[offset + i];
      offset += sizes[q];
    }
  });
}

Var repeat_rows(const Var& x, std::size_t times) {
  require_rank("repeat_rows", x, 2);
  if (times == 0) throw DimensionError("repeat_rows: times must be positive");
  const std::size_t m = x.shape()[0], n = x.shape()[1];
  const auto xv = x.value();
  std::vector<double> out;
  out.reserve(m * times * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t r = 0; r < times; ++r) out.insert(out.end(), xv.begin() + i * n, xv.begin() + (i + 1) * n);
  const std::size_t ix = x.id();
  return x.tape().record({m * times, n}, std::move(out), {x}, [ix, m, n, times](Tape& t, std::size_t self) {
    const auto g = t.out_grad(self);
    if (auto gx = t.in_grad(ix); !gx.empty())
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t r = 0; r < times; ++r)
          for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += g[(i * times + r) * n + j];
  });
}

Var segment_mean(const Var& x, std::size_t group) {
  require_rank("segment_mean", x, 2);
  const std::size_t rows = x.shape()[0], n = x.shape()[1];
  if (group == 0 || rows % group != 0) {
    throw DimensionError("segment_mean: " + std::to_string(rows) + " rows not divisible into groups of " +
                         std::to_string(group));
  }
  const std::size_t groups = rows / group;
  const double inv = 1.0 / static_cast<double>(group);
  const auto xv = x.value();
  std::vector<double> out(groups * n, 0.0);
  for (std::size_t gi = 0; gi < groups; ++gi) {
    for (std::size_t r = 0; r < group; ++r)
      for (std::size_t j = 0; j < n; ++j) out[gi * n + j] += xv[(gi * group + r) * n + j];
    for (std::size_t j = 0; j < n; ++j) out[gi * n + j] /= static_cast<double>(group);
  }
  const std::size_t ix = x.id();
  return x.tape().record({groups, n}, std::move(out), {x}, [ix, groups, group, n, inv](Tape& t, std::size_t self) {
    const auto g = t.out_grad(self);
    if (auto gx = t.in_grad(ix); !gx.empty())
      for (std::size_t gi = 0; gi < groups; ++gi)
        for (std::size_t r = 0; r < group; ++r)
          for (std::size_t j = 0; j < n; ++j) gx[(gi * group + r) * n + j] += g[gi * n + j] * inv;
  });
}

Var global_average_pool(const Var& v) {
  require_rank("global_average_pool", v, 4);
  const auto& s = v.shape();
  const std::size_t bc = s[0] * s[1], hw = s[2] * s[3];
  if (hw == 0) throw DegenerateInputError("global_average_pool: empty spatial extent " + shape_string(s));
  const double inv = 1.0 / static_cast<double>(hw);
  const auto vv = v.value();
  std::vector<double> out(bc);
  for (std::size_t i = 0; i < bc; ++i) {
    double acc = 0.0;
    for (std::size_t p = 0; p < hw; ++p) acc += vv[i * hw + p];
    out[i] = acc * inv;
  }
  const std::size_t iv = v.id();
  return v.tape().record({s[0], s[1]}, std::move(out), {v}, [iv, bc, hw, inv](Tape& t, std::size_t self) {
    const auto g = t.out_grad(self);
    if (auto gv = t.in_grad(iv); !gv.empty())
      for (std::size_t i = 0; i < bc; ++i) {
        const double gi = g[i] * inv;
        for (std::size_t p = 0; p < hw; ++p) gv[i * hw + p] += gi;
      }
  });
}

Var depthwise_temporal_conv1d(const Var& a, const Var& kernel) {
  require_rank("depthwise_temporal_conv1d", a, 2);
  require_rank("depthwise_temporal_conv1d", kernel, 2);
  const std::size_t frames = a.shape()[0], channels = a.shape()[1];
  const std::size_t width = kernel.shape()[1];
  if (kernel.shape()[0] != channels) mismatch("depthwise_temporal_conv1d", a, kernel);
  if (width % 2 == 0) throw ConfigError("depthwise_temporal_conv1d: kernel width must be odd, got " + std::to_string(width));
  if (frames == 0) throw DegenerateInputError("depthwise_temporal_conv1d: no frames");
  const auto half = static_cast<std::ptrdiff_t>(width / 2);
  const auto tcount = static_cast<std::ptrdiff_t>(frames);
  const auto av = a.value();
  const auto kv = kernel.value();
  std::vector<double> out(frames * channels);
  for (std::ptrdiff_t t = 0; t < tcount; ++t) {
    for (std::size_t k = 0; k < channels; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < width; ++j) {
        const std::ptrdiff_t src = t + static_cast<std::ptrdiff_t>(j) - half;
        if (src < 0 || src >= tcount) continue;
        acc += kv[k * width + j] * av[static_cast<std::size_t>(src) * channels + k];
      }
      out[static_cast<std::size_t>(t) * channels + k] = acc;
    }
  }
  const std::size_t ia = a.id(), ik = kernel.id();
  return a.tape().record(
      {frames, channels}, std::move(out), {a, kernel},
      [ia, ik, tcount, channels, width, half](Tape& tp, std::size_t self) {
        const auto g = tp.out_grad(self);
        const auto& av = tp.value(ia);
        const auto& kv = tp.value(ik);
        auto ga = tp.in_grad(ia);
        auto gk = tp.in_grad(ik);
        for (std::ptrdiff_t t = 0; t < tcount; ++t)
          for (std::size_t k = 0; k < channels; ++k) {
            const double go = g[static_cast<std::size_t>(t) * channels + k];
            for (std::size_t j = 0; j < width; ++j) {
              const std::ptrdiff_t src = t + static_cast<std::ptrdiff_t>(j) - half;
              if (src < 0 || src >= tcount) continue;
              const std::size_t si = static_cast<std::size_t>(src) * channels + k;
              if (!ga.empty()) ga[si] += go * kv[k * width + j];
              if (!gk.empty()) gk[k * width + j] += go * av[si];
            }
          }
      });
}

}  // namespace avqa::numerics
