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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "avqa/tape.hpp"

// Differentiable operations on Tape values. Every op checks operand shapes and
// throws DimensionError naming both shapes on mismatch. Only the broadcasts the
// model needs are supported.
namespace avqa::numerics {

// [M x K] * [K x N] -> [M x N]
Var matmul(const Var& a, const Var& b);

// Elementwise, identical shapes.
Var add(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);

// [M x N] + bias[N] (bias may also be shaped [1 x N]).
Var add_bias(const Var& x, const Var& bias);

// [M x N] with each row i multiplied by s[i]; s is [M x 1].
Var scale_rows(const Var& x, const Var& s);

// 1 / (1 + exp(-x)), exponent input clamped to [-500, 500] and the result kept
// strictly inside (0, 1).
Var sigmoid(const Var& x);
double sigmoid(double x);

Var relu(const Var& x);

// Sum of all entries -> [1].
Var sum(const Var& x);

// Mean of all entries -> [1].
Var mean(const Var& x);

// Column-wise concatenation of rank-2 values with equal row counts.
Var concat_cols(std::span<const Var> parts);
// Row-wise concatenation of rank-2 values with equal column counts.
Var concat_rows(std::span<const Var> parts);

// [M x N] -> [(M*times) x N]; row i is emitted `times` times consecutively.
Var repeat_rows(const Var& x, std::size_t times);

// [(G*group) x N] -> [G x N], mean over consecutive blocks of `group` rows.
Var segment_mean(const Var& x, std::size_t group);

// [B x C x H x W] -> [B x C], mean over the spatial axes.
Var global_average_pool(const Var& v);

// Depthwise 1-D convolution along time with zero "same" padding.
// a: [T x K], kernel: [K x W] with W odd. Output [T x K] with
//   out[t,k] = sum_{j=0}^{W-1} kernel[k,j] * a[t + j - W/2, k]
// accumulated left to right over the taps j.
Var depthwise_temporal_conv1d(const Var& a, const Var& kernel);

}  // namespace avqa::numerics
