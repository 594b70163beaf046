// Copyright 2026 The CRL Authors.
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

#include "crl/pooling.hpp"

#include <algorithm>
#include <limits>

#include "crl/error.hpp"

namespace crl {

std::string PoolingSpec::str() const {
  return std::string(to_string(mode)) + ":" + std::to_string(filter_h) + "x" +
         std::to_string(filter_w) + "/" + std::to_string(stride_h) + "x" +
         std::to_string(stride_w);
}

PoolMode parse_pool_mode(const std::string& text) {
  if (text == "avg") return PoolMode::kAvg;
  if (text == "max") return PoolMode::kMax;
  if (text == "min") return PoolMode::kMin;
  throw Error(ErrorCode::kInvalidArgument, "pool mode must be avg, max or min, got '" + text + "'");
}

const char* to_string(PoolMode mode) {
  switch (mode) {
    case PoolMode::kAvg: return "avg";
    case PoolMode::kMax: return "max";
    case PoolMode::kMin: return "min";
  }
  return "?";
}

namespace {

std::uint32_t output_extent(std::uint32_t in, std::uint32_t filter, std::uint32_t stride) {
  return (in - filter + stride - 1) / stride + 1;
}

}  // namespace

Shape pooled_shape(const Shape& in, const PoolingSpec& spec) {
  if (spec.filter_h == 0 || spec.filter_w == 0 || spec.stride_h == 0 || spec.stride_w == 0) {
    throw Error(ErrorCode::kInvalidArgument, "pooling filter and stride must be >= 1");
  }
  if (spec.stride_h > spec.filter_h || spec.stride_w > spec.filter_w) {
    throw Error(ErrorCode::kInvalidArgument,
                "pooling stride " + std::to_string(spec.stride_h) + "x" +
                    std::to_string(spec.stride_w) + " skips cells of filter " +
                    std::to_string(spec.filter_h) + "x" + std::to_string(spec.filter_w));
  }
  if (spec.filter_h > in.height || spec.filter_w > in.width) {
    throw Error(ErrorCode::kInvalidArgument,
                "pooling filter " + std::to_string(spec.filter_h) + "x" +
                    std::to_string(spec.filter_w) + " larger than grid " + in.str());
  }
  return Shape{output_extent(in.height, spec.filter_h, spec.stride_h),
               output_extent(in.width, spec.filter_w, spec.stride_w), in.channels};
}

AfmVector pool(const AfmVector& afm, const PoolingSpec& spec) {
  const Shape& in = afm.shape;
  if (afm.values.size() != in.dim()) {
    throw Error(ErrorCode::kLengthMismatch, "afm length disagrees with shape " + in.str());
  }
  const Shape out_shape = pooled_shape(in, spec);

  AfmVector out;
  out.shape = out_shape;
  out.values.resize(out_shape.dim());
  for (std::size_t oh = 0; oh < out_shape.height; ++oh) {
    const std::size_t h0 = oh * spec.stride_h;
    const std::size_t h1 = std::min<std::size_t>(h0 + spec.filter_h, in.height);
    for (std::size_t ow = 0; ow < out_shape.width; ++ow) {
      const std::size_t w0 = ow * spec.stride_w;
      const std::size_t w1 = std::min<std::size_t>(w0 + spec.filter_w, in.width);
      const double cells = static_cast<double>((h1 - h0) * (w1 - w0));
      for (std::size_t c = 0; c < in.channels; ++c) {
        double acc = 0.0;
        if (spec.mode == PoolMode::kMax) acc = -std::numeric_limits<double>::infinity();
        if (spec.mode == PoolMode::kMin) acc = std::numeric_limits<double>::infinity();
        for (std::size_t h = h0; h < h1; ++h) {
          for (std::size_t w = w0; w < w1; ++w) {
            const double v = afm.values[in.index(h, w, c)];
            switch (spec.mode) {
              case PoolMode::kAvg: acc += v; break;
              case PoolMode::kMax: acc = std::max(acc, v); break;
              case PoolMode::kMin: acc = std::min(acc, v); break;
            }
          }
        }
        if (spec.mode == PoolMode::kAvg) acc /= cells;
        out.values[out_shape.index(oh, ow, c)] = static_cast<float>(acc);
      }
    }
  }
  return out;
}

}  // namespace crl
