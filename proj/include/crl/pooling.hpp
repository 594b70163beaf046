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

#ifndef CRL_POOLING_HPP_
#define CRL_POOLING_HPP_

#include <cstdint>
#include <string>

#include "crl/types.hpp"

namespace crl {

enum class PoolMode { kAvg, kMax, kMin };

/// Per-channel window reduction over the H x W grid.
struct PoolingSpec {
  PoolMode mode = PoolMode::kAvg;
  std::uint32_t filter_h = 2;
  std::uint32_t filter_w = 2;
  std::uint32_t stride_h = 2;
  std::uint32_t stride_w = 2;

  /// e.g. "avg:2x2/2x2" (mode:filter/stride).
  std::string str() const;

  friend bool operator==(const PoolingSpec&, const PoolingSpec&) = default;
};

PoolMode parse_pool_mode(const std::string& text);
const char* to_string(PoolMode mode);

/// Output grid: (ceil((H-fh)/sh)+1, ceil((W-fw)/sw)+1, C). Windows that run
/// past the grid edge are truncated to it. Strides must not exceed the
/// filter, so every cell lands in some window and no window is empty.
Shape pooled_shape(const Shape& in, const PoolingSpec& spec);

AfmVector pool(const AfmVector& afm, const PoolingSpec& spec);

}  // namespace crl

#endif  // CRL_POOLING_HPP_
