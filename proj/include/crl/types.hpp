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

#ifndef CRL_TYPES_HPP_
#define CRL_TYPES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace crl {

/// Spatial grid of one activation map. Values are laid out channels-last:
/// index = (row * width + col) * channels + channel.
struct Shape {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 0;

  std::size_t dim() const {
    return static_cast<std::size_t>(height) * width * channels;
  }
  std::size_t index(std::size_t row, std::size_t col, std::size_t ch) const {
    return (row * width + col) * channels + ch;
  }
  std::string str() const;  // "HxWxC"

  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Records are capped at 2^24 values; anything larger is treated as a
/// corrupt header.
inline constexpr std::size_t kMaxDim = std::size_t{1} << 24;

/// Parses "HxWxC". Throws Error(kInvalidArgument) on malformed input.
Shape parse_shape(const std::string& text);

/// One instance's activation feature map.
struct AfmVector {
  std::vector<float> values;
  Shape shape;

  std::size_t dim() const { return values.size(); }
  std::span<const float> span() const { return values; }

  /// Throws if the length disagrees with the shape or a value is NaN/Inf.
  void validate() const;

  friend bool operator==(const AfmVector&, const AfmVector&) = default;
};

struct LabeledInstance {
  std::uint32_t class_id = 0;
  AfmVector afm;

  friend bool operator==(const LabeledInstance&,
                         const LabeledInstance&) = default;
};

/// A labeled split of one dataset: every record shares `shape`, and
/// `class_id` indexes into `labels`.
struct FeatureBundle {
  Shape shape;
  std::vector<std::string> labels;
  std::vector<LabeledInstance> records;
  std::string domain_tag;

  std::size_t dim() const { return shape.dim(); }

  /// Checks unique labels, record lengths and shapes, class ids in range
  /// and finite values. Throws crl::Error with the matching code.
  void validate() const;

  /// Number of records per class id, in label-table order.
  std::vector<std::size_t> class_counts() const;

  friend bool operator==(const FeatureBundle&, const FeatureBundle&) = default;
};

}  // namespace crl

#endif  // CRL_TYPES_HPP_
