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

#ifndef CRL_FEATURE_IO_HPP_
#define CRL_FEATURE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "crl/types.hpp"

namespace crl {

// Bundle Format v1 (little-endian):
//   "CRLAFM1\0", u32 version, u32 H, u32 W, u32 C, u32 num_labels,
//   u32 num_records, u32 domain_tag_len, domain tag bytes,
//   num_labels x (u32 len, bytes), num_records x (u32 class_id, dim x f32)
inline constexpr char kBundleMagic[8] = {'C', 'R', 'L', 'A', 'F', 'M', '1', '\0'};
inline constexpr std::uint32_t kBundleVersion = 1;

/// Serializes a bundle to its exact on-disk byte image.
std::vector<std::uint8_t> encode_bundle(const FeatureBundle& bundle);
FeatureBundle decode_bundle(std::span<const std::uint8_t> bytes);

/// Validates the bundle before touching the file system.
void write_bundle(const FeatureBundle& bundle, const std::filesystem::path& path);
FeatureBundle read_bundle(const std::filesystem::path& path);

/// Places `num_classes` means on a sphere of radius separation*sqrt(C) in
/// `dim` dimensions, rejecting candidates closer than `separation` to an
/// accepted mean. Each mean gets at most 10,000 candidates; exhausting that
/// throws Error(kSeparationUnreachable).
std::vector<std::vector<double>> place_class_means(std::size_t num_classes,
                                                   std::size_t dim,
                                                   double separation,
                                                   std::uint64_t seed);

/// Draws `per_class` unit-variance isotropic Gaussian samples around each
/// given mean. Labels are "class_0", "class_1", ... unless `labels` is
/// non-empty.
FeatureBundle synth_bundle_around(const std::vector<std::vector<double>>& means,
                                  std::size_t per_class, Shape shape,
                                  std::uint64_t seed,
                                  std::vector<std::string> labels = {},
                                  std::string domain_tag = "synth");

/// Seeded synthetic bundle: place_class_means + synth_bundle_around.
/// Records are grouped by class in label order.
FeatureBundle synth_bundle(std::size_t num_classes, std::size_t per_class,
                           Shape shape, double separation, std::uint64_t seed);

}  // namespace crl

#endif  // CRL_FEATURE_IO_HPP_
