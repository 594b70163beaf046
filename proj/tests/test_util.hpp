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


// Shared helpers for the unit and acceptance suites.

#ifndef CRL_TESTS_TEST_UTIL_HPP_
#define CRL_TESTS_TEST_UTIL_HPP_

#include <bit>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "crl/class_rep.hpp"
#include "crl/types.hpp"

namespace crl::testing {

inline bool bits_equal(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint32_t>(a[i]) != std::bit_cast<std::uint32_t>(b[i])) return false;
  }
  return true;
}

inline bool bits_equal(const ClassRepresentative& a, const ClassRepresentative& b) {
  return a.class_name() == b.class_name() && a.count() == b.count() &&
         bits_equal(a.vector(), b.vector());
}

inline bool bits_equal(const FeatureBundle& a, const FeatureBundle& b) {
  if (a.shape != b.shape || a.labels != b.labels || a.domain_tag != b.domain_tag ||
      a.records.size() != b.records.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    if (a.records[i].class_id != b.records[i].class_id) return false;
    if (a.records[i].afm.shape != b.records[i].afm.shape) return false;
    if (!bits_equal(a.records[i].afm.values, b.records[i].afm.values)) return false;
  }
  return true;
}

inline bool bits_equal(const CrModel& a, const CrModel& b) {
  if (a.shape() != b.shape() || a.metadata() != b.metadata() || a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!bits_equal(a.crs()[i], b.crs()[i])) return false;
  }
  return true;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("crl_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Random bundle with arbitrary label strings (including non-ASCII) and
/// values spanning several magnitudes.
inline FeatureBundle random_bundle(std::mt19937_64& rng, std::size_t max_classes = 6,
                                   std::size_t max_records = 20) {
  std::uniform_int_distribution<std::uint32_t> side(1, 4);
  std::uniform_int_distribution<std::size_t> n_classes(1, max_classes);
  std::uniform_int_distribution<std::size_t> n_records(0, max_records);
  std::normal_distribution<float> value(0.0f, 3.0f);
  std::uniform_int_distribution<int> exp(-20, 20);

  FeatureBundle b;
  b.shape = {side(rng), side(rng), side(rng)};
  const std::size_t c = n_classes(rng);
  for (std::size_t i = 0; i < c; ++i) {
    b.labels.push_back(i % 2 ? "klasse_\xc3\xa9" + std::to_string(i) : "cls " + std::to_string(i));
  }
  b.domain_tag = "rand/" + std::to_string(rng() % 1000);
  const std::size_t n = n_records(rng);
  std::uniform_int_distribution<std::uint32_t> cls(0, static_cast<std::uint32_t>(c - 1));
  for (std::size_t i = 0; i < n; ++i) {
    LabeledInstance rec;
    rec.class_id = cls(rng);
    rec.afm.shape = b.shape;
    for (std::size_t j = 0; j < b.dim(); ++j) {
      rec.afm.values.push_back(std::ldexp(value(rng), exp(rng)));
    }
    b.records.push_back(std::move(rec));
  }
  return b;
}

inline std::vector<float> random_vector(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<float> g(0.0f, 1.0f);
  std::vector<float> v(dim);
  for (auto& x : v) x = g(rng);
  return v;
}

/// Model whose CRs are independent Gaussian directions.
inline CrModel random_model(std::mt19937_64& rng, std::size_t classes, std::size_t dim,
                            const std::string& prefix = "c") {
  CrModel m(Shape{1, 1, static_cast<std::uint32_t>(dim)});
  for (std::size_t c = 0; c < classes; ++c) {
    m.add(ClassRepresentative::from_vector(prefix + std::to_string(c), 1 + rng() % 50,
                                           random_vector(rng, dim)));
  }
  return m;
}

}  // namespace crl::testing

#endif  // CRL_TESTS_TEST_UTIL_HPP_
