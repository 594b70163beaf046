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

#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>

#include "binary_io.hpp"
#include "crl/class_rep.hpp"
#include "crl/error.hpp"

namespace crl {

namespace {

void check_metadata_value(const std::string& key, const std::string& value) {
  if (value.find('\n') != std::string::npos || value.find('\r') != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "metadata '" + key + "' contains a line break");
  }
}

std::string metadata_text(const ModelMetadata& meta) {
  const std::pair<const char*, const std::string*> fields[] = {
      {"source_env", &meta.source_env},
      {"layer", &meta.layer},
      {"pooling", &meta.pooling},
      {"built_from", &meta.built_from},
  };
  std::string text;
  for (const auto& [key, value] : fields) {
    check_metadata_value(key, *value);
    text += key;
    text += '=';
    text += *value;
    text += '\n';
  }
  return text;
}

ModelMetadata parse_metadata(const std::string& text) {
  ModelMetadata meta;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kLengthMismatch, "malformed metadata line '" + line + "'");
    }
    const std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "source_env") meta.source_env = std::move(value);
    else if (key == "layer") meta.layer = std::move(value);
    else if (key == "pooling") meta.pooling = std::move(value);
    else if (key == "built_from") meta.built_from = std::move(value);
  }
  return meta;
}

}  // namespace

std::vector<std::uint8_t> encode_model(const CrModel& model) {
  detail::ByteWriter w;
  w.raw(kModelMagic);
  w.u32(kModelVersion);
  w.u32(model.shape().height);
  w.u32(model.shape().width);
  w.u32(model.shape().channels);
  w.u32(static_cast<std::uint32_t>(model.size()));
  w.str(metadata_text(model.metadata()));
  for (const auto& cr : model.crs()) {
    w.str(cr.class_name());
    w.u64(cr.count());
    for (float v : cr.vector()) w.f32(v);
  }
  return w.take();
}

CrModel decode_model(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  auto magic = r.take(sizeof(kModelMagic), "magic");
  if (!std::equal(magic.begin(), magic.end(), std::begin(kModelMagic),
                  [](std::uint8_t a, char b) { return a == static_cast<std::uint8_t>(b); })) {
    throw Error(ErrorCode::kBadMagic, "not a CRLMDL1 model");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kModelVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "model version " + std::to_string(version) + ", expected 1");
  }
  Shape shape;
  shape.height = r.u32("height");
  shape.width = r.u32("width");
  shape.channels = r.u32("channels");
  const std::size_t dim = shape.dim();
  if (dim > kMaxDim) {
    throw Error(ErrorCode::kDimensionTooLarge, "model dim " + std::to_string(dim));
  }
  const std::uint32_t num_crs = r.u32("num_crs");
  if (num_crs > 0 && dim == 0) {
    throw Error(ErrorCode::kLengthMismatch, "model shape " + shape.str() + " is empty");
  }
  CrModel model(shape, parse_metadata(r.str("metadata")));

  r.set_truncation_code(ErrorCode::kTruncatedRecords);
  for (std::uint32_t i = 0; i < num_crs; ++i) {
    std::string name = r.str("class name");
    const std::uint64_t count = r.u64("instance count");
    if (r.remaining() / 4 < dim) {
      throw Error(ErrorCode::kTruncatedRecords,
                  "representative " + std::to_string(i) + " of " + std::to_string(num_crs) +
                      " is cut short");
    }
    std::vector<float> values(dim);
    for (auto& v : values) v = r.f32("representative values");
    model.add(ClassRepresentative::from_vector(std::move(name), count, std::move(values)));
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(r.remaining()) + " trailing bytes after last representative");
  }
  return model;
}

void save_model(const CrModel& model, const std::filesystem::path& path) {
  const auto bytes = encode_model(model);
  detail::write_file(path, bytes);
}

CrModel load_model(const std::filesystem::path& path) {
  return decode_model(detail::read_file(path));
}

}  // namespace crl
