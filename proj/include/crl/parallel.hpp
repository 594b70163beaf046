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

#ifndef CRL_PARALLEL_HPP_
#define CRL_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace crl {

/// Maps a requested worker count to an effective one. 0 means "use the
/// machine": hardware_concurrency, or 1 when that is unknown.
unsigned resolve_threads(unsigned requested);

/// Runs body(i) for every i in [0, n) on up to `threads` workers using a
/// static contiguous partition. Each index is visited exactly once; callers
/// write results into per-index slots so output never depends on scheduling.
/// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace crl

#endif  // CRL_PARALLEL_HPP_
