// Copyright 2026 The QFL-HEP Authors
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
#include <functional>

namespace qfl {

/// Worker count from QFL_WORKERS, falling back to hardware concurrency.
std::size_t default_workers();

/**
 * Run fn(i) for i in [0, n) on up to `workers` threads. Each index is
 * visited exactly once; callers write results into per-index slots and
 * reduce afterwards so the outcome does not depend on scheduling. The
 * first exception thrown by any task is rethrown on the calling thread.
 */
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)> &fn);

} // namespace qfl
