// Copyright (c) 2026 The dysonlab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0.txt
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace dysonlab {

// Resolve a thread budget: explicit request wins, then DYSONLAB_THREADS, then
// hardware concurrency.
int resolve_threads(int requested);

// Run f(task) for task in [0, n_tasks). Tasks must be independent and write
// only to their own output slots; results are then identical for any thread
// count. Exceptions are captured and the first one is rethrown after join.
void parallel_for(int n_tasks, int threads, const std::function<void(int)>& f);

}  // namespace dysonlab
