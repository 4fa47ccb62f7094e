// Copyright 2026 The IQA-DPLL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Umbrella header.

#include "iqa/analytic.hpp"
#include "iqa/bench.hpp"
#include "iqa/dimacs.hpp"
#include "iqa/dpll.hpp"
#include "iqa/error.hpp"
#include "iqa/generators.hpp"
#include "iqa/inference.hpp"
#include "iqa/iqa_engine.hpp"
#include "iqa/optimizer.hpp"
#include "iqa/problem.hpp"
#include "iqa/random.hpp"
#include "iqa/serialization.hpp"
#include "iqa/statevector.hpp"
