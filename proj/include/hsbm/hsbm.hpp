/*
 * Copyright 2026 The hsbm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "hsbm/adjacency.hpp"
#include "hsbm/combinatorics.hpp"
#include "hsbm/divergence.hpp"
#include "hsbm/eigensolver.hpp"
#include "hsbm/errors.hpp"
#include "hsbm/harness.hpp"
#include "hsbm/io.hpp"
#include "hsbm/model.hpp"
#include "hsbm/pipeline.hpp"
#include "hsbm/random.hpp"
#include "hsbm/refinement.hpp"
#include "hsbm/spectral.hpp"
