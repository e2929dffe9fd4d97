// SPDX-License-Identifier: Apache-2.0
//
// mfdoa - gridless multi-frequency direction-of-arrival estimation
// Copyright (C) 2026 mfdoa contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MFDOA_MFDOA_HPP
#define MFDOA_MFDOA_HPP

// Umbrella header: the whole library in one include.

#include "mfdoa/common.hpp"
#include "mfdoa/conic.hpp"
#include "mfdoa/eig.hpp"
#include "mfdoa/experiments.hpp"
#include "mfdoa/extraction.hpp"
#include "mfdoa/formulations.hpp"
#include "mfdoa/lifting.hpp"
#include "mfdoa/matrix.hpp"
#include "mfdoa/model.hpp"
#include "mfdoa/rng.hpp"

#endif  // MFDOA_MFDOA_HPP
