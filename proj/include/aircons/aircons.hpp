// SPDX-License-Identifier: Apache-2.0
//
// aircons: over-the-air consensus and distributed platoon control simulator
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
//
// Umbrella header: pulls in the whole library.

#pragma once

#include "aircons/allocation.hpp"
#include "aircons/channel.hpp"
#include "aircons/config.hpp"
#include "aircons/consensus.hpp"
#include "aircons/csv.hpp"
#include "aircons/deviation.hpp"
#include "aircons/errors.hpp"
#include "aircons/experiments.hpp"
#include "aircons/matrix.hpp"
#include "aircons/patterns.hpp"
#include "aircons/platoon.hpp"
#include "aircons/rng.hpp"
#include "aircons/simulation.hpp"
