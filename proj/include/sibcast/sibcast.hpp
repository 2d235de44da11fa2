// SPDX-License-Identifier: Apache-2.0
//
// sibcast - system-information broadcast simulator for massive MIMO links
// Copyright (C) 2026 The sibcast authors
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

#ifndef SIBCAST_SIBCAST_HPP
#define SIBCAST_SIBCAST_HPP

#include "channel.hpp"
#include "codes.hpp"
#include "drm.hpp"
#include "experiments.hpp"
#include "linalg.hpp"
#include "link.hpp"
#include "multicell.hpp"
#include "optimizer.hpp"
#include "outage.hpp"
#include "parallel.hpp"
#include "rng.hpp"

#endif
