// SPDX-License-Identifier: Apache-2.0
//
// iabsim - slot-level simulator for multi-hop maritime IAB networks
// Copyright (C) 2026 The iabsim authors
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

#pragma once

#include "iabsim/core.hpp"
#include "iabsim/rain_table.hpp"
#include "iabsim/channel.hpp"
#include "iabsim/antenna.hpp"
#include "iabsim/phy_link.hpp"
#include "iabsim/bap.hpp"
#include "iabsim/tunnel_stack.hpp"
#include "iabsim/mac_scheduler.hpp"
#include "iabsim/traffic.hpp"
#include "iabsim/scenario.hpp"
#include "iabsim/scenario_io.hpp"
#include "iabsim/metrics.hpp"
#include "iabsim/engine.hpp"
#include "iabsim/campaign.hpp"
