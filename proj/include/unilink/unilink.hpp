// Copyright 2026 The unilink Authors
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

#include "unilink/common.hpp"
#include "unilink/graph_core.hpp"
#include "unilink/negative_sampling.hpp"
#include "unilink/objectives.hpp"
#include "unilink/kernel_engine.hpp"
#include "unilink/evaluation.hpp"
#include "unilink/diagnostics.hpp"
#include "unilink/trainer.hpp"
#include "unilink/dataset.hpp"
#include "unilink/experiment.hpp"
