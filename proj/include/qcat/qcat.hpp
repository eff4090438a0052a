// Copyright 2026 The qcat Authors
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


// Umbrella header.

#ifndef QCAT_QCAT_HPP
#define QCAT_QCAT_HPP

#include "qcat/checkpoint.hpp"
#include "qcat/classical.hpp"
#include "qcat/config.hpp"
#include "qcat/entropy.hpp"
#include "qcat/evolution.hpp"
#include "qcat/experiments.hpp"
#include "qcat/fft.hpp"
#include "qcat/histories.hpp"
#include "qcat/parallel.hpp"
#include "qcat/spectral.hpp"
#include "qcat/torus.hpp"

#endif
