/* Copyright (c) 2026 The musegest authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

// Umbrella header for the music-driven prosody and gesture pipeline.

#include "musegest/corpus.hpp"
#include "musegest/emotion.hpp"
#include "musegest/error.hpp"
#include "musegest/features.hpp"
#include "musegest/fileio.hpp"
#include "musegest/gesture.hpp"
#include "musegest/json_io.hpp"
#include "musegest/midi.hpp"
#include "musegest/phrase.hpp"
#include "musegest/phrase_gen.hpp"
#include "musegest/rng.hpp"
#include "musegest/stats.hpp"
#include "musegest/study.hpp"
#include "musegest/timeline.hpp"
#include "musegest/voice.hpp"
