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

#include <tuple>
#include <vector>

#include "musegest/gesture.hpp"
#include "musegest/phrase.hpp"
#include "musegest/rng.hpp"

namespace testutil {

inline musegest::Phrase make_phrase(
    const std::vector<std::tuple<int, double, double, int>>& notes,
    std::optional<musegest::Quadrant> q = std::nullopt) {
    std::vector<musegest::NoteEvent> events;
    for (const auto& [pitch, onset, dur, vel] : notes) events.push_back({pitch, onset, dur, vel});
    return musegest::Phrase(std::move(events), q);
}

/// Uniform random phrase whose first onset is 0; roughly monophonic.
inline musegest::Phrase random_phrase(musegest::SplitMix64& rng, int max_notes = 12) {
    const int count = 1 + static_cast<int>(rng.next_below(max_notes));
    std::vector<musegest::NoteEvent> notes;
    double cursor = 0.0;
    for (int i = 0; i < count; ++i) {
        const int pitch = 36 + static_cast<int>(rng.next_below(60));
        const double dur = 80.0 + rng.next_double() * 600.0;
        const int vel = 1 + static_cast<int>(rng.next_below(127));
        notes.push_back({pitch, cursor, dur, vel});
        cursor += dur + rng.next_double() * 250.0;
    }
    return musegest::Phrase(std::move(notes));
}

/// Four-DoF robot in the default configuration used by the tests.
inline musegest::RobotModel test_robot() {
    musegest::RobotModel m;
    m.name = "shimi";
    m.dofs = {
        {"foot", -0.30, 0.30, 18.0, 5200.0, std::nullopt, musegest::DofRole::Beat, 0.0},
        {"torso", -0.40, 0.40, 24.0, 2600.0, std::nullopt, musegest::DofRole::Contour, 0.0},
        {"neck", -0.35, 0.35, 21.0, 2600.0, std::nullopt, musegest::DofRole::Onset, 0.0},
        {"head_pan", -0.50, 0.50, 30.0, 2600.0, std::optional<std::string>("torso"),
         musegest::DofRole::Gaze, 0.0},
    };
    return m;
}

}  // namespace testutil
