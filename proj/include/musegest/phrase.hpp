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

#include <algorithm>
#include <optional>
#include <vector>

#include "musegest/emotion.hpp"
#include "musegest/error.hpp"

namespace musegest {

/// Admissible phrase length window in milliseconds.
inline constexpr double kMinPhraseMs = 100.0;
inline constexpr double kMaxPhraseMs = 6000.0;

/// One note with absolute timing in milliseconds from phrase start.
struct NoteEvent {
    int pitch = 60;            // MIDI note number, 0..127
    double onset_ms = 0.0;     // >= 0
    double duration_ms = 0.0;  // > 0
    int velocity = 64;         // 1..127

    friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

inline bool note_event_valid(const NoteEvent& n) {
    return n.pitch >= 0 && n.pitch <= 127 && n.onset_ms >= 0.0 &&
           n.duration_ms > 0.0 && n.velocity >= 1 && n.velocity <= 127;
}

/// A short timed note sequence, the pipeline's central currency.
/// Notes are kept sorted by onset, ties broken by ascending pitch.
struct Phrase {
    std::vector<NoteEvent> notes;
    std::optional<Quadrant> quadrant;

    Phrase() = default;
    Phrase(std::vector<NoteEvent> n, std::optional<Quadrant> q = std::nullopt)
        : notes(std::move(n)), quadrant(q) {
        sort_notes();
    }

    void sort_notes() {
        std::stable_sort(notes.begin(), notes.end(),
                         [](const NoteEvent& a, const NoteEvent& b) {
                             if (a.onset_ms != b.onset_ms) return a.onset_ms < b.onset_ms;
                             return a.pitch < b.pitch;
                         });
    }

    bool empty() const { return notes.empty(); }
    std::size_t size() const { return notes.size(); }

    /// max(onset + duration) over all notes; 0 for an empty phrase.
    double total_duration_ms() const {
        double end = 0.0;
        for (const NoteEvent& n : notes) end = std::max(end, n.onset_ms + n.duration_ms);
        return end;
    }

    bool within_corpus_bounds() const {
        const double d = total_duration_ms();
        return d >= kMinPhraseMs && d <= kMaxPhraseMs;
    }

    friend bool operator==(const Phrase&, const Phrase&) = default;
};

struct EmptyPhrase : Error {
    EmptyPhrase() : Error("phrase has no notes") {}
};

}  // namespace musegest
