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

#include <string>

#include <nlohmann/json.hpp>

#include "musegest/fileio.hpp"
#include "musegest/midi.hpp"
#include "musegest/phrase.hpp"

namespace musegest {

inline nlohmann::json phrase_to_json(const Phrase& p) {
    nlohmann::json notes = nlohmann::json::array();
    for (const NoteEvent& n : p.notes) {
        notes.push_back({{"pitch", n.pitch},
                         {"onset_ms", n.onset_ms},
                         {"duration_ms", n.duration_ms},
                         {"velocity", n.velocity}});
    }
    return {{"quadrant", p.quadrant ? nlohmann::json(std::string(to_string(*p.quadrant)))
                                    : nlohmann::json(nullptr)},
            {"total_duration_ms", p.total_duration_ms()},
            {"notes", std::move(notes)}};
}

inline Phrase phrase_from_json(const nlohmann::json& j) {
    std::vector<NoteEvent> notes;
    for (const auto& nj : j.at("notes")) {
        NoteEvent n{nj.at("pitch").get<int>(), nj.at("onset_ms").get<double>(),
                    nj.at("duration_ms").get<double>(), nj.at("velocity").get<int>()};
        if (!note_event_valid(n)) throw Error("invalid note event in phrase file");
        notes.push_back(n);
    }
    std::optional<Quadrant> q;
    if (j.contains("quadrant") && !j.at("quadrant").is_null())
        q = quadrant_from_string(j.at("quadrant").get<std::string>());
    return Phrase(std::move(notes), q);
}

inline bool has_midi_extension(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return false;
    const std::string ext = path.substr(dot);
    return ext == ".mid" || ext == ".midi" || ext == ".MID";
}

/// Reads a phrase from either an SMF (.mid/.midi) or a phrase JSON file.
inline Phrase load_phrase(const std::string& path) {
    if (has_midi_extension(path)) {
        return to_phrase(parse_smf(read_file_bytes(path)));
    }
    return phrase_from_json(nlohmann::json::parse(read_text_file(path)));
}

/// Writes a phrase as SMF or JSON depending on the target extension.
inline void save_phrase(const Phrase& p, const std::string& path, int ticks_per_quarter = 480,
                        double tempo_bpm = 120.0) {
    if (has_midi_extension(path)) {
        write_file_bytes(path, write_smf(p, ticks_per_quarter, tempo_bpm));
    } else {
        write_text_file(path, phrase_to_json(p).dump(2) + "\n");
    }
}

}  // namespace musegest
