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

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "musegest/error.hpp"
#include "musegest/phrase.hpp"

namespace musegest {

// ---------------------------------------------------------------------------
// The five musical features driving gesture generation: tempo, pitch range,
// note contour, key and rhythmic density.
// ---------------------------------------------------------------------------

inline constexpr double kDefaultTempoBpm = 90.0;
inline constexpr double kTempoFoldMinBpm = 40.0;
inline constexpr double kTempoFoldMaxBpm = 200.0;
inline constexpr double kIoiBinWidthMs = 20.0;

struct TempoEstimate {
    double bpm = kDefaultTempoBpm;           // folded into [40, 200]
    double unfolded_bpm = kDefaultTempoBpm;  // straight 60000 / modal IOI
    bool degenerate = false;                 // too few usable inter-onset intervals
};

/// Tempo from the modal 20 ms bin of the inter-onset-interval histogram.
/// The modal bin's mean IOI is read as the beat (or an integer subdivision of
/// it) and folded into [40, 200] bpm by octave doubling/halving. Phrases with
/// fewer than two distinct onsets get the documented 90 bpm default.
inline TempoEstimate estimate_tempo_detail(const Phrase& p) {
    if (p.empty()) throw EmptyPhrase();

    std::vector<double> iois;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const double ioi = p.notes[i + 1].onset_ms - p.notes[i].onset_ms;
        if (ioi > 0.0) iois.push_back(ioi);
    }
    if (iois.empty()) return {kDefaultTempoBpm, kDefaultTempoBpm, true};

    // modal bin; ties go to the shorter interval
    std::map<long, std::pair<int, double>> bins;  // bin -> (count, ioi sum)
    for (double ioi : iois) {
        auto& [count, sum] = bins[static_cast<long>(ioi / kIoiBinWidthMs)];
        count += 1;
        sum += ioi;
    }
    long best_bin = bins.begin()->first;
    int best_count = 0;
    for (const auto& [bin, entry] : bins) {
        if (entry.first > best_count) {
            best_count = entry.first;
            best_bin = bin;
        }
    }
    const auto& [count, sum] = bins[best_bin];
    const double modal_ioi = sum / count;

    TempoEstimate est;
    est.degenerate = false;
    est.unfolded_bpm = 60000.0 / modal_ioi;
    est.bpm = est.unfolded_bpm;
    while (est.bpm > kTempoFoldMaxBpm) est.bpm /= 2.0;
    while (est.bpm < kTempoFoldMinBpm) est.bpm *= 2.0;
    return est;
}

inline double estimate_tempo(const Phrase& p) { return estimate_tempo_detail(p).bpm; }

/// Sign sequence of successive pitch differences plus the pitch curve
/// normalized to [0, 1] over the phrase's range (constant 0.5 when the range
/// is zero). The curve has one sample per note, held between onsets.
struct Contour {
    std::vector<int> signs;         // one of -1, 0, +1 per successive pair
    std::vector<double> curve;      // one sample per note
};

inline Contour extract_contour(const Phrase& p) {
    if (p.empty()) throw EmptyPhrase();
    Contour c;
    int min_pitch = 127, max_pitch = 0;
    for (const NoteEvent& n : p.notes) {
        min_pitch = std::min(min_pitch, n.pitch);
        max_pitch = std::max(max_pitch, n.pitch);
    }
    const int range = max_pitch - min_pitch;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i + 1 < p.size()) {
            const int d = p.notes[i + 1].pitch - p.notes[i].pitch;
            c.signs.push_back(d > 0 ? 1 : d < 0 ? -1 : 0);
        }
        c.curve.push_back(range == 0
                              ? 0.5
                              : static_cast<double>(p.notes[i].pitch - min_pitch) / range);
    }
    return c;
}

// Krumhansl-Kessler tonal hierarchy profiles.
inline constexpr std::array<double, 12> kKkMajorProfile = {
    6.35, 2.23, 3.48, 2.33, 4.38, 4.09, 2.52, 5.19, 2.39, 3.66, 2.29, 2.88};
inline constexpr std::array<double, 12> kKkMinorProfile = {
    6.33, 2.68, 3.52, 5.38, 2.60, 3.53, 2.54, 4.75, 3.98, 2.69, 3.34, 3.17};

enum class Mode { Major, Minor };

inline const char* to_string(Mode m) { return m == Mode::Major ? "major" : "minor"; }

struct KeyEstimate {
    int tonic = 0;  // pitch class 0..11
    Mode mode = Mode::Major;
    double confidence = 0.0;  // Pearson correlation of the winning profile
};

namespace detail {

inline double pearson(const std::array<double, 12>& x, const std::array<double, 12>& y) {
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < 12; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= 12.0;
    my /= 12.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < 12; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace detail

/// Key from the duration-weighted pitch-class histogram, correlated against
/// the 24 rotated Krumhansl-Kessler profiles. The histogram is rotated to
/// the candidate tonic (rather than rotating the profile) so transposition
/// covariance is exact; ties fall to the lower pitch class, major first.
inline KeyEstimate estimate_key(const Phrase& p) {
    if (p.empty()) throw EmptyPhrase();

    std::array<double, 12> hist{};
    for (const NoteEvent& n : p.notes) hist[static_cast<std::size_t>(n.pitch % 12)] += n.duration_ms;

    KeyEstimate best;
    bool first = true;
    for (int tonic = 0; tonic < 12; ++tonic) {
        std::array<double, 12> rotated{};
        for (int pc = 0; pc < 12; ++pc) rotated[pc] = hist[(pc + tonic) % 12];
        for (Mode mode : {Mode::Major, Mode::Minor}) {
            const double r = detail::pearson(
                rotated, mode == Mode::Major ? kKkMajorProfile : kKkMinorProfile);
            if (first || r > best.confidence) {
                best = {tonic, mode, r};
                first = false;
            }
        }
    }
    return best;
}

struct FeatureVector {
    double tempo_bpm = kDefaultTempoBpm;
    bool tempo_degenerate = false;
    int pitch_range_semitones = 0;
    Contour contour;
    KeyEstimate key;
    double rhythmic_density_notes_per_s = 0.0;
    double notes_per_beat = 0.0;  // density * 60 / tempo, derived
};

/// Assembles the full feature vector for a non-empty phrase.
inline FeatureVector extract_features(const Phrase& p) {
    if (p.empty()) throw EmptyPhrase();
    FeatureVector f;
    const TempoEstimate tempo = estimate_tempo_detail(p);
    f.tempo_bpm = tempo.bpm;
    f.tempo_degenerate = tempo.degenerate;

    int min_pitch = 127, max_pitch = 0;
    for (const NoteEvent& n : p.notes) {
        min_pitch = std::min(min_pitch, n.pitch);
        max_pitch = std::max(max_pitch, n.pitch);
    }
    f.pitch_range_semitones = max_pitch - min_pitch;
    f.contour = extract_contour(p);
    f.key = estimate_key(p);
    f.rhythmic_density_notes_per_s =
        static_cast<double>(p.size()) / (p.total_duration_ms() / 1000.0);
    f.notes_per_beat = f.rhythmic_density_notes_per_s * 60.0 / f.tempo_bpm;
    return f;
}

inline nlohmann::json to_json(const FeatureVector& f) {
    std::string signs;
    for (int s : f.contour.signs) signs.push_back(s > 0 ? '+' : s < 0 ? '-' : '0');
    return {{"tempo_bpm", f.tempo_bpm},
            {"tempo_degenerate", f.tempo_degenerate},
            {"pitch_range_semitones", f.pitch_range_semitones},
            {"contour_signs", signs},
            {"contour_curve", f.contour.curve},
            {"key", {{"tonic_pitch_class", f.key.tonic},
                     {"mode", to_string(f.key.mode)},
                     {"confidence", f.key.confidence}}},
            {"rhythmic_density_notes_per_s", f.rhythmic_density_notes_per_s},
            {"notes_per_beat", f.notes_per_beat}};
}

}  // namespace musegest
