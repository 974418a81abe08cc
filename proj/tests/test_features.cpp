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

#include "musegest/features.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace musegest;
using Catch::Approx;

namespace {

Phrase scale_phrase(int tonic, Mode mode, int octave_base = 60) {
    static const int major_steps[] = {0, 2, 4, 5, 7, 9, 11, 12};
    static const int minor_steps[] = {0, 2, 3, 5, 7, 8, 10, 12};
    const int* steps = mode == Mode::Major ? major_steps : minor_steps;
    std::vector<NoteEvent> notes;
    for (int i = 0; i < 8; ++i) {
        notes.push_back({octave_base + tonic + steps[i], i * 400.0, 350.0, 90});
    }
    return Phrase(std::move(notes));
}

/// Brute-force key oracle: rotates the raw profiles over the duration
/// histogram and picks the best Pearson correlation, written independently
/// of estimate_key (profile rotated instead of histogram).
KeyEstimate oracle_key(const Phrase& p) {
    std::array<double, 12> hist{};
    for (const NoteEvent& n : p.notes) hist[n.pitch % 12] += n.duration_ms;

    auto corr = [](const std::array<double, 12>& x, const std::array<double, 12>& y) {
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        for (int i = 0; i < 12; ++i) {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            syy += y[i] * y[i];
            sxy += x[i] * y[i];
        }
        const double cov = sxy - sx * sy / 12.0;
        const double vx = sxx - sx * sx / 12.0;
        const double vy = syy - sy * sy / 12.0;
        if (vx <= 0.0 || vy <= 0.0) return 0.0;
        return cov / std::sqrt(vx * vy);
    };

    KeyEstimate best;
    double best_r = -2.0;
    for (int tonic = 0; tonic < 12; ++tonic) {
        for (Mode mode : {Mode::Major, Mode::Minor}) {
            const auto& profile = mode == Mode::Major ? kKkMajorProfile : kKkMinorProfile;
            std::array<double, 12> rotated{};
            for (int pc = 0; pc < 12; ++pc) rotated[(pc + tonic) % 12] = profile[pc];
            const double r = corr(hist, rotated);
            if (r > best_r + 1e-12) {
                best_r = r;
                best = {tonic, mode, r};
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("tempo from uniform inter-onset intervals", "[features]") {
    SECTION("500 ms IOIs give 120 bpm") {
        const Phrase p = testutil::make_phrase({{60, 0.0, 400.0, 90},
                                                {62, 500.0, 400.0, 90},
                                                {64, 1000.0, 400.0, 90},
                                                {65, 1500.0, 400.0, 90}});
        CHECK(estimate_tempo(p) == Approx(120.0));
    }
    SECTION("250 ms IOIs fold 240 bpm down to 120") {
        const Phrase p = testutil::make_phrase({{60, 0.0, 200.0, 90},
                                                {62, 250.0, 200.0, 90},
                                                {64, 500.0, 200.0, 90},
                                                {65, 750.0, 200.0, 90}});
        const TempoEstimate est = estimate_tempo_detail(p);
        CHECK(est.unfolded_bpm == Approx(240.0));
        CHECK(est.bpm == Approx(120.0));
    }
    SECTION("1500 ms IOIs fold 40 bpm upward into range") {
        const Phrase p = testutil::make_phrase({{60, 0.0, 400.0, 90},
                                                {62, 1500.0, 400.0, 90},
                                                {64, 3000.0, 400.0, 90}});
        CHECK(estimate_tempo(p) == Approx(40.0));
    }
}

TEST_CASE("tempo uses the modal histogram bin", "[features]") {
    // IOIs {500 x6, 250 x2}: the 500 ms bin wins
    std::vector<std::tuple<int, double, double, int>> notes;
    double onset = 0.0;
    const double iois[] = {500, 500, 500, 250, 500, 250, 500, 500};
    notes.push_back({60, onset, 200.0, 90});
    for (double ioi : iois) {
        onset += ioi;
        notes.push_back({60, onset, 200.0, 90});
    }
    CHECK(estimate_tempo(testutil::make_phrase(notes)) == Approx(120.0));
}

TEST_CASE("degenerate phrases fall back to 90 bpm", "[features]") {
    const TempoEstimate single = estimate_tempo_detail(testutil::make_phrase({{60, 0.0, 400.0, 90}}));
    CHECK(single.degenerate);
    CHECK(single.bpm == Approx(90.0));

    // simultaneous onsets leave no usable intervals
    const TempoEstimate chord = estimate_tempo_detail(
        testutil::make_phrase({{60, 0.0, 400.0, 90}, {64, 0.0, 400.0, 90}}));
    CHECK(chord.degenerate);
    CHECK(chord.bpm == Approx(90.0));
}

TEST_CASE("contour signs and normalized curve", "[features]") {
    SECTION("rising then falling") {
        const Contour c = extract_contour(testutil::make_phrase(
            {{60, 0.0, 200.0, 90}, {62, 300.0, 200.0, 90}, {64, 600.0, 200.0, 90},
             {62, 900.0, 200.0, 90}}));
        CHECK(c.signs == std::vector<int>{1, 1, -1});
    }
    SECTION("single repeated pitch is flat at 0.5") {
        const Contour c = extract_contour(testutil::make_phrase(
            {{60, 0.0, 200.0, 90}, {60, 300.0, 200.0, 90}, {60, 600.0, 200.0, 90}}));
        CHECK(c.signs == std::vector<int>{0, 0});
        for (double v : c.curve) CHECK(v == Approx(0.5));
    }
    SECTION("curve normalizes over the pitch range") {
        const Contour c = extract_contour(testutil::make_phrase(
            {{60, 0.0, 200.0, 90}, {67, 300.0, 200.0, 90}, {64, 600.0, 200.0, 90}}));
        REQUIRE(c.curve.size() == 3);
        CHECK(c.curve[0] == Approx(0.0));
        CHECK(c.curve[1] == Approx(1.0));
        CHECK(c.curve[2] == Approx(4.0 / 7.0));
    }
}

TEST_CASE("all 24 scales classify with the correct tonic and mode", "[features]") {
    for (int tonic = 0; tonic < 12; ++tonic) {
        for (Mode mode : {Mode::Major, Mode::Minor}) {
            const Phrase p = scale_phrase(tonic, mode);
            const KeyEstimate k = estimate_key(p);
            INFO("tonic " << tonic << " mode " << to_string(mode));
            CHECK(k.tonic == tonic);
            CHECK(k.mode == mode);

            const KeyEstimate o = oracle_key(p);
            CHECK(k.tonic == o.tonic);
            CHECK(k.mode == o.mode);
            CHECK(k.confidence == Approx(o.confidence).margin(1e-9));
        }
    }
    SECTION("C major confidence is high") {
        CHECK(estimate_key(scale_phrase(0, Mode::Major)).confidence > 0.8);
    }
}

TEST_CASE("key estimate covaries with transposition", "[features][property]") {
    SplitMix64 rng(606);
    int checked = 0;
    for (int i = 0; i < 200 && checked < 100; ++i) {
        // random diatonic-ish material keeps the argmax well separated
        const int tonic = static_cast<int>(rng.next_below(12));
        static const int major_steps[] = {0, 2, 4, 5, 7, 9, 11};
        std::vector<NoteEvent> notes;
        for (int n = 0; n < 10; ++n) {
            const int pitch = 48 + tonic + major_steps[rng.next_below(7)] +
                              12 * static_cast<int>(rng.next_below(2));
            notes.push_back({pitch, n * 300.0, 100.0 + rng.next_double() * 400.0,
                             40 + static_cast<int>(rng.next_below(80))});
        }
        const Phrase p{std::vector<NoteEvent>(notes)};
        const int shift = 1 + static_cast<int>(rng.next_below(11));
        bool fits = true;
        std::vector<NoteEvent> shifted_notes = notes;
        for (NoteEvent& n : shifted_notes) {
            n.pitch += shift;
            fits = fits && n.pitch <= 127;
        }
        if (!fits) continue;
        ++checked;

        const KeyEstimate base = estimate_key(p);
        const KeyEstimate moved = estimate_key(Phrase{std::move(shifted_notes)});
        CHECK(moved.tonic == (base.tonic + shift) % 12);
        CHECK(moved.mode == base.mode);
        CHECK(moved.confidence == Approx(base.confidence).margin(1e-12));
    }
    CHECK(checked == 100);
}

TEST_CASE("extract_features assembles the full vector", "[features]") {
    // fixed 5-note phrase; expectations computed by hand
    const Phrase p = testutil::make_phrase({{60, 0.0, 400.0, 80},
                                            {64, 500.0, 350.0, 90},
                                            {67, 1000.0, 300.0, 100},
                                            {64, 1500.0, 450.0, 70},
                                            {72, 2000.0, 500.0, 110}});
    const FeatureVector f = extract_features(p);

    CHECK(f.tempo_bpm == Approx(120.0));  // 500 ms IOIs
    CHECK(f.pitch_range_semitones == 12);
    CHECK(f.contour.signs == std::vector<int>{1, 1, -1, 1});
    CHECK(f.contour.curve[0] == Approx(0.0));
    CHECK(f.contour.curve[1] == Approx(4.0 / 12.0));
    CHECK(f.contour.curve[2] == Approx(7.0 / 12.0));
    CHECK(f.contour.curve[3] == Approx(4.0 / 12.0));
    CHECK(f.contour.curve[4] == Approx(1.0));
    // 5 notes over 2500 ms
    CHECK(f.rhythmic_density_notes_per_s == Approx(2.0));
    CHECK(f.notes_per_beat == Approx(2.0 * 60.0 / 120.0));
    // C-major-scale material
    CHECK(f.key.tonic == 0);
    CHECK(f.key.mode == Mode::Major);

    CHECK_THROWS_AS(extract_features(Phrase{}), EmptyPhrase);
}

TEST_CASE("density scales inversely with time stretching", "[features][property]") {
    // IOIs on a 40 ms grid keep each distinct interval in its own histogram
    // bin before and after scaling, so the modal-bin tempo scales exactly
    SplitMix64 rng(707);
    for (int i = 0; i < 50; ++i) {
        std::vector<NoteEvent> notes;
        double onset = 0.0;
        const int count = 4 + static_cast<int>(rng.next_below(8));
        for (int n = 0; n < count; ++n) {
            notes.push_back({48 + static_cast<int>(rng.next_below(36)), onset,
                             120.0, 30 + static_cast<int>(rng.next_below(90))});
            onset += 40.0 * (5 + static_cast<double>(rng.next_below(11)));  // 200..600 ms
        }
        const Phrase p{std::vector<NoteEvent>(notes)};
        const FeatureVector base = extract_features(p);

        const double s = 2.0;
        Phrase stretched = p;
        for (NoteEvent& n : stretched.notes) {
            n.onset_ms *= s;
            n.duration_ms *= s;
        }
        const FeatureVector scaled = extract_features(stretched);
        CHECK(scaled.rhythmic_density_notes_per_s ==
              Approx(base.rhythmic_density_notes_per_s / s));
        CHECK(scaled.pitch_range_semitones == base.pitch_range_semitones);
        CHECK(scaled.contour.signs == base.contour.signs);

        const TempoEstimate t0 = estimate_tempo_detail(p);
        const TempoEstimate t1 = estimate_tempo_detail(stretched);
        CHECK(t1.unfolded_bpm == Approx(t0.unfolded_bpm / s).margin(1e-9));
    }
}

TEST_CASE("8 notes over 2000 ms give density 4", "[features]") {
    std::vector<std::tuple<int, double, double, int>> notes;
    for (int i = 0; i < 8; ++i) notes.push_back({60 + i, i * 250.0, 250.0, 90});
    CHECK(extract_features(testutil::make_phrase(notes)).rhythmic_density_notes_per_s ==
          Approx(4.0));
}
