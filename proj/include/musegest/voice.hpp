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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "musegest/error.hpp"
#include "musegest/fileio.hpp"
#include "musegest/phrase.hpp"
#include "musegest/rng.hpp"

namespace musegest {

// ---------------------------------------------------------------------------
// Voice rendering: each note of a phrase is scheduled against one sample of
// an indexed bank (28 phonemes x 4 timbres), with the time-stretch ratio and
// pitch shift computed to match the note exactly. A simple band-limited
// oscillator stands in for the recorded samples so plans can be auditioned.
// ---------------------------------------------------------------------------

struct EmptyBank : Error { using Error::Error; };

inline constexpr int kPhonemeCount = 28;
inline constexpr int kTimbreCount = 4;
inline constexpr int kMaxBankSlots = kPhonemeCount * kTimbreCount;  // 112

struct SampleSpec {
    int id = 0;  // phoneme_index * 4 + timbre_index, 0..111
    int base_pitch = 60;
    double base_duration_ms = 250.0;

    int phoneme_index() const { return id / kTimbreCount; }
    int timbre_index() const { return id % kTimbreCount; }
};

class SampleBank {
public:
    SampleBank() = default;
    SampleBank(std::vector<SampleSpec> samples, std::string metadata = {})
        : samples_(std::move(samples)), metadata_(std::move(metadata)) {
        std::sort(samples_.begin(), samples_.end(),
                  [](const SampleSpec& a, const SampleSpec& b) { return a.id < b.id; });
        validate();
    }

    const std::vector<SampleSpec>& samples() const { return samples_; }
    const std::string& metadata() const { return metadata_; }
    bool empty() const { return samples_.empty(); }
    std::size_t size() const { return samples_.size(); }

    const SampleSpec& by_id(int id) const {
        for (const SampleSpec& s : samples_)
            if (s.id == id) return s;
        throw Error("sample id not in bank: " + std::to_string(id));
    }

    static SampleBank from_json(const nlohmann::json& j) {
        std::vector<SampleSpec> samples;
        for (const auto& sj : j.at("samples")) {
            samples.push_back({sj.at("id").get<int>(), sj.at("base_pitch").get<int>(),
                               sj.at("base_duration_ms").get<double>()});
        }
        return SampleBank(std::move(samples), j.value("metadata", ""));
    }

    nlohmann::json to_json() const {
        nlohmann::json samples = nlohmann::json::array();
        for (const SampleSpec& s : samples_) {
            samples.push_back({{"id", s.id},
                               {"base_pitch", s.base_pitch},
                               {"base_duration_ms", s.base_duration_ms}});
        }
        return {{"metadata", metadata_}, {"samples", std::move(samples)}};
    }

    static SampleBank load(const std::string& path) {
        return from_json(nlohmann::json::parse(read_text_file(path)));
    }

private:
    void validate() const {
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            const SampleSpec& s = samples_[i];
            if (s.id < 0 || s.id >= kMaxBankSlots)
                throw Error("sample id out of range: " + std::to_string(s.id));
            if (s.base_pitch < 0 || s.base_pitch > 127)
                throw Error("sample base pitch out of range");
            if (!(s.base_duration_ms > 0.0)) throw Error("sample base duration must be positive");
            if (i > 0 && samples_[i - 1].id == s.id)
                throw Error("duplicate sample id: " + std::to_string(s.id));
        }
    }

    std::vector<SampleSpec> samples_;
    std::string metadata_;
};

struct SampleEvent {
    int sample_id = 0;
    double start_ms = 0.0;
    double duration_ms = 0.0;
    double stretch_ratio = 1.0;    // duration / base_duration
    double shift_semitones = 0.0;  // note pitch - base pitch
    double gain = 1.0;             // velocity / 127

    friend bool operator==(const SampleEvent&, const SampleEvent&) = default;
};

struct RenderPlan {
    std::vector<SampleEvent> events;  // sorted by start_ms (note order)
    double phrase_duration_ms = 0.0;

    friend bool operator==(const RenderPlan&, const RenderPlan&) = default;
};

/// Schedules one bank sample per note: selection is a seeded uniform draw,
/// the stretch ratio and pitch shift are exact so base * transform == note.
inline RenderPlan build_render_plan(const Phrase& phrase, const SampleBank& bank,
                                    std::uint64_t seed) {
    if (bank.empty()) throw EmptyBank("sample bank has no samples");
    if (phrase.empty()) throw EmptyPhrase();

    SplitMix64 rng(seed);
    RenderPlan plan;
    plan.phrase_duration_ms = phrase.total_duration_ms();
    for (const NoteEvent& n : phrase.notes) {
        const SampleSpec& s = bank.samples()[rng.next_below(bank.size())];
        plan.events.push_back({s.id, n.onset_ms, n.duration_ms,
                               n.duration_ms / s.base_duration_ms,
                               static_cast<double>(n.pitch - s.base_pitch),
                               n.velocity / 127.0});
    }
    return plan;
}

namespace detail {

/// Band-limited waveform value at phase (radians), one family per timbre:
/// 0 sine, 1 triangle, 2 square, 3 sawtooth. Partials stop below Nyquist.
inline double oscillator(int timbre, double phase, double freq_hz, double sample_rate_hz) {
    const int max_harmonic = std::max(1, static_cast<int>(sample_rate_hz / 2.0 / freq_hz));
    switch (timbre) {
        case 1: {  // triangle: odd partials, 1/k^2, alternating sign
            double v = 0.0;
            double sign = 1.0;
            for (int k = 1; k <= max_harmonic; k += 2) {
                v += sign * std::sin(k * phase) / (k * k);
                sign = -sign;
            }
            return v * 8.0 / (std::numbers::pi * std::numbers::pi);
        }
        case 2: {  // square: odd partials, 1/k
            double v = 0.0;
            for (int k = 1; k <= max_harmonic; k += 2) v += std::sin(k * phase) / k;
            return v * 4.0 / std::numbers::pi;
        }
        case 3: {  // sawtooth: all partials, 1/k, alternating sign
            double v = 0.0;
            for (int k = 1; k <= max_harmonic; ++k)
                v += (k % 2 == 1 ? 1.0 : -1.0) * std::sin(k * phase) / k;
            return v * 2.0 / std::numbers::pi;
        }
        default:
            return std::sin(phase);
    }
}

}  // namespace detail

inline constexpr double kPeakNormTarget = 0.8912509381337456;  // -1 dBFS

/// Renders a plan to a mono float buffer: oscillator family from the timbre
/// index, frequency 440 * 2^((base_pitch + shift - 69) / 12), amplitude from
/// gain, 10 ms linear fades. The mix is peak-normalized to -1 dBFS only when
/// it would otherwise clip. Buffer length is ceil(duration * rate).
inline std::vector<double> preview_synth(const RenderPlan& plan, const SampleBank& bank,
                                         int sample_rate_hz) {
    if (sample_rate_hz != 22050 && sample_rate_hz != 44100 && sample_rate_hz != 48000)
        throw Error("sample rate must be 22050, 44100 or 48000");

    const auto length = static_cast<std::size_t>(
        std::ceil(plan.phrase_duration_ms / 1000.0 * sample_rate_hz));
    std::vector<double> buffer(length, 0.0);
    const double sr = sample_rate_hz;

    for (const SampleEvent& ev : plan.events) {
        const SampleSpec& sample = bank.by_id(ev.sample_id);
        const double pitch_effective = sample.base_pitch + ev.shift_semitones;
        const double freq = 440.0 * std::pow(2.0, (pitch_effective - 69.0) / 12.0);
        const double dur_s = ev.duration_ms / 1000.0;
        const auto first = static_cast<std::size_t>(std::ceil(ev.start_ms / 1000.0 * sr));
        const auto last = std::min(
            length, static_cast<std::size_t>(std::ceil((ev.start_ms + ev.duration_ms) / 1000.0 * sr)));
        for (std::size_t i = first; i < last; ++i) {
            const double t = i / sr - ev.start_ms / 1000.0;
            const double fade = std::clamp(std::min(t / 0.010, (dur_s - t) / 0.010), 0.0, 1.0);
            buffer[i] += ev.gain * fade *
                         detail::oscillator(ev.sample_id % kTimbreCount,
                                            2.0 * std::numbers::pi * freq * t, freq, sr);
        }
    }

    double peak = 0.0;
    for (double v : buffer) peak = std::max(peak, std::abs(v));
    if (peak > 1.0) {
        const double scale = kPeakNormTarget / peak;
        for (double& v : buffer) v *= scale;
    }
    return buffer;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const RenderPlan& plan) {
    nlohmann::json events = nlohmann::json::array();
    for (const SampleEvent& ev : plan.events) {
        events.push_back({{"sample_id", ev.sample_id},
                          {"start_ms", ev.start_ms},
                          {"duration_ms", ev.duration_ms},
                          {"stretch_ratio", ev.stretch_ratio},
                          {"shift_semitones", ev.shift_semitones},
                          {"gain", ev.gain}});
    }
    return {{"phrase_duration_ms", plan.phrase_duration_ms}, {"events", std::move(events)}};
}

inline RenderPlan render_plan_from_json(const nlohmann::json& j) {
    RenderPlan plan;
    plan.phrase_duration_ms = j.at("phrase_duration_ms").get<double>();
    for (const auto& ej : j.at("events")) {
        plan.events.push_back({ej.at("sample_id").get<int>(), ej.at("start_ms").get<double>(),
                               ej.at("duration_ms").get<double>(),
                               ej.at("stretch_ratio").get<double>(),
                               ej.at("shift_semitones").get<double>(),
                               ej.at("gain").get<double>()});
    }
    return plan;
}

/// 16-bit little-endian mono PCM WAV container.
inline std::vector<std::uint8_t> wav_pcm16_mono(const std::vector<double>& samples,
                                                int sample_rate_hz) {
    const std::uint32_t data_size = static_cast<std::uint32_t>(samples.size() * 2);
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);

    auto u16 = [&](std::uint16_t v) {
        out.push_back(v & 0xFF);
        out.push_back(v >> 8 & 0xFF);
    };
    auto u32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(v >> (8 * i) & 0xFF);
    };

    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    u32(36 + data_size);
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    u32(16);
    u16(1);  // PCM
    u16(1);  // mono
    u32(static_cast<std::uint32_t>(sample_rate_hz));
    u32(static_cast<std::uint32_t>(sample_rate_hz * 2));  // byte rate
    u16(2);   // block align
    u16(16);  // bits per sample
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    u32(data_size);
    for (double v : samples) {
        const auto q = static_cast<std::int16_t>(
            std::lrint(std::clamp(v, -1.0, 1.0) * 32767.0));
        u16(static_cast<std::uint16_t>(q));
    }
    return out;
}

}  // namespace musegest
