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
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "musegest/error.hpp"
#include "musegest/phrase.hpp"

namespace musegest {

// ---------------------------------------------------------------------------
// Standard MIDI File container, formats 0 and 1, ticks-per-quarter division.
//
// Parsing keeps every event verbatim (with running status resolved into the
// stored status byte), so parse -> encode -> parse is a field-for-field
// identity on the document. End-of-track metas are structural framing and are
// stripped on read and re-appended on write.
// ---------------------------------------------------------------------------

using Bytes = std::vector<std::uint8_t>;

struct MalformedHeader : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };
struct TruncatedTrack : Error { using Error::Error; };
struct DanglingNoteOn : Error { using Error::Error; };
struct EmptyDocument : Error { using Error::Error; };

/// One timed event as stored in a track chunk. `status` is the effective
/// status byte (0xFF for meta, 0xF0/0xF7 for sysex). For meta events the
/// first data byte is the meta type; the declared length is re-derived on
/// write and not stored.
struct RawEvent {
    std::uint32_t delta_ticks = 0;
    std::uint8_t status = 0;
    std::vector<std::uint8_t> data;

    friend bool operator==(const RawEvent&, const RawEvent&) = default;
};

struct MidiTrack {
    std::vector<RawEvent> events;

    friend bool operator==(const MidiTrack&, const MidiTrack&) = default;
};

struct TempoEntry {
    std::int64_t tick = 0;
    std::uint32_t microseconds_per_quarter = 500000;

    friend bool operator==(const TempoEntry&, const TempoEntry&) = default;
};

struct MidiDocument {
    int format = 0;  // 0 or 1
    int ticks_per_quarter = 480;
    std::vector<MidiTrack> tracks;
    /// Sorted by tick, first entry always at tick 0 (default 500000 us/quarter
    /// inserted when the file declares none). Derived from the 0x51 meta
    /// events present in `tracks`.
    std::vector<TempoEntry> tempo_map;

    friend bool operator==(const MidiDocument&, const MidiDocument&) = default;
};

namespace detail {

class ByteReader {
public:
    ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return size_ - pos_; }
    void seek(std::size_t p) { pos_ = p; }

    std::uint8_t u8() {
        require(1);
        return data_[pos_++];
    }
    std::uint8_t peek() const {
        if (pos_ >= size_) throw TruncatedTrack("unexpected end of data");
        return data_[pos_];
    }
    std::uint16_t u16() {
        require(2);
        std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        require(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | data_[pos_ + i];
        pos_ += 4;
        return v;
    }
    std::vector<std::uint8_t> bytes(std::size_t n) {
        require(n);
        std::vector<std::uint8_t> out(data_ + pos_, data_ + pos_ + n);
        pos_ += n;
        return out;
    }
    /// Variable-length quantity, at most 4 bytes.
    std::uint32_t vlq() {
        std::uint32_t value = 0;
        for (int i = 0; i < 4; ++i) {
            std::uint8_t b = u8();
            value = value << 7 | (b & 0x7F);
            if ((b & 0x80) == 0) return value;
        }
        throw TruncatedTrack("variable-length quantity longer than 4 bytes");
    }

private:
    void require(std::size_t n) const {
        if (pos_ + n > size_) throw TruncatedTrack("unexpected end of data");
    }
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

inline void put_u16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

inline void put_u32(Bytes& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8)
        out.push_back(static_cast<std::uint8_t>(v >> shift & 0xFF));
}

inline void put_vlq(Bytes& out, std::uint32_t value) {
    if (value > 0x0FFFFFFF) throw Error("delta time exceeds VLQ range");
    std::uint8_t stack[4];
    int n = 0;
    do {
        stack[n++] = static_cast<std::uint8_t>(value & 0x7F);
        value >>= 7;
    } while (value != 0);
    while (n-- > 1) out.push_back(stack[n] | 0x80);
    out.push_back(stack[0]);
}

inline std::size_t channel_event_data_size(std::uint8_t status) {
    switch (status & 0xF0) {
        case 0xC0:
        case 0xD0: return 1;
        default: return 2;
    }
}

}  // namespace detail

/// Parses a Standard MIDI File. Supports formats 0 and 1 with
/// ticks-per-quarter division; format 2 and SMPTE division are rejected.
/// Running status is resolved; alien chunk types are skipped.
inline MidiDocument parse_smf(const Bytes& bytes) {
    detail::ByteReader r(bytes.data(), bytes.size());

    if (r.remaining() < 14) throw MalformedHeader("file shorter than SMF header");
    if (!(r.u8() == 'M' && r.u8() == 'T' && r.u8() == 'h' && r.u8() == 'd'))
        throw MalformedHeader("missing MThd chunk tag");
    const std::uint32_t header_len = r.u32();
    if (header_len < 6) throw MalformedHeader("MThd length below 6");
    const std::uint16_t format = r.u16();
    const std::uint16_t declared_tracks = r.u16();
    const std::uint16_t division = r.u16();
    if (format == 2) throw UnsupportedFormat("SMF format 2 not supported");
    if (format > 2) throw MalformedHeader("unknown SMF format");
    if (division & 0x8000) throw UnsupportedFormat("SMPTE division not supported");
    if (division == 0) throw MalformedHeader("ticks-per-quarter must be positive");
    if (header_len > 6) r.seek(r.pos() + (header_len - 6));

    MidiDocument doc;
    doc.format = format;
    doc.ticks_per_quarter = division;

    std::vector<std::pair<std::int64_t, std::uint32_t>> tempo_events;

    while (doc.tracks.size() < declared_tracks) {
        if (r.remaining() < 8) throw TruncatedTrack("expected another MTrk chunk");
        const std::uint8_t c0 = r.u8(), c1 = r.u8(), c2 = r.u8(), c3 = r.u8();
        const std::uint32_t chunk_len = r.u32();
        if (chunk_len > r.remaining()) throw TruncatedTrack("chunk length exceeds file size");
        const std::size_t chunk_end = r.pos() + chunk_len;
        if (!(c0 == 'M' && c1 == 'T' && c2 == 'r' && c3 == 'k')) {
            r.seek(chunk_end);  // alien chunk, skip
            continue;
        }

        MidiTrack track;
        std::int64_t abs_tick = 0;
        std::uint8_t running_status = 0;
        // open note-ons per (channel, pitch), for the dangling-note check
        std::map<int, int> open_notes;
        bool saw_end_of_track = false;

        while (r.pos() < chunk_end) {
            RawEvent ev;
            ev.delta_ticks = r.vlq();
            abs_tick += ev.delta_ticks;

            std::uint8_t b = r.peek();
            if (b & 0x80) {
                ev.status = r.u8();
            } else if (running_status != 0) {
                ev.status = running_status;
            } else {
                throw TruncatedTrack("data byte with no running status");
            }

            if (ev.status == 0xFF) {
                running_status = 0;
                const std::uint8_t type = r.u8();
                const std::uint32_t len = r.vlq();
                std::vector<std::uint8_t> payload = r.bytes(len);
                if (type == 0x2F) {
                    saw_end_of_track = true;
                    break;
                }
                if (type == 0x51 && payload.size() == 3) {
                    const std::uint32_t uspq =
                        static_cast<std::uint32_t>(payload[0]) << 16 |
                        static_cast<std::uint32_t>(payload[1]) << 8 | payload[2];
                    if (uspq > 0) tempo_events.emplace_back(abs_tick, uspq);
                }
                ev.data.push_back(type);
                ev.data.insert(ev.data.end(), payload.begin(), payload.end());
            } else if (ev.status == 0xF0 || ev.status == 0xF7) {
                running_status = 0;
                const std::uint32_t len = r.vlq();
                ev.data = r.bytes(len);
            } else if (ev.status >= 0x80 && ev.status <= 0xEF) {
                running_status = ev.status;
                ev.data = r.bytes(detail::channel_event_data_size(ev.status));
                const int hi = ev.status & 0xF0;
                if (hi == 0x90 || hi == 0x80) {
                    const int key = (ev.status & 0x0F) << 8 | (ev.data[0] & 0x7F);
                    if (hi == 0x90 && ev.data[1] > 0) {
                        open_notes[key] = 1;  // a re-strike keeps exactly one open
                    } else {
                        open_notes.erase(key);
                    }
                }
            } else {
                throw TruncatedTrack("unexpected status byte in track");
            }
            track.events.push_back(std::move(ev));
        }

        if (!saw_end_of_track) throw TruncatedTrack("track missing end-of-track meta");
        if (!open_notes.empty()) throw DanglingNoteOn("note-on without matching note-off");
        r.seek(chunk_end);
        doc.tracks.push_back(std::move(track));
    }

    // Assemble the tempo map: sorted by tick, later events win on ties,
    // default 120 bpm at tick 0 when the file declares nothing there.
    std::stable_sort(tempo_events.begin(), tempo_events.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [tick, uspq] : tempo_events) {
        if (!doc.tempo_map.empty() && doc.tempo_map.back().tick == tick) {
            doc.tempo_map.back().microseconds_per_quarter = uspq;
        } else {
            doc.tempo_map.push_back({tick, uspq});
        }
    }
    if (doc.tempo_map.empty() || doc.tempo_map.front().tick != 0) {
        doc.tempo_map.insert(doc.tempo_map.begin(), {0, 500000});
    }
    return doc;
}

/// Serializes a document back to SMF bytes. Status bytes are always written
/// explicitly and each track is closed with an end-of-track meta.
inline Bytes encode_smf(const MidiDocument& doc) {
    if (doc.format != 0 && doc.format != 1) throw UnsupportedFormat("format must be 0 or 1");
    if (doc.ticks_per_quarter <= 0 || doc.ticks_per_quarter > 0x7FFF)
        throw MalformedHeader("ticks-per-quarter out of range");

    Bytes out;
    out.insert(out.end(), {'M', 'T', 'h', 'd'});
    detail::put_u32(out, 6);
    detail::put_u16(out, static_cast<std::uint16_t>(doc.format));
    detail::put_u16(out, static_cast<std::uint16_t>(doc.tracks.size()));
    detail::put_u16(out, static_cast<std::uint16_t>(doc.ticks_per_quarter));

    for (const MidiTrack& track : doc.tracks) {
        Bytes body;
        for (const RawEvent& ev : track.events) {
            detail::put_vlq(body, ev.delta_ticks);
            body.push_back(ev.status);
            if (ev.status == 0xFF) {
                if (ev.data.empty()) throw Error("meta event without type byte");
                body.push_back(ev.data[0]);
                detail::put_vlq(body, static_cast<std::uint32_t>(ev.data.size() - 1));
                body.insert(body.end(), ev.data.begin() + 1, ev.data.end());
            } else if (ev.status == 0xF0 || ev.status == 0xF7) {
                detail::put_vlq(body, static_cast<std::uint32_t>(ev.data.size()));
                body.insert(body.end(), ev.data.begin(), ev.data.end());
            } else {
                body.insert(body.end(), ev.data.begin(), ev.data.end());
            }
        }
        detail::put_vlq(body, 0);
        body.insert(body.end(), {0xFF, 0x2F, 0x00});

        out.insert(out.end(), {'M', 'T', 'r', 'k'});
        detail::put_u32(out, static_cast<std::uint32_t>(body.size()));
        out.insert(out.end(), body.begin(), body.end());
    }
    return out;
}

/// Piecewise-linear tick-to-millisecond conversion over a tempo map.
class TickTimeline {
public:
    TickTimeline(const std::vector<TempoEntry>& tempo_map, int ticks_per_quarter)
        : tempo_map_(tempo_map), tpq_(ticks_per_quarter) {
        cumulative_ms_.resize(tempo_map_.size(), 0.0);
        for (std::size_t i = 1; i < tempo_map_.size(); ++i) {
            cumulative_ms_[i] =
                cumulative_ms_[i - 1] + span_ms(tempo_map_[i].tick - tempo_map_[i - 1].tick,
                                                tempo_map_[i - 1].microseconds_per_quarter);
        }
    }

    double ms_at(std::int64_t tick) const {
        std::size_t i = tempo_map_.size() - 1;
        while (i > 0 && tempo_map_[i].tick > tick) --i;
        return cumulative_ms_[i] +
               span_ms(tick - tempo_map_[i].tick, tempo_map_[i].microseconds_per_quarter);
    }

private:
    // numerator multiplied out first so integer-exact cases stay exact
    double span_ms(std::int64_t ticks, std::uint32_t uspq) const {
        return static_cast<double>(ticks) * static_cast<double>(uspq) /
               (1000.0 * static_cast<double>(tpq_));
    }
    std::vector<TempoEntry> tempo_map_;
    int tpq_;
    std::vector<double> cumulative_ms_;
};

/// Flattens a document into a Phrase: notes from all tracks merged, tick
/// positions integrated through the tempo map, first onset normalized to 0.
/// A second note-on on an already-sounding pitch closes the first note at the
/// new onset; notes that end up with zero length are discarded. Channel
/// information does not survive the conversion.
inline Phrase to_phrase(const MidiDocument& doc) {
    const TickTimeline timeline(doc.tempo_map, doc.ticks_per_quarter);

    struct OpenNote {
        std::int64_t tick;
        int velocity;
    };
    std::vector<NoteEvent> notes;

    for (const MidiTrack& track : doc.tracks) {
        std::int64_t abs_tick = 0;
        std::map<int, OpenNote> open;  // (channel<<8 | pitch) -> onset
        auto close_note = [&](int key, std::int64_t end_tick) {
            auto it = open.find(key);
            if (it == open.end()) return;
            const std::int64_t start = it->second.tick;
            if (end_tick > start) {
                const double onset = timeline.ms_at(start);
                const double dur = timeline.ms_at(end_tick) - onset;
                if (dur > 0.0) {
                    notes.push_back({key & 0xFF, onset, dur, it->second.velocity});
                }
            }
            open.erase(it);
        };

        for (const RawEvent& ev : track.events) {
            abs_tick += ev.delta_ticks;
            const int hi = ev.status & 0xF0;
            if (hi != 0x90 && hi != 0x80) continue;
            const int key = (ev.status & 0x0F) << 8 | (ev.data[0] & 0x7F);
            if (hi == 0x90 && ev.data[1] > 0) {
                close_note(key, abs_tick);  // last-on wins
                open[key] = {abs_tick, ev.data[1] & 0x7F};
            } else {
                close_note(key, abs_tick);
            }
        }
    }

    if (notes.empty()) throw EmptyDocument("document contains no notes");

    double min_onset = notes.front().onset_ms;
    for (const NoteEvent& n : notes) min_onset = std::min(min_onset, n.onset_ms);
    for (NoteEvent& n : notes) n.onset_ms -= min_onset;

    return Phrase(std::move(notes));
}

/// Builds a format-0 document for a phrase at a fixed tempo. Note boundaries
/// are rounded to the nearest tick; zero-length results are widened to one
/// tick. At equal ticks note-offs precede note-ons so back-to-back repeats of
/// a pitch survive a round trip.
inline MidiDocument document_from_phrase(const Phrase& phrase, int ticks_per_quarter,
                                         double tempo_bpm) {
    if (phrase.empty()) throw EmptyPhrase();
    if (ticks_per_quarter <= 0 || ticks_per_quarter > 0x7FFF)
        throw Error("ticks-per-quarter out of range");
    if (!(tempo_bpm > 0.0)) throw Error("tempo must be positive");

    const auto uspq = static_cast<std::uint32_t>(std::llround(60e6 / tempo_bpm));
    const double ms_per_tick =
        static_cast<double>(uspq) / (1000.0 * static_cast<double>(ticks_per_quarter));

    struct TimedEvent {
        std::int64_t tick;
        int order;  // offs before ons at the same tick
        RawEvent raw;
    };
    std::vector<TimedEvent> events;
    for (const NoteEvent& n : phrase.notes) {
        std::int64_t on = std::llround(n.onset_ms / ms_per_tick);
        std::int64_t off = std::llround((n.onset_ms + n.duration_ms) / ms_per_tick);
        if (off <= on) off = on + 1;
        const auto pitch = static_cast<std::uint8_t>(n.pitch & 0x7F);
        const auto vel = static_cast<std::uint8_t>(std::clamp(n.velocity, 1, 127));
        events.push_back({on, 1, {0, 0x90, {pitch, vel}}});
        events.push_back({off, 0, {0, 0x80, {pitch, 0}}});
    }
    std::stable_sort(events.begin(), events.end(), [](const TimedEvent& a, const TimedEvent& b) {
        if (a.tick != b.tick) return a.tick < b.tick;
        return a.order < b.order;
    });

    MidiTrack track;
    track.events.push_back(
        {0, 0xFF, {0x51, static_cast<std::uint8_t>(uspq >> 16 & 0xFF),
                   static_cast<std::uint8_t>(uspq >> 8 & 0xFF),
                   static_cast<std::uint8_t>(uspq & 0xFF)}});
    std::int64_t prev_tick = 0;
    for (TimedEvent& ev : events) {
        ev.raw.delta_ticks = static_cast<std::uint32_t>(ev.tick - prev_tick);
        prev_tick = ev.tick;
        track.events.push_back(std::move(ev.raw));
    }

    MidiDocument doc;
    doc.format = 0;
    doc.ticks_per_quarter = ticks_per_quarter;
    doc.tracks.push_back(std::move(track));
    doc.tempo_map = {{0, uspq}};
    return doc;
}

/// Serializes a phrase as a format-0 SMF. Re-parsing recovers pitches,
/// velocities and timings within one tick of quantization.
inline Bytes write_smf(const Phrase& phrase, int ticks_per_quarter, double tempo_bpm) {
    return encode_smf(document_from_phrase(phrase, ticks_per_quarter, tempo_bpm));
}

}  // namespace musegest
