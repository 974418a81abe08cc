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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "musegest/error.hpp"
#include "musegest/fileio.hpp"
#include "musegest/midi.hpp"
#include "musegest/phrase.hpp"

namespace musegest {

// ---------------------------------------------------------------------------
// Prosody statistics of a phrase and threshold validation against reference
// statistics. The reference file carries per-quadrant mean/std for each field;
// a phrase is accepted when every field's z-score stays at or below the
// configured threshold.
// ---------------------------------------------------------------------------

struct MissingReference : Error { using Error::Error; };
struct EmptyCorpus : Error { using Error::Error; };

struct ProsodyStats {
    int pitch_range_semitones = 0;
    double mean_velocity = 0.0;
    double velocity_std = 0.0;  // population standard deviation
    double contour_slope = 0.0; // semitones per second, least-squares fit
    double contour_sign_changes_per_note = 0.0;

    double field(std::size_t i) const {
        switch (i) {
            case 0: return static_cast<double>(pitch_range_semitones);
            case 1: return mean_velocity;
            case 2: return velocity_std;
            case 3: return contour_slope;
            default: return contour_sign_changes_per_note;
        }
    }
};

inline constexpr std::array<const char*, 5> kProsodyFieldNames = {
    "pitch_range_semitones", "mean_velocity", "velocity_std", "contour_slope",
    "contour_sign_changes_per_note"};

/// Computes the five prosody statistics of a phrase.
/// Single-note phrases yield slope 0 and sign-change rate 0 by definition.
inline ProsodyStats phrase_stats(const Phrase& p) {
    if (p.empty()) throw EmptyPhrase();

    ProsodyStats s;
    int min_pitch = 127, max_pitch = 0;
    double vel_sum = 0.0;
    for (const NoteEvent& n : p.notes) {
        min_pitch = std::min(min_pitch, n.pitch);
        max_pitch = std::max(max_pitch, n.pitch);
        vel_sum += n.velocity;
    }
    const auto count = static_cast<double>(p.size());
    s.pitch_range_semitones = max_pitch - min_pitch;
    s.mean_velocity = vel_sum / count;

    double var = 0.0;
    for (const NoteEvent& n : p.notes) {
        const double d = n.velocity - s.mean_velocity;
        var += d * d;
    }
    s.velocity_std = std::sqrt(var / count);

    if (p.size() >= 2) {
        // least-squares slope of pitch over onset seconds
        double mean_t = 0.0, mean_pitch = 0.0;
        for (const NoteEvent& n : p.notes) {
            mean_t += n.onset_ms / 1000.0;
            mean_pitch += n.pitch;
        }
        mean_t /= count;
        mean_pitch /= count;
        double sxx = 0.0, sxy = 0.0;
        for (const NoteEvent& n : p.notes) {
            const double dt = n.onset_ms / 1000.0 - mean_t;
            sxx += dt * dt;
            sxy += dt * (n.pitch - mean_pitch);
        }
        s.contour_slope = sxx > 0.0 ? sxy / sxx : 0.0;

        // direction reversals between consecutive non-flat intervals,
        // normalized by the interval count
        int reversals = 0;
        int last_sign = 0;
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            const int d = p.notes[i + 1].pitch - p.notes[i].pitch;
            const int sign = d > 0 ? 1 : d < 0 ? -1 : 0;
            if (sign != 0) {
                if (last_sign != 0 && sign != last_sign) ++reversals;
                last_sign = sign;
            }
        }
        s.contour_sign_changes_per_note =
            static_cast<double>(reversals) / static_cast<double>(p.size() - 1);
    }
    return s;
}

struct FieldStat {
    double mean = 0.0;
    double std = 1.0;
};

struct QuadrantReference {
    std::array<FieldStat, 5> fields;
};

/// Per-quadrant reference means and standard deviations for the five prosody
/// fields. Degenerate references (std <= 0) are rejected at load.
class ReferenceStats {
public:
    ReferenceStats() = default;

    void set(Quadrant q, const QuadrantReference& ref) {
        for (const FieldStat& f : ref.fields) {
            if (!(f.std > 0.0)) throw Error("reference standard deviation must be positive");
        }
        per_quadrant_[q] = ref;
    }

    bool has(Quadrant q) const { return per_quadrant_.count(q) != 0; }

    const QuadrantReference& get(Quadrant q) const {
        auto it = per_quadrant_.find(q);
        if (it == per_quadrant_.end())
            throw MissingReference("no reference statistics for quadrant " +
                                   std::string(to_string(q)));
        return it->second;
    }

    static ReferenceStats from_json(const nlohmann::json& j) {
        ReferenceStats out;
        for (Quadrant q : kAllQuadrants) {
            const std::string label(to_string(q));
            if (!j.contains(label)) continue;
            QuadrantReference ref;
            for (std::size_t i = 0; i < kProsodyFieldNames.size(); ++i) {
                const auto& fj = j.at(label).at(kProsodyFieldNames[i]);
                ref.fields[i] = {fj.at("mean").get<double>(), fj.at("std").get<double>()};
            }
            out.set(q, ref);
        }
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        for (const auto& [q, ref] : per_quadrant_) {
            nlohmann::json qj;
            for (std::size_t i = 0; i < kProsodyFieldNames.size(); ++i) {
                qj[kProsodyFieldNames[i]] = {{"mean", ref.fields[i].mean},
                                             {"std", ref.fields[i].std}};
            }
            j[std::string(to_string(q))] = std::move(qj);
        }
        return j;
    }

    static ReferenceStats load(const std::string& path) {
        return from_json(nlohmann::json::parse(read_text_file(path)));
    }

private:
    std::map<Quadrant, QuadrantReference> per_quadrant_;
};

struct FieldZ {
    const char* field;
    double z;
    bool violated;
};

struct ValidationResult {
    bool accepted = false;
    std::array<FieldZ, 5> fields{};
    double max_z = 0.0;

    std::vector<std::string> violated_fields() const {
        std::vector<std::string> out;
        for (const FieldZ& f : fields)
            if (f.violated) out.emplace_back(f.field);
        return out;
    }
};

/// z-filter: accept iff |s_i - mean_i| / std_i <= threshold for all fields.
inline ValidationResult validate_phrase(const ProsodyStats& s, const ReferenceStats& ref,
                                        Quadrant q, double z_threshold) {
    if (!(z_threshold > 0.0)) throw Error("z threshold must be positive");
    const QuadrantReference& qr = ref.get(q);
    ValidationResult out;
    out.accepted = true;
    for (std::size_t i = 0; i < 5; ++i) {
        const double z = std::abs(s.field(i) - qr.fields[i].mean) / qr.fields[i].std;
        const bool violated = z > z_threshold;
        out.fields[i] = {kProsodyFieldNames[i], z, violated};
        out.max_z = std::max(out.max_z, z);
        if (violated) out.accepted = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Corpus ingestion
// ---------------------------------------------------------------------------

struct ManifestEntry {
    std::string path;
    Quadrant quadrant = Quadrant::Happy;
    std::string contributor;
};

struct CorpusManifest {
    std::vector<ManifestEntry> entries;
    std::string reference_stats_path;

    /// Reads a manifest JSON file. Relative paths inside the manifest are
    /// resolved against the manifest's own directory.
    static CorpusManifest load(const std::string& path) {
        namespace fs = std::filesystem;
        const auto j = nlohmann::json::parse(read_text_file(path));
        const fs::path base = fs::path(path).parent_path();
        auto resolve = [&](const std::string& p) {
            fs::path fp(p);
            return fp.is_absolute() ? fp.string() : (base / fp).string();
        };

        CorpusManifest m;
        if (j.contains("reference_stats"))
            m.reference_stats_path = resolve(j.at("reference_stats").get<std::string>());
        for (const auto& ej : j.at("entries")) {
            m.entries.push_back({resolve(ej.at("path").get<std::string>()),
                                 quadrant_from_string(ej.at("quadrant").get<std::string>()),
                                 ej.value("contributor", std::string("unknown"))});
        }
        return m;
    }
};

enum class RejectionKind { ParseError, DurationOutOfBounds, StatsThreshold };

inline const char* to_string(RejectionKind k) {
    switch (k) {
        case RejectionKind::ParseError: return "parse_error";
        case RejectionKind::DurationOutOfBounds: return "duration_out_of_bounds";
        case RejectionKind::StatsThreshold: return "stats_threshold";
    }
    return "parse_error";
}

struct RejectionReport {
    RejectionKind kind = RejectionKind::ParseError;
    std::string detail;
    std::optional<ValidationResult> validation;
};

struct RejectedEntry {
    ManifestEntry entry;
    std::optional<Phrase> phrase;
    RejectionReport report;
};

struct AcceptedEntry {
    ManifestEntry entry;
    ProsodyStats stats;
    double max_z = 0.0;
};

struct Corpus {
    std::map<Quadrant, std::vector<Phrase>> accepted;
    std::vector<AcceptedEntry> accepted_entries;  // manifest order
    std::vector<RejectedEntry> rejected;          // manifest order
    std::map<std::string, std::map<Quadrant, int>> contributor_counts;

    std::size_t accepted_count() const {
        std::size_t n = 0;
        for (const auto& [q, v] : accepted) n += v.size();
        return n;
    }
    const std::vector<Phrase>& phrases(Quadrant q) const {
        static const std::vector<Phrase> empty;
        auto it = accepted.find(q);
        return it == accepted.end() ? empty : it->second;
    }
};

/// Ingests every manifest entry: parse, duration-filter to the admissible
/// 100..6000 ms window, z-validate against the reference. Per-entry failures
/// are recorded, not thrown; the only hard failure is an empty result.
/// Entries are processed in manifest order, so the result is deterministic.
inline Corpus load_corpus(const CorpusManifest& manifest, const ReferenceStats& ref,
                          double z_threshold) {
    Corpus corpus;
    for (const ManifestEntry& entry : manifest.entries) {
        Phrase phrase;
        try {
            MidiDocument doc = parse_smf(read_file_bytes(entry.path));
            phrase = to_phrase(doc);
        } catch (const Error& e) {
            corpus.rejected.push_back(
                {entry, std::nullopt, {RejectionKind::ParseError, e.what(), std::nullopt}});
            continue;
        }
        phrase.quadrant = entry.quadrant;

        if (!phrase.within_corpus_bounds()) {
            RejectionReport report{RejectionKind::DurationOutOfBounds,
                                   "total duration " + std::to_string(phrase.total_duration_ms()) +
                                       " ms outside [100, 6000]",
                                   std::nullopt};
            corpus.rejected.push_back({entry, phrase, std::move(report)});
            continue;
        }

        const ProsodyStats stats = phrase_stats(phrase);
        const ValidationResult v = validate_phrase(stats, ref, entry.quadrant, z_threshold);
        if (!v.accepted) {
            RejectionReport report{RejectionKind::StatsThreshold, "z-score threshold exceeded", v};
            corpus.rejected.push_back({entry, phrase, std::move(report)});
            continue;
        }

        corpus.accepted[entry.quadrant].push_back(std::move(phrase));
        corpus.accepted_entries.push_back({entry, stats, v.max_z});
        corpus.contributor_counts[entry.contributor][entry.quadrant] += 1;
    }
    if (corpus.accepted_count() == 0) throw EmptyCorpus("no phrases accepted from manifest");
    return corpus;
}

inline Corpus load_corpus(const CorpusManifest& manifest, double z_threshold) {
    if (manifest.reference_stats_path.empty())
        throw MissingReference("manifest does not name a reference statistics file");
    return load_corpus(manifest, ReferenceStats::load(manifest.reference_stats_path), z_threshold);
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ProsodyStats& s) {
    nlohmann::json j;
    for (std::size_t i = 0; i < 5; ++i) j[kProsodyFieldNames[i]] = s.field(i);
    return j;
}

inline nlohmann::json to_json(const ValidationResult& v) {
    nlohmann::json fields = nlohmann::json::array();
    for (const FieldZ& f : v.fields) {
        fields.push_back({{"field", f.field}, {"z", f.z}, {"violated", f.violated}});
    }
    return {{"accepted", v.accepted}, {"max_z", v.max_z}, {"fields", std::move(fields)}};
}

inline nlohmann::json validation_report_json(const Corpus& corpus, double z_threshold) {
    nlohmann::json accepted = nlohmann::json::array();
    for (const AcceptedEntry& e : corpus.accepted_entries) {
        accepted.push_back({{"path", e.entry.path},
                            {"quadrant", std::string(to_string(e.entry.quadrant))},
                            {"contributor", e.entry.contributor},
                            {"stats", to_json(e.stats)},
                            {"max_z", e.max_z}});
    }
    nlohmann::json rejected = nlohmann::json::array();
    for (const RejectedEntry& e : corpus.rejected) {
        nlohmann::json ej = {{"path", e.entry.path},
                             {"quadrant", std::string(to_string(e.entry.quadrant))},
                             {"contributor", e.entry.contributor},
                             {"reason", to_string(e.report.kind)},
                             {"detail", e.report.detail}};
        if (e.report.validation) ej["validation"] = to_json(*e.report.validation);
        rejected.push_back(std::move(ej));
    }
    nlohmann::json counts;
    for (const auto& [contributor, per_q] : corpus.contributor_counts) {
        nlohmann::json cj;
        for (const auto& [q, n] : per_q) cj[std::string(to_string(q))] = n;
        counts[contributor] = std::move(cj);
    }
    return {{"z_threshold", z_threshold},
            {"accepted", std::move(accepted)},
            {"rejected", std::move(rejected)},
            {"contributor_counts", std::move(counts)}};
}

}  // namespace musegest
