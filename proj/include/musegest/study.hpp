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
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "musegest/emotion.hpp"
#include "musegest/error.hpp"
#include "musegest/features.hpp"
#include "musegest/gesture.hpp"
#include "musegest/phrase.hpp"
#include "musegest/rng.hpp"
#include "musegest/stats.hpp"
#include "musegest/voice.hpp"

namespace musegest {

// ---------------------------------------------------------------------------
// Study harness: the five-condition stimulus grid (8 stimuli per condition,
// 2 per emotion quadrant) and the analysis statistics used on the collected
// responses.
// ---------------------------------------------------------------------------

struct InsufficientPhrases : Error { using Error::Error; };
struct EmptyTrials : Error { using Error::Error; };
struct InvalidSurvey : Error { using Error::Error; };

enum class Condition {
    AudioOnly,
    StochasticGestureAudio,
    StochasticGestureNoAudio,
    ExperimentalGestureAudio,
    ExperimentalGestureNoAudio,
};

inline constexpr std::array<Condition, 5> kAllConditions = {
    Condition::AudioOnly, Condition::StochasticGestureAudio,
    Condition::StochasticGestureNoAudio, Condition::ExperimentalGestureAudio,
    Condition::ExperimentalGestureNoAudio};

inline constexpr int kStimuliPerCondition = 8;
inline constexpr int kStimuliPerQuadrant = 2;

inline const char* to_string(Condition c) {
    switch (c) {
        case Condition::AudioOnly: return "audio_only";
        case Condition::StochasticGestureAudio: return "stochastic_gesture_audio";
        case Condition::StochasticGestureNoAudio: return "stochastic_gesture_no_audio";
        case Condition::ExperimentalGestureAudio: return "experimental_gesture_audio";
        case Condition::ExperimentalGestureNoAudio: return "experimental_gesture_no_audio";
    }
    return "audio_only";
}

inline Condition condition_from_string(std::string_view s) {
    for (Condition c : kAllConditions)
        if (s == to_string(c)) return c;
    throw Error("unknown condition: " + std::string(s));
}

inline bool condition_has_audio(Condition c) {
    return c == Condition::AudioOnly || c == Condition::StochasticGestureAudio ||
           c == Condition::ExperimentalGestureAudio;
}

inline bool condition_has_gesture(Condition c) { return c != Condition::AudioOnly; }

inline bool condition_is_stochastic(Condition c) {
    return c == Condition::StochasticGestureAudio || c == Condition::StochasticGestureNoAudio;
}

struct Stimulus {
    std::string id;
    Condition condition = Condition::AudioOnly;
    Quadrant quadrant = Quadrant::Happy;
    Phrase phrase;
    std::optional<GesturePlan> gesture;
    std::optional<RenderPlan> render;
};

struct StimulusSet {
    std::uint64_t master_seed = 0;
    std::vector<Stimulus> stimuli;

    const Stimulus* find(std::string_view id) const {
        for (const Stimulus& s : stimuli)
            if (s.id == id) return &s;
        return nullptr;
    }
};

/// Builds the full 5 x 4 x 2 = 40 stimulus grid. Phrases are drawn from the
/// per-quadrant pool with the master-seeded stream; experimental gestures are
/// generated at the quadrant centroid emotion, stochastic gestures are seeded
/// by the stimulus id, and no-audio conditions carry no render plan. The
/// whole set is a pure function of (phrases, robot, bank, master_seed).
inline StimulusSet build_stimuli(const std::map<Quadrant, std::vector<Phrase>>& phrases,
                                 const RobotModel& robot, const SampleBank& bank,
                                 std::uint64_t master_seed) {
    for (Quadrant q : kAllQuadrants) {
        auto it = phrases.find(q);
        if (it == phrases.end() || it->second.size() < kStimuliPerQuadrant)
            throw InsufficientPhrases("need at least 2 phrases for quadrant " +
                                      std::string(to_string(q)));
    }

    SplitMix64 rng(master_seed);
    StimulusSet set;
    set.master_seed = master_seed;

    for (Condition condition : kAllConditions) {
        for (Quadrant q : kAllQuadrants) {
            const std::vector<Phrase>& pool = phrases.at(q);
            for (int rep = 0; rep < kStimuliPerQuadrant; ++rep) {
                Stimulus s;
                s.condition = condition;
                s.quadrant = q;
                s.id = std::string(to_string(condition)) + "-" + std::string(to_string(q)) +
                       "-" + std::to_string(rep + 1);
                s.phrase = pool[rng.next_below(pool.size())];
                s.phrase.quadrant = q;

                if (condition_has_gesture(condition)) {
                    if (condition_is_stochastic(condition)) {
                        s.gesture = stochastic_gesture(s.id, s.phrase.total_duration_ms(), robot);
                    } else {
                        s.gesture = generate_gesture(s.phrase, extract_features(s.phrase),
                                                     centroid(q), robot);
                    }
                }
                if (condition_has_audio(condition)) {
                    s.render = build_render_plan(s.phrase, bank, rng.next());
                }
                set.stimuli.push_back(std::move(s));
            }
        }
    }
    return set;
}

/// Per-participant presentation order: a seeded Fisher-Yates permutation of
/// all stimulus ids.
inline std::vector<std::string> presentation_order(const StimulusSet& set,
                                                   std::uint64_t participant_seed) {
    std::vector<std::string> ids;
    ids.reserve(set.stimuli.size());
    for (const Stimulus& s : set.stimuli) ids.push_back(s.id);
    SplitMix64 rng(participant_seed);
    for (std::size_t i = ids.size(); i > 1; --i) {
        std::swap(ids[i - 1], ids[rng.next_below(i)]);
    }
    return ids;
}

// ---------------------------------------------------------------------------
// Classification statistics
// ---------------------------------------------------------------------------

struct TrialRecord {
    std::string participant;
    std::string stimulus;
    Quadrant truth = Quadrant::Happy;
    Quadrant predicted = Quadrant::Happy;
};

/// Square count matrix, rows = true class, columns = predicted class.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t classes)
        : classes_(classes), counts_(classes * classes, 0) {}

    std::size_t classes() const { return classes_; }
    std::uint64_t at(std::size_t row, std::size_t col) const {
        return counts_[row * classes_ + col];
    }
    void add(std::size_t row, std::size_t col, std::uint64_t n = 1) {
        counts_[row * classes_ + col] += n;
    }
    std::uint64_t row_sum(std::size_t row) const {
        std::uint64_t s = 0;
        for (std::size_t c = 0; c < classes_; ++c) s += at(row, c);
        return s;
    }
    std::uint64_t col_sum(std::size_t col) const {
        std::uint64_t s = 0;
        for (std::size_t r = 0; r < classes_; ++r) s += at(r, col);
        return s;
    }
    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (std::uint64_t c : counts_) s += c;
        return s;
    }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::size_t classes_;
    std::vector<std::uint64_t> counts_;
};

/// 4x4 quadrant confusion matrix from trial records.
inline ConfusionMatrix confusion_matrix(const std::vector<TrialRecord>& trials) {
    if (trials.empty()) throw EmptyTrials("no trials to tally");
    ConfusionMatrix m(4);
    for (const TrialRecord& t : trials) {
        m.add(static_cast<std::size_t>(t.truth), static_cast<std::size_t>(t.predicted));
    }
    return m;
}

/// Per-class F1 (0 when precision + recall is 0).
inline std::vector<double> per_class_f1(const ConfusionMatrix& m) {
    std::vector<double> f1(m.classes(), 0.0);
    for (std::size_t c = 0; c < m.classes(); ++c) {
        const double tp = static_cast<double>(m.at(c, c));
        const double col = static_cast<double>(m.col_sum(c));
        const double row = static_cast<double>(m.row_sum(c));
        if (col > 0.0 && row > 0.0) {
            const double precision = tp / col;
            const double recall = tp / row;
            f1[c] = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall)
                                             : 0.0;
        }
    }
    return f1;
}

/// Unweighted mean of per-class F1 over classes that are either true or
/// predicted at least once; classes absent from both axes are excluded.
inline double f1_macro(const ConfusionMatrix& m) {
    if (m.total() == 0) throw EmptyTrials("empty confusion matrix");
    const std::vector<double> f1 = per_class_f1(m);
    double sum = 0.0;
    std::size_t considered = 0;
    for (std::size_t c = 0; c < m.classes(); ++c) {
        if (m.row_sum(c) > 0 || m.col_sum(c) > 0) {
            sum += f1[c];
            ++considered;
        }
    }
    return considered > 0 ? sum / static_cast<double>(considered) : 0.0;
}

/// Micro-averaged F1 (equals accuracy for single-label classification).
inline double f1_micro(const ConfusionMatrix& m) {
    const std::uint64_t total = m.total();
    if (total == 0) throw EmptyTrials("empty confusion matrix");
    std::uint64_t tp = 0;
    for (std::size_t c = 0; c < m.classes(); ++c) tp += m.at(c, c);
    return static_cast<double>(tp) / static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// Trust scale
// ---------------------------------------------------------------------------

enum class SurveyGroup { ShimiVoice, Tts };

inline const char* to_string(SurveyGroup g) {
    return g == SurveyGroup::ShimiVoice ? "shimi_voice" : "tts";
}

inline SurveyGroup survey_group_from_string(std::string_view s) {
    if (s == "shimi_voice") return SurveyGroup::ShimiVoice;
    if (s == "tts") return SurveyGroup::Tts;
    throw Error("unknown survey group: " + std::string(s));
}

inline constexpr std::size_t kTrustItemCount = 40;

struct TrustSurvey {
    std::string participant;
    SurveyGroup group = SurveyGroup::ShimiVoice;
    std::array<double, kTrustItemCount> items{};

    void validate() const {
        for (double v : items) {
            if (!(v >= 0.0 && v <= 100.0))
                throw InvalidSurvey("trust item outside [0, 100] for participant " + participant);
        }
    }
};

/// Participant trust score: arithmetic mean of the 40 item ratings.
inline double trust_mean(const TrustSurvey& s) {
    s.validate();
    double sum = 0.0;
    for (double v : s.items) sum += v;
    return sum / static_cast<double>(kTrustItemCount);
}

// ---------------------------------------------------------------------------
// CSV ingestion (simple comma-separated files, no quoting)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
            field.pop_back();
        std::size_t start = 0;
        while (start < field.size() && field[start] == ' ') ++start;
        fields.push_back(field.substr(start));
    }
    return fields;
}

inline std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line != "\r") lines.push_back(line);
    }
    return lines;
}

}  // namespace detail

/// Header: participant,stimulus,true,predicted
inline std::vector<TrialRecord> read_trials_csv(const std::string& text) {
    const auto lines = detail::csv_lines(text);
    if (lines.empty()) throw Error("empty trials file");
    const auto header = detail::split_csv_line(lines[0]);
    if (header != std::vector<std::string>{"participant", "stimulus", "true", "predicted"})
        throw Error("trials header must be: participant,stimulus,true,predicted");

    std::vector<TrialRecord> trials;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = detail::split_csv_line(lines[i]);
        if (f.size() != 4) throw Error("trials row " + std::to_string(i) + " must have 4 fields");
        trials.push_back({f[0], f[1], quadrant_from_string(f[2]), quadrant_from_string(f[3])});
    }
    return trials;
}

/// Header: participant,group,q1..q40
inline std::vector<TrustSurvey> read_surveys_csv(const std::string& text) {
    const auto lines = detail::csv_lines(text);
    if (lines.empty()) throw Error("empty surveys file");
    const auto header = detail::split_csv_line(lines[0]);
    if (header.size() != 2 + kTrustItemCount || header[0] != "participant" ||
        header[1] != "group")
        throw Error("surveys header must be: participant,group,q1..q40");

    std::vector<TrustSurvey> surveys;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = detail::split_csv_line(lines[i]);
        if (f.size() != 2 + kTrustItemCount)
            throw Error("survey row " + std::to_string(i) + " must have 42 fields");
        TrustSurvey s;
        s.participant = f[0];
        s.group = survey_group_from_string(f[1]);
        for (std::size_t k = 0; k < kTrustItemCount; ++k) s.items[k] = std::stod(f[2 + k]);
        s.validate();
        surveys.push_back(std::move(s));
    }
    return surveys;
}

// ---------------------------------------------------------------------------
// Combined analysis report
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ConfusionMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.classes(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < m.classes(); ++c) row.push_back(m.at(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string confusion_csv(const ConfusionMatrix& m) {
    std::string out = "true\\predicted";
    for (Quadrant q : kAllQuadrants) out += "," + std::string(to_string(q));
    out += "\n";
    for (std::size_t r = 0; r < m.classes(); ++r) {
        out += to_string(kAllQuadrants[r]);
        for (std::size_t c = 0; c < m.classes(); ++c)
            out += "," + std::to_string(m.at(r, c));
        out += "\n";
    }
    return out;
}

/// Full analysis of the collected responses: quadrant confusion with macro
/// and micro F1, and per-group trust means with both t-test variants.
inline nlohmann::json analyze(const std::vector<TrialRecord>& trials,
                              const std::vector<TrustSurvey>& surveys,
                              TTestVariant headline_variant = TTestVariant::Welch) {
    nlohmann::json report;

    if (!trials.empty()) {
        const ConfusionMatrix m = confusion_matrix(trials);
        report["classification"] = {{"trials", trials.size()},
                                    {"confusion", to_json(m)},
                                    {"per_class_f1", per_class_f1(m)},
                                    {"f1_macro", f1_macro(m)},
                                    {"f1_micro", f1_micro(m)}};
    }

    if (!surveys.empty()) {
        std::vector<double> shimi, tts;
        for (const TrustSurvey& s : surveys) {
            (s.group == SurveyGroup::ShimiVoice ? shimi : tts).push_back(trust_mean(s));
        }
        auto group_json = [](const std::vector<double>& means) {
            double sum = 0.0;
            for (double v : means) sum += v;
            return nlohmann::json{{"participants", means.size()},
                                  {"mean", means.empty() ? 0.0 : sum / means.size()},
                                  {"per_participant", means}};
        };
        nlohmann::json trust = {{"shimi_voice", group_json(shimi)}, {"tts", group_json(tts)}};
        if (shimi.size() >= 2 && tts.size() >= 2) {
            for (TTestVariant v : {TTestVariant::Welch, TTestVariant::Pooled}) {
                const TTestResult r = t_test_two_sided(shimi, tts, v);
                trust[std::string("t_test_") + to_string(v)] = {
                    {"t", r.t}, {"df", r.df}, {"p", r.p}};
            }
            trust["headline_variant"] = to_string(headline_variant);
            trust["mean_difference"] =
                trust["shimi_voice"]["mean"].get<double>() - trust["tts"]["mean"].get<double>();
        }
        report["trust"] = std::move(trust);
    }
    return report;
}

}  // namespace musegest
