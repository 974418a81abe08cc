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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "musegest/emotion.hpp"
#include "musegest/error.hpp"
#include "musegest/features.hpp"
#include "musegest/fileio.hpp"
#include "musegest/phrase.hpp"
#include "musegest/rng.hpp"

namespace musegest {

// ---------------------------------------------------------------------------
// Keyframe gesture synthesis for a configurable low-DoF robot.
//
// Each degree of freedom has a role deciding how musical features map onto
// it: `beat` taps along with a subdivision of the estimated tempo, `contour`
// tracks the normalized pitch curve, `onset` nods on note attacks with
// velocity-scaled excursions, and `gaze` compensates its parent so the
// absolute look direction holds steady. Trajectories are generated raw at
// full amplitude and then conditioned on the continuous emotion: arousal
// scales amplitude about the range midpoint and slows the attack of each
// movement, valence selects smooth versus linear interpolation and, when
// strongly negative, inserts short holds at direction reversals.
// ---------------------------------------------------------------------------

struct CyclicDependency : Error { using Error::Error; };

enum class DofRole { Beat, Contour, Onset, Gaze };

inline const char* to_string(DofRole r) {
    switch (r) {
        case DofRole::Beat: return "beat";
        case DofRole::Contour: return "contour";
        case DofRole::Onset: return "onset";
        case DofRole::Gaze: return "gaze";
    }
    return "beat";
}

inline DofRole dof_role_from_string(std::string_view s) {
    if (s == "beat") return DofRole::Beat;
    if (s == "contour") return DofRole::Contour;
    if (s == "onset") return DofRole::Onset;
    if (s == "gaze") return DofRole::Gaze;
    throw Error("unknown DoF role: " + std::string(s));
}

struct DofSpec {
    std::string id;
    double position_min_rad = -0.5;
    double position_max_rad = 0.5;
    double max_velocity_rad_s = 10.0;
    double max_acceleration_rad_s2 = 1000.0;
    std::optional<std::string> parent;
    DofRole role = DofRole::Contour;
    double gaze_target_rad = 0.0;  // used by the gaze role only

    double mid() const { return 0.5 * (position_min_rad + position_max_rad); }
    double half_range() const { return 0.5 * (position_max_rad - position_min_rad); }
};

struct RobotModel {
    std::string name;
    std::vector<DofSpec> dofs;

    const DofSpec* find(std::string_view id) const {
        for (const DofSpec& d : dofs)
            if (d.id == id) return &d;
        return nullptr;
    }

    void validate() const {
        for (const DofSpec& d : dofs) {
            if (d.id.empty()) throw Error("DoF id must be non-empty");
            if (!(d.position_min_rad < d.position_max_rad))
                throw Error("DoF " + d.id + ": position_min must be below position_max");
            if (!(d.max_velocity_rad_s > 0.0) || !(d.max_acceleration_rad_s2 > 0.0))
                throw Error("DoF " + d.id + ": velocity/acceleration limits must be positive");
            if (d.parent && !find(*d.parent))
                throw Error("DoF " + d.id + ": unknown parent " + *d.parent);
        }
        for (std::size_t i = 0; i < dofs.size(); ++i)
            for (std::size_t j = i + 1; j < dofs.size(); ++j)
                if (dofs[i].id == dofs[j].id) throw Error("duplicate DoF id " + dofs[i].id);
        topological_order();
    }

    /// Parent-before-child ordering, independent of declaration order
    /// (candidates are considered in sorted id order).
    std::vector<std::size_t> topological_order() const {
        std::vector<std::size_t> by_id(dofs.size());
        for (std::size_t i = 0; i < by_id.size(); ++i) by_id[i] = i;
        std::sort(by_id.begin(), by_id.end(),
                  [&](std::size_t a, std::size_t b) { return dofs[a].id < dofs[b].id; });

        std::vector<std::size_t> order;
        std::vector<bool> placed(dofs.size(), false);
        while (order.size() < dofs.size()) {
            bool progressed = false;
            for (std::size_t idx : by_id) {
                if (placed[idx]) continue;
                const auto& parent = dofs[idx].parent;
                bool ready = !parent.has_value();
                if (!ready) {
                    for (std::size_t j = 0; j < dofs.size(); ++j)
                        if (dofs[j].id == *parent) ready = placed[j];
                }
                if (ready) {
                    order.push_back(idx);
                    placed[idx] = true;
                    progressed = true;
                }
            }
            if (!progressed) throw CyclicDependency("DoF dependencies contain a cycle");
        }
        return order;
    }

    static RobotModel from_json(const nlohmann::json& j) {
        RobotModel m;
        m.name = j.value("name", "robot");
        for (const auto& dj : j.at("dofs")) {
            DofSpec d;
            d.id = dj.at("id").get<std::string>();
            d.position_min_rad = dj.at("position_min_rad").get<double>();
            d.position_max_rad = dj.at("position_max_rad").get<double>();
            d.max_velocity_rad_s = dj.at("max_velocity_rad_s").get<double>();
            d.max_acceleration_rad_s2 = dj.at("max_acceleration_rad_s2").get<double>();
            if (dj.contains("parent") && !dj.at("parent").is_null())
                d.parent = dj.at("parent").get<std::string>();
            d.role = dof_role_from_string(dj.at("role").get<std::string>());
            d.gaze_target_rad = dj.value("gaze_target_rad", 0.0);
            m.dofs.push_back(std::move(d));
        }
        m.validate();
        return m;
    }

    nlohmann::json to_json() const {
        nlohmann::json dofs_json = nlohmann::json::array();
        for (const DofSpec& d : dofs) {
            nlohmann::json dj = {{"id", d.id},
                                 {"position_min_rad", d.position_min_rad},
                                 {"position_max_rad", d.position_max_rad},
                                 {"max_velocity_rad_s", d.max_velocity_rad_s},
                                 {"max_acceleration_rad_s2", d.max_acceleration_rad_s2},
                                 {"role", to_string(d.role)},
                                 {"parent", d.parent ? nlohmann::json(*d.parent)
                                                     : nlohmann::json(nullptr)}};
            if (d.role == DofRole::Gaze) dj["gaze_target_rad"] = d.gaze_target_rad;
            dofs_json.push_back(std::move(dj));
        }
        return {{"name", name}, {"dofs", std::move(dofs_json)}};
    }

    static RobotModel load(const std::string& path) {
        return from_json(nlohmann::json::parse(read_text_file(path)));
    }
};

enum class Interp { Linear, Smooth };

inline const char* to_string(Interp i) { return i == Interp::Linear ? "linear" : "smooth"; }

struct Keyframe {
    double time_ms = 0.0;
    double position_rad = 0.0;

    friend bool operator==(const Keyframe&, const Keyframe&) = default;
};

struct DofTrajectory {
    std::string dof_id;
    std::vector<Keyframe> keyframes;      // times strictly increasing from 0
    std::vector<Interp> segments;         // size max(0, keyframes-1)

    double start_ms() const { return keyframes.empty() ? 0.0 : keyframes.front().time_ms; }
    double end_ms() const { return keyframes.empty() ? 0.0 : keyframes.back().time_ms; }

    /// Piecewise interpolated position; held flat outside the keyframe span.
    double position_at(double t_ms) const {
        if (keyframes.empty()) return 0.0;
        if (t_ms <= keyframes.front().time_ms) return keyframes.front().position_rad;
        if (t_ms >= keyframes.back().time_ms) return keyframes.back().position_rad;
        std::size_t hi = 1;
        while (keyframes[hi].time_ms < t_ms) ++hi;
        const Keyframe& a = keyframes[hi - 1];
        const Keyframe& b = keyframes[hi];
        double u = (t_ms - a.time_ms) / (b.time_ms - a.time_ms);
        if (segments[hi - 1] == Interp::Smooth) u = u * u * (3.0 - 2.0 * u);
        return a.position_rad + (b.position_rad - a.position_rad) * u;
    }

    friend bool operator==(const DofTrajectory&, const DofTrajectory&) = default;
};

struct GazeClamp {
    std::string dof_id;
    double time_ms = 0.0;

    friend bool operator==(const GazeClamp&, const GazeClamp&) = default;
};

enum class PlanSource { Generated, Stochastic };

inline const char* to_string(PlanSource s) {
    return s == PlanSource::Generated ? "generated" : "stochastic";
}

struct GesturePlan {
    std::string robot_name;
    std::vector<DofTrajectory> trajectories;  // sorted by dof id
    double duration_ms = 0.0;
    EmotionPoint emotion;
    PlanSource source = PlanSource::Generated;
    std::vector<GazeClamp> gaze_clamps;

    const DofTrajectory* find(std::string_view dof_id) const {
        for (const DofTrajectory& t : trajectories)
            if (t.dof_id == dof_id) return &t;
        return nullptr;
    }

    friend bool operator==(const GesturePlan&, const GesturePlan&) = default;
};

// ---------------------------------------------------------------------------
// Emotion conditioning
// ---------------------------------------------------------------------------

/// Amplitude scale about the range midpoint: 0.3 at arousal -1, 1.0 at +1.
inline double amplitude_scale(double arousal) {
    return 0.3 + 0.7 * (arousal + 1.0) / 2.0;
}

/// Speed scale applied to keyframe times (1.0 at arousal +1, 1/0.6 at -1).
/// Uniform scaling followed by re-normalization to the original duration is
/// an exact identity, so conditioned plans keep their musical timing; the
/// factor is the documented knob for any future mode that lets plans run
/// longer than the phrase.
inline double speed_scale(double arousal) {
    return 1.0 / (0.6 + 0.4 * (arousal + 1.0) / 2.0);
}

inline constexpr double kReversalHoldMs = 20.0;

/// Applies emotion conditioning to one trajectory: amplitude scaling about
/// the midpoint, the duration-preserving speed renormalization (identity on
/// times, see speed_scale), valence-selected interpolation, and 20 ms holds
/// at direction reversals for strongly negative valence. Positions stay
/// within the DoF's limits whenever the input respected them.
inline DofTrajectory condition_trajectory(const DofTrajectory& t, const EmotionPoint& e,
                                          const DofSpec& spec) {
    if (t.keyframes.size() < 2) return t;

    DofTrajectory out = t;
    const double mid = spec.mid();
    const double amp = amplitude_scale(e.arousal());
    for (Keyframe& k : out.keyframes) {
        k.position_rad = mid + amp * (k.position_rad - mid);
    }

    const Interp interp = e.valence() >= 0.0 ? Interp::Smooth : Interp::Linear;
    out.segments.assign(out.keyframes.size() - 1, interp);

    if (e.valence() < -0.5) {
        DofTrajectory held;
        held.dof_id = out.dof_id;
        held.keyframes.push_back(out.keyframes.front());
        for (std::size_t i = 1; i + 1 < out.keyframes.size(); ++i) {
            held.keyframes.push_back(out.keyframes[i]);
            const double before = out.keyframes[i].position_rad - out.keyframes[i - 1].position_rad;
            const double after = out.keyframes[i + 1].position_rad - out.keyframes[i].position_rad;
            const bool reversal = (before > 0.0 && after < 0.0) || (before < 0.0 && after > 0.0);
            if (reversal && out.keyframes[i].time_ms + kReversalHoldMs < out.keyframes[i + 1].time_ms) {
                held.keyframes.push_back({out.keyframes[i].time_ms + kReversalHoldMs,
                                          out.keyframes[i].position_rad});
            }
        }
        held.keyframes.push_back(out.keyframes.back());
        held.segments.assign(held.keyframes.size() - 1, interp);
        out = std::move(held);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Raw per-role trajectory generation
// ---------------------------------------------------------------------------

namespace detail {

/// Beat subdivision factor in quarter notes, by arousal band.
inline double beat_subdivision_factor(double arousal) {
    if (arousal < -1.0 / 3.0) return 2.0;  // half notes
    if (arousal > 1.0 / 3.0) return 0.5;   // eighth notes
    return 1.0;                            // quarter notes
}

inline void append_keyframe(DofTrajectory& t, double time_ms, double pos) {
    if (!t.keyframes.empty() && time_ms <= t.keyframes.back().time_ms) {
        t.keyframes.back().position_rad = pos;  // same instant: later value wins
        return;
    }
    t.keyframes.push_back({time_ms, pos});
}

/// Foot tapping: rest at each period boundary, tap halfway through, closed
/// with a rest at the phrase end.
inline DofTrajectory beat_trajectory(const DofSpec& spec, double tempo_bpm, double arousal,
                                     double duration_ms) {
    const double period = 60000.0 / tempo_bpm * beat_subdivision_factor(arousal);
    const double rest = spec.mid();
    const double tap = spec.position_min_rad;

    DofTrajectory t;
    t.dof_id = spec.id;
    append_keyframe(t, 0.0, rest);
    // alternation stops a quarter period short of the end so the closing
    // rest keyframe never creates a near-vertical segment
    bool is_tap = true;
    double time = period / 2.0;
    while (time < duration_ms - period / 4.0) {
        append_keyframe(t, time, is_tap ? tap : rest);
        is_tap = !is_tap;
        time += period / 2.0;
    }
    append_keyframe(t, duration_ms, rest);
    t.segments.assign(t.keyframes.size() - 1, Interp::Linear);
    return t;
}

/// Torso lean: pitch curve mapped over the full position range, sampled at
/// note onsets.
inline DofTrajectory contour_trajectory(const DofSpec& spec, const Phrase& phrase,
                                        const Contour& contour, double duration_ms) {
    DofTrajectory t;
    t.dof_id = spec.id;
    const double range = spec.position_max_rad - spec.position_min_rad;
    for (std::size_t i = 0; i < phrase.size(); ++i) {
        const double pos = spec.position_min_rad + contour.curve[i] * range;
        if (t.keyframes.empty() && phrase.notes[i].onset_ms > 0.0) {
            append_keyframe(t, 0.0, pos);
        }
        append_keyframe(t, phrase.notes[i].onset_ms, pos);
    }
    append_keyframe(t, duration_ms, t.keyframes.back().position_rad);
    t.segments.assign(t.keyframes.size() - 1, Interp::Linear);
    return t;
}

inline constexpr double kOnsetDecayTauMs = 150.0;
inline constexpr double kOnsetAttackMs = 60.0;

/// Nodding: one excursion per note onset, amplitude proportional to velocity,
/// decaying back toward neutral with a 150 ms time constant. Each excursion
/// gets a short anticipatory rise so slopes stay bounded.
inline DofTrajectory onset_trajectory(const DofSpec& spec, const Phrase& phrase,
                                      double duration_ms) {
    DofTrajectory t;
    t.dof_id = spec.id;
    const double neutral = spec.mid();

    double peak_time = -1.0;
    double peak_amp = 0.0;
    auto decayed = [&](double time_ms) {
        if (peak_time < 0.0) return neutral;
        return neutral + peak_amp * std::exp(-(time_ms - peak_time) / kOnsetDecayTauMs);
    };

    for (std::size_t i = 0; i < phrase.size(); ++i) {
        const NoteEvent& n = phrase.notes[i];
        const double amp = (n.velocity / 127.0) * spec.half_range();
        if (t.keyframes.empty() && n.onset_ms > 0.0) append_keyframe(t, 0.0, neutral);
        const double pre = n.onset_ms - kOnsetAttackMs;
        if (!t.keyframes.empty() && pre > t.keyframes.back().time_ms) {
            append_keyframe(t, pre, decayed(pre));
        }
        append_keyframe(t, n.onset_ms, neutral + amp);
        peak_time = n.onset_ms;
        peak_amp = amp;

        const double horizon =
            std::min(i + 1 < phrase.size() ? phrase.notes[i + 1].onset_ms - kOnsetAttackMs
                                           : duration_ms,
                     duration_ms);
        for (int k = 1; k <= 3; ++k) {
            const double sample = n.onset_ms + k * kOnsetDecayTauMs;
            if (sample >= horizon) break;
            append_keyframe(t, sample, decayed(sample));
        }
    }
    if (t.keyframes.back().time_ms < duration_ms) {
        append_keyframe(t, duration_ms, decayed(duration_ms));
    }
    t.segments.assign(t.keyframes.size() - 1, Interp::Linear);
    return t;
}

/// Gaze compensation against the parent's finished trajectory: the child
/// mirrors the parent at the parent's own keyframe times and copies each
/// segment's interpolation, so the summed angle matches the target exactly
/// wherever no clamping occurs.
inline DofTrajectory gaze_trajectory(const DofSpec& spec, const DofTrajectory* parent,
                                     double duration_ms, std::vector<GazeClamp>& clamps) {
    DofTrajectory t;
    t.dof_id = spec.id;
    auto clamp_position = [&](double desired, double time_ms) {
        const double clamped =
            std::clamp(desired, spec.position_min_rad, spec.position_max_rad);
        if (clamped != desired) clamps.push_back({spec.id, time_ms});
        return clamped;
    };

    if (parent == nullptr || parent->keyframes.size() < 2) {
        const double pos = clamp_position(spec.gaze_target_rad, 0.0);
        t.keyframes = {{0.0, pos}, {duration_ms, pos}};
        t.segments = {Interp::Linear};
        return t;
    }

    for (std::size_t i = 0; i < parent->keyframes.size(); ++i) {
        const Keyframe& pk = parent->keyframes[i];
        t.keyframes.push_back(
            {pk.time_ms, clamp_position(spec.gaze_target_rad - pk.position_rad, pk.time_ms)});
    }
    t.segments = parent->segments;
    return t;
}

}  // namespace detail

/// Generates a full gesture plan for a phrase: every DoF's trajectory is
/// produced in dependency order from its role mapping, then conditioned on
/// the emotion point. Gaze DoFs are compensatory and read their parent's
/// conditioned output directly, so they skip the conditioning pass.
/// Trajectories in the returned plan are sorted by DoF id.
inline GesturePlan generate_gesture(const Phrase& phrase, const FeatureVector& features,
                                    const EmotionPoint& emotion, const RobotModel& robot) {
    if (phrase.empty()) throw EmptyPhrase();
    robot.validate();

    const double duration = phrase.total_duration_ms();
    GesturePlan plan;
    plan.robot_name = robot.name;
    plan.duration_ms = duration;
    plan.emotion = emotion;
    plan.source = PlanSource::Generated;

    std::map<std::string, DofTrajectory> finished;
    for (std::size_t idx : robot.topological_order()) {
        const DofSpec& spec = robot.dofs[idx];
        DofTrajectory traj;
        switch (spec.role) {
            case DofRole::Beat:
                traj = condition_trajectory(
                    detail::beat_trajectory(spec, features.tempo_bpm, emotion.arousal(), duration),
                    emotion, spec);
                break;
            case DofRole::Contour:
                traj = condition_trajectory(
                    detail::contour_trajectory(spec, phrase, features.contour, duration), emotion,
                    spec);
                break;
            case DofRole::Onset:
                traj = condition_trajectory(detail::onset_trajectory(spec, phrase, duration),
                                            emotion, spec);
                break;
            case DofRole::Gaze: {
                const DofTrajectory* parent =
                    spec.parent ? (finished.count(*spec.parent) ? &finished[*spec.parent] : nullptr)
                                : nullptr;
                traj = detail::gaze_trajectory(spec, parent, duration, plan.gaze_clamps);
                break;
            }
        }
        finished[spec.id] = std::move(traj);
    }

    for (auto& [id, traj] : finished) plan.trajectories.push_back(std::move(traj));
    return plan;
}

/// Deterministic random-walk baseline: every DoF moves independently through
/// uniform targets inside the neutral-emotion conditioned range, with
/// movement durations drawn uniformly between 50 ms and half the plan length.
/// The stream is seeded from a stable hash of the stimulus id (mixed per DoF,
/// so declaration order is irrelevant); equal ids give identical plans.
inline GesturePlan stochastic_gesture(const std::string& stimulus_id, double duration_ms,
                                      const RobotModel& robot) {
    if (!(duration_ms > 0.0)) throw Error("stochastic gesture duration must be positive");
    robot.validate();

    const EmotionPoint neutral(0.0, 0.0);
    const double amp = amplitude_scale(neutral.arousal());

    GesturePlan plan;
    plan.robot_name = robot.name;
    plan.duration_ms = duration_ms;
    plan.emotion = neutral;
    plan.source = PlanSource::Stochastic;

    std::vector<std::size_t> order(robot.dofs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return robot.dofs[a].id < robot.dofs[b].id;
    });

    const std::uint64_t base_seed = fnv1a64(stimulus_id);
    for (std::size_t idx : order) {
        const DofSpec& spec = robot.dofs[idx];
        SplitMix64 rng(mix_seed(base_seed, fnv1a64(spec.id)));

        const double lo = spec.mid() - amp * spec.half_range();
        const double hi = spec.mid() + amp * spec.half_range();
        const double max_move = std::max(50.0, duration_ms / 2.0);

        DofTrajectory t;
        t.dof_id = spec.id;
        t.keyframes.push_back({0.0, spec.mid()});
        double time = 0.0;
        while (time < duration_ms) {
            const double move = rng.uniform(50.0, max_move);
            const double target = rng.uniform(lo, hi);
            if (time + move >= duration_ms) {
                // truncate the final movement at the plan boundary
                double u = (duration_ms - time) / move;
                u = u * u * (3.0 - 2.0 * u);
                const double prev = t.keyframes.back().position_rad;
                t.keyframes.push_back({duration_ms, prev + (target - prev) * u});
                break;
            }
            time += move;
            t.keyframes.push_back({time, target});
        }
        t.segments.assign(t.keyframes.size() - 1, Interp::Smooth);
        plan.trajectories.push_back(std::move(t));
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Plan serialization
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const GesturePlan& plan) {
    nlohmann::json trajectories = nlohmann::json::array();
    for (const DofTrajectory& t : plan.trajectories) {
        nlohmann::json kfs = nlohmann::json::array();
        for (const Keyframe& k : t.keyframes)
            kfs.push_back({{"time_ms", k.time_ms}, {"position_rad", k.position_rad}});
        nlohmann::json segs = nlohmann::json::array();
        for (Interp s : t.segments) segs.push_back(to_string(s));
        trajectories.push_back(
            {{"dof", t.dof_id}, {"keyframes", std::move(kfs)}, {"segments", std::move(segs)}});
    }
    nlohmann::json clamps = nlohmann::json::array();
    for (const GazeClamp& c : plan.gaze_clamps)
        clamps.push_back({{"dof", c.dof_id}, {"time_ms", c.time_ms}});
    return {{"robot", plan.robot_name},
            {"duration_ms", plan.duration_ms},
            {"emotion", {{"valence", plan.emotion.valence()}, {"arousal", plan.emotion.arousal()}}},
            {"source", to_string(plan.source)},
            {"trajectories", std::move(trajectories)},
            {"gaze_clamps", std::move(clamps)}};
}

inline GesturePlan gesture_plan_from_json(const nlohmann::json& j) {
    GesturePlan plan;
    plan.robot_name = j.value("robot", "robot");
    plan.duration_ms = j.at("duration_ms").get<double>();
    plan.emotion = EmotionPoint(j.at("emotion").at("valence").get<double>(),
                                j.at("emotion").at("arousal").get<double>());
    plan.source = j.value("source", "generated") == std::string("stochastic")
                      ? PlanSource::Stochastic
                      : PlanSource::Generated;
    for (const auto& tj : j.at("trajectories")) {
        DofTrajectory t;
        t.dof_id = tj.at("dof").get<std::string>();
        for (const auto& kj : tj.at("keyframes"))
            t.keyframes.push_back(
                {kj.at("time_ms").get<double>(), kj.at("position_rad").get<double>()});
        for (const auto& sj : tj.at("segments"))
            t.segments.push_back(sj.get<std::string>() == "smooth" ? Interp::Smooth
                                                                   : Interp::Linear);
        plan.trajectories.push_back(std::move(t));
    }
    if (j.contains("gaze_clamps"))
        for (const auto& cj : j.at("gaze_clamps"))
            plan.gaze_clamps.push_back(
                {cj.at("dof").get<std::string>(), cj.at("time_ms").get<double>()});
    return plan;
}

/// CSV export, one row per keyframe; the interpolation column names the
/// segment leaving the keyframe ("end" for the final frame).
inline std::string to_csv(const GesturePlan& plan) {
    std::string out = "dof,time_ms,position_rad,interpolation\n";
    char buf[128];
    for (const DofTrajectory& t : plan.trajectories) {
        for (std::size_t i = 0; i < t.keyframes.size(); ++i) {
            const char* interp = i < t.segments.size() ? to_string(t.segments[i]) : "end";
            std::snprintf(buf, sizeof buf, "%s,%.6f,%.9f,%s\n", t.dof_id.c_str(),
                          t.keyframes[i].time_ms, t.keyframes[i].position_rad, interp);
            out += buf;
        }
    }
    return out;
}

}  // namespace musegest
