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
#include <array>
#include <compare>
#include <string>
#include <string_view>

#include "musegest/error.hpp"

namespace musegest {

/// The four categorical emotion labels, one per sign region of the
/// valence/arousal plane under the Russell circumplex convention:
/// happy = +v +a, angry = -v +a, sad = -v -a, calm = +v -a.
/// Axis boundaries (coordinate exactly 0) belong to the non-negative side.
enum class Quadrant { Happy, Angry, Sad, Calm };

inline constexpr std::array<Quadrant, 4> kAllQuadrants = {
    Quadrant::Happy, Quadrant::Angry, Quadrant::Sad, Quadrant::Calm};

inline std::string_view to_string(Quadrant q) {
    switch (q) {
        case Quadrant::Happy: return "happy";
        case Quadrant::Angry: return "angry";
        case Quadrant::Sad:   return "sad";
        case Quadrant::Calm:  return "calm";
    }
    return "happy";
}

inline Quadrant quadrant_from_string(std::string_view s) {
    if (s == "happy") return Quadrant::Happy;
    if (s == "angry") return Quadrant::Angry;
    if (s == "sad")   return Quadrant::Sad;
    if (s == "calm")  return Quadrant::Calm;
    throw Error("unknown quadrant label: " + std::string(s));
}

/// A point in the continuous valence/arousal plane. Both coordinates are
/// clamped to [-1, 1] at construction, so an EmotionPoint is always valid.
class EmotionPoint {
public:
    EmotionPoint() = default;
    EmotionPoint(double valence, double arousal)
        : valence_(std::clamp(valence, -1.0, 1.0)),
          arousal_(std::clamp(arousal, -1.0, 1.0)) {}

    double valence() const { return valence_; }
    double arousal() const { return arousal_; }

    friend bool operator==(const EmotionPoint&, const EmotionPoint&) = default;

private:
    double valence_ = 0.0;
    double arousal_ = 0.0;
};

/// Categorical quadrant of a continuous emotion point. Total and exhaustive:
/// every point maps to exactly one quadrant.
inline Quadrant quadrant_of(const EmotionPoint& p) {
    if (p.valence() >= 0.0) {
        return p.arousal() >= 0.0 ? Quadrant::Happy : Quadrant::Calm;
    }
    return p.arousal() >= 0.0 ? Quadrant::Angry : Quadrant::Sad;
}

/// Mid-intensity representative point of a quadrant; quadrant_of(centroid(q))
/// recovers q for every label. Magnitude 0.5 keeps downstream conditioning
/// away from the extremes.
inline EmotionPoint centroid(Quadrant q) {
    switch (q) {
        case Quadrant::Happy: return {0.5, 0.5};
        case Quadrant::Angry: return {-0.5, 0.5};
        case Quadrant::Sad:   return {-0.5, -0.5};
        case Quadrant::Calm:  return {0.5, -0.5};
    }
    return {0.5, 0.5};
}

}  // namespace musegest
