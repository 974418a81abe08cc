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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "musegest/error.hpp"
#include "musegest/gesture.hpp"
#include "musegest/voice.hpp"

namespace musegest {

// ---------------------------------------------------------------------------
// Synchronized gesture+voice timelines and kinematic feasibility checking.
// Violations are report content, never exceptions: the simulator is an
// analysis tool.
// ---------------------------------------------------------------------------

struct SyncToleranceExceeded : Error { using Error::Error; };

inline constexpr double kSyncToleranceMs = 50.0;

struct Timeline {
    GesturePlan gesture;
    RenderPlan voice;
    double offset_ms = 0.0;

    double sync_error_ms() const {
        return std::abs(gesture.duration_ms - voice.phrase_duration_ms);
    }
};

/// Pairs a gesture plan with a render plan; the two must agree on duration
/// within the 50 ms audio-visual tolerance.
inline Timeline merge(GesturePlan gesture, RenderPlan voice) {
    const double err = std::abs(gesture.duration_ms - voice.phrase_duration_ms);
    if (err > kSyncToleranceMs)
        throw SyncToleranceExceeded("gesture/voice duration mismatch of " +
                                    std::to_string(err) + " ms exceeds 50 ms");
    return {std::move(gesture), std::move(voice), 0.0};
}

enum class ViolationKind { Position, Velocity, Acceleration };

inline const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::Position: return "position";
        case ViolationKind::Velocity: return "velocity";
        case ViolationKind::Acceleration: return "acceleration";
    }
    return "position";
}

struct Violation {
    ViolationKind kind = ViolationKind::Position;
    double time_ms = 0.0;
    double value = 0.0;
    double limit = 0.0;
};

struct DofReport {
    std::string dof_id;
    double max_abs_velocity_rad_s = 0.0;
    double max_abs_acceleration_rad_s2 = 0.0;
    std::vector<Violation> violations;
};

struct SimReport {
    std::vector<DofReport> dofs;
    double sync_error_ms = 0.0;
    bool pass = false;

    std::size_t violation_count() const {
        std::size_t n = 0;
        for (const DofReport& d : dofs) n += d.violations.size();
        return n;
    }
};

namespace detail {

/// Rates one trajectory on a uniform dt grid: positions against the spec's
/// range, velocity/acceleration by central finite differences (one-sided at
/// the endpoints).
inline DofReport simulate_trajectory(const DofTrajectory& traj, const DofSpec& spec,
                                     double dt_ms) {
    DofReport report;
    report.dof_id = traj.dof_id;

    const double duration = traj.end_ms();
    const auto steps = static_cast<std::size_t>(std::floor(duration / dt_ms));
    std::vector<double> pos(steps + 1);
    std::size_t seg = 0;  // monotone sample times: advance the segment cursor
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = k * dt_ms;
        if (traj.keyframes.size() < 2) {
            pos[k] = traj.keyframes.empty() ? 0.0 : traj.keyframes.front().position_rad;
            continue;
        }
        while (seg + 2 < traj.keyframes.size() && traj.keyframes[seg + 1].time_ms < t) ++seg;
        const Keyframe& a = traj.keyframes[seg];
        const Keyframe& b = traj.keyframes[seg + 1];
        double u = std::clamp((t - a.time_ms) / (b.time_ms - a.time_ms), 0.0, 1.0);
        if (traj.segments[seg] == Interp::Smooth) u = u * u * (3.0 - 2.0 * u);
        pos[k] = a.position_rad + (b.position_rad - a.position_rad) * u;
    }

    constexpr double kTol = 1e-9;
    const double dt_s = dt_ms / 1000.0;

    for (std::size_t k = 0; k <= steps; ++k) {
        if (pos[k] < spec.position_min_rad - kTol || pos[k] > spec.position_max_rad + kTol) {
            report.violations.push_back({ViolationKind::Position, k * dt_ms, pos[k],
                                         pos[k] < spec.position_min_rad
                                             ? spec.position_min_rad
                                             : spec.position_max_rad});
        }
    }
    if (pos.size() >= 2) {
        for (std::size_t k = 0; k < pos.size(); ++k) {
            double v;
            if (k == 0) {
                v = (pos[1] - pos[0]) / dt_s;
            } else if (k == pos.size() - 1) {
                v = (pos[k] - pos[k - 1]) / dt_s;
            } else {
                v = (pos[k + 1] - pos[k - 1]) / (2.0 * dt_s);
            }
            report.max_abs_velocity_rad_s = std::max(report.max_abs_velocity_rad_s, std::abs(v));
            if (std::abs(v) > spec.max_velocity_rad_s + kTol) {
                report.violations.push_back(
                    {ViolationKind::Velocity, k * dt_ms, v, spec.max_velocity_rad_s});
            }
        }
    }
    if (pos.size() >= 3) {
        for (std::size_t k = 0; k < pos.size(); ++k) {
            const std::size_t c = std::min(std::max<std::size_t>(k, 1), pos.size() - 2);
            const double a = (pos[c + 1] - 2.0 * pos[c] + pos[c - 1]) / (dt_s * dt_s);
            report.max_abs_acceleration_rad_s2 =
                std::max(report.max_abs_acceleration_rad_s2, std::abs(a));
            if (std::abs(a) > spec.max_acceleration_rad_s2 + kTol) {
                report.violations.push_back(
                    {ViolationKind::Acceleration, k * dt_ms, a, spec.max_acceleration_rad_s2});
            }
        }
    }
    return report;
}

}  // namespace detail

/// Kinematic check of a gesture plan alone (sync error taken as given).
inline SimReport simulate_plan(const GesturePlan& plan, const RobotModel& robot, double dt_ms,
                               double sync_error_ms = 0.0) {
    if (!(dt_ms > 0.0) || dt_ms > 10.0) throw Error("dt must lie in (0, 10] ms");
    SimReport report;
    report.sync_error_ms = sync_error_ms;
    for (const DofTrajectory& traj : plan.trajectories) {
        const DofSpec* spec = robot.find(traj.dof_id);
        if (spec == nullptr) throw Error("plan references unknown DoF " + traj.dof_id);
        report.dofs.push_back(detail::simulate_trajectory(traj, *spec, dt_ms));
    }
    report.pass = report.violation_count() == 0 && report.sync_error_ms <= kSyncToleranceMs;
    return report;
}

/// Full timeline simulation: kinematics of every trajectory plus the
/// gesture-to-voice synchronization error.
inline SimReport simulate(const Timeline& timeline, const RobotModel& robot, double dt_ms) {
    return simulate_plan(timeline.gesture, robot, dt_ms, timeline.sync_error_ms());
}

inline nlohmann::json to_json(const SimReport& report) {
    nlohmann::json dofs = nlohmann::json::array();
    for (const DofReport& d : report.dofs) {
        nlohmann::json violations = nlohmann::json::array();
        for (const Violation& v : d.violations) {
            violations.push_back({{"kind", to_string(v.kind)},
                                  {"time_ms", v.time_ms},
                                  {"value", v.value},
                                  {"limit", v.limit}});
        }
        dofs.push_back({{"dof", d.dof_id},
                        {"max_abs_velocity_rad_s", d.max_abs_velocity_rad_s},
                        {"max_abs_acceleration_rad_s2", d.max_abs_acceleration_rad_s2},
                        {"violations", std::move(violations)}});
    }
    return {{"pass", report.pass},
            {"sync_error_ms", report.sync_error_ms},
            {"dofs", std::move(dofs)}};
}

inline std::string to_text(const SimReport& report) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "sim: %s  sync_error=%.3f ms  violations=%zu\n",
                  report.pass ? "PASS" : "FAIL", report.sync_error_ms,
                  report.violation_count());
    out += buf;
    for (const DofReport& d : report.dofs) {
        std::snprintf(buf, sizeof buf, "  %-10s max|v|=%8.3f rad/s  max|a|=%10.3f rad/s^2  %zu violation(s)\n",
                      d.dof_id.c_str(), d.max_abs_velocity_rad_s, d.max_abs_acceleration_rad_s2,
                      d.violations.size());
        out += buf;
        for (const Violation& v : d.violations) {
            std::snprintf(buf, sizeof buf, "    %-12s t=%9.3f ms  value=%10.4f  limit=%10.4f\n",
                          to_string(v.kind), v.time_ms, v.value, v.limit);
            out += buf;
        }
    }
    return out;
}

}  // namespace musegest
