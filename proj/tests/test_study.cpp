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

#include "musegest/study.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <map>
#include <set>

#include "helpers.hpp"
#include "musegest/stats.hpp"

using namespace musegest;
using Catch::Approx;

namespace {

std::map<Quadrant, std::vector<Phrase>> phrase_pool(int per_quadrant, std::uint64_t seed) {
    std::map<Quadrant, std::vector<Phrase>> pool;
    SplitMix64 rng(seed);
    for (Quadrant q : kAllQuadrants) {
        for (int i = 0; i < per_quadrant; ++i) {
            Phrase p = testutil::random_phrase(rng, 6);
            p.quadrant = q;
            pool[q].push_back(std::move(p));
        }
    }
    return pool;
}

SampleBank small_bank() {
    return SampleBank({{0, 60, 250.0}, {1, 64, 300.0}, {4, 55, 350.0}, {9, 70, 200.0}});
}

}  // namespace

TEST_CASE("build_stimuli reproduces the 5x4x2 grid", "[study]") {
    const auto pool = phrase_pool(3, 21);
    const RobotModel robot = testutil::test_robot();
    const SampleBank bank = small_bank();
    const StimulusSet set = build_stimuli(pool, robot, bank, 12345);

    REQUIRE(set.stimuli.size() == 40);

    std::map<Condition, int> per_condition;
    std::map<std::pair<Condition, Quadrant>, int> per_cell;
    std::set<std::string> ids;
    for (const Stimulus& s : set.stimuli) {
        per_condition[s.condition] += 1;
        per_cell[{s.condition, s.quadrant}] += 1;
        ids.insert(s.id);
    }
    CHECK(ids.size() == 40);  // unique ids
    for (Condition c : kAllConditions) {
        CHECK(per_condition[c] == 8);
        for (Quadrant q : kAllQuadrants) CHECK((per_cell[{c, q}]) == 2);
    }

    SECTION("condition structure: audio and gesture presence") {
        for (const Stimulus& s : set.stimuli) {
            CHECK(s.render.has_value() == condition_has_audio(s.condition));
            CHECK(s.gesture.has_value() == condition_has_gesture(s.condition));
            if (s.gesture) {
                CHECK((s.gesture->source == PlanSource::Stochastic) ==
                      condition_is_stochastic(s.condition));
                CHECK(s.gesture->duration_ms == Approx(s.phrase.total_duration_ms()));
            }
            CHECK(s.phrase.quadrant == s.quadrant);
        }
    }

    SECTION("deterministic under the master seed") {
        const StimulusSet again = build_stimuli(pool, robot, bank, 12345);
        REQUIRE(again.stimuli.size() == set.stimuli.size());
        for (std::size_t i = 0; i < set.stimuli.size(); ++i) {
            CHECK(again.stimuli[i].id == set.stimuli[i].id);
            CHECK(again.stimuli[i].phrase == set.stimuli[i].phrase);
            CHECK(again.stimuli[i].gesture == set.stimuli[i].gesture);
            CHECK(again.stimuli[i].render == set.stimuli[i].render);
        }
        const StimulusSet other = build_stimuli(pool, robot, bank, 54321);
        bool differs = false;
        for (std::size_t i = 0; i < set.stimuli.size(); ++i)
            differs = differs || !(other.stimuli[i].phrase == set.stimuli[i].phrase);
        CHECK(differs);
    }

    SECTION("stochastic plans are seeded by the stimulus id") {
        for (const Stimulus& s : set.stimuli) {
            if (s.gesture && s.gesture->source == PlanSource::Stochastic) {
                const GesturePlan expected =
                    stochastic_gesture(s.id, s.phrase.total_duration_ms(), robot);
                CHECK(*s.gesture == expected);
            }
        }
    }
}

TEST_CASE("build_stimuli requires two phrases per quadrant", "[study]") {
    auto pool = phrase_pool(2, 22);
    pool[Quadrant::Sad].pop_back();
    CHECK_THROWS_AS(build_stimuli(pool, testutil::test_robot(), small_bank(), 1),
                    InsufficientPhrases);
}

TEST_CASE("presentation order is a seeded permutation", "[study]") {
    const StimulusSet set =
        build_stimuli(phrase_pool(2, 23), testutil::test_robot(), small_bank(), 99);

    const auto order1 = presentation_order(set, 7);
    const auto order2 = presentation_order(set, 7);
    CHECK(order1 == order2);

    std::set<std::string> seen(order1.begin(), order1.end());
    CHECK(order1.size() == 40);
    CHECK(seen.size() == 40);
    for (const Stimulus& s : set.stimuli) CHECK(seen.count(s.id) == 1);

    const auto order3 = presentation_order(set, 8);
    CHECK(order1 != order3);
}

TEST_CASE("confusion matrix tallies trials", "[study]") {
    SECTION("all-correct predictions are diagonal") {
        std::vector<TrialRecord> trials;
        for (Quadrant q : kAllQuadrants)
            trials.push_back({"p1", "s", q, q});
        const ConfusionMatrix m = confusion_matrix(trials);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c)
                CHECK(m.at(r, c) == (r == c ? 1u : 0u));
    }
    SECTION("everything predicted happy lands in one column") {
        std::vector<TrialRecord> trials;
        for (Quadrant q : kAllQuadrants)
            trials.push_back({"p1", "s", q, Quadrant::Happy});
        const ConfusionMatrix m = confusion_matrix(trials);
        for (std::size_t r = 0; r < 4; ++r) CHECK(m.at(r, 0) == 1);
        CHECK(m.col_sum(0) == 4);
        CHECK(m.total() == 4);
    }
    SECTION("empty trials throw") {
        CHECK_THROWS_AS(confusion_matrix({}), EmptyTrials);
    }
    SECTION("random fixture equals an independent tally") {
        SplitMix64 rng(2025);
        std::vector<TrialRecord> trials;
        std::uint64_t oracle[4][4] = {};
        for (int i = 0; i < 200; ++i) {
            const auto truth = static_cast<std::size_t>(rng.next_below(4));
            const auto pred = static_cast<std::size_t>(rng.next_below(4));
            oracle[truth][pred] += 1;
            trials.push_back({"p", "s", static_cast<Quadrant>(truth),
                              static_cast<Quadrant>(pred)});
        }
        const ConfusionMatrix m = confusion_matrix(trials);
        CHECK(m.total() == 200);
        for (std::size_t r = 0; r < 4; ++r) {
            std::uint64_t row = 0;
            for (std::size_t c = 0; c < 4; ++c) {
                CHECK(m.at(r, c) == oracle[r][c]);
                row += oracle[r][c];
            }
            CHECK(m.row_sum(r) == row);
        }
    }
}

TEST_CASE("macro F1", "[study]") {
    SECTION("perfect diagonal gives 1.0") {
        ConfusionMatrix m(4);
        for (std::size_t c = 0; c < 4; ++c) m.add(c, c, 5);
        CHECK(f1_macro(m) == Approx(1.0));
        CHECK(f1_micro(m) == Approx(1.0));
    }
    SECTION("a class absent from both axes is excluded from the mean") {
        ConfusionMatrix m(4);
        m.add(0, 0, 4);
        m.add(1, 1, 4);
        m.add(2, 2, 4);  // class 3 never true, never predicted
        CHECK(f1_macro(m) == Approx(1.0));
    }
    SECTION("hand-computed two-class fixture") {
        // [[5,1],[2,4]]: per-class F1 (0.769231, 0.727273), macro 0.748252
        ConfusionMatrix m(2);
        m.add(0, 0, 5);
        m.add(0, 1, 1);
        m.add(1, 0, 2);
        m.add(1, 1, 4);
        const auto f1 = per_class_f1(m);
        CHECK(f1[0] == Approx(10.0 / 13.0).epsilon(1e-6));
        CHECK(f1[1] == Approx(8.0 / 11.0).epsilon(1e-6));
        CHECK(f1_macro(m) == Approx(0.5 * (10.0 / 13.0 + 8.0 / 11.0)).epsilon(1e-9));
        CHECK(f1_micro(m) == Approx(9.0 / 12.0));
    }
}

TEST_CASE("t-test matches the reference oracle", "[study][stats]") {
    SECTION("identical lists give t = 0, p = 1") {
        const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
        for (TTestVariant v : {TTestVariant::Welch, TTestVariant::Pooled}) {
            const TTestResult r = t_test_two_sided(xs, xs, v);
            CHECK(r.t == Approx(0.0));
            CHECK(r.p == Approx(1.0));
        }
    }
    SECTION("pooled textbook example") {
        const std::vector<double> a = {1.0, 2.0, 3.0};
        const std::vector<double> b = {2.0, 3.0, 4.0};
        const TTestResult r = t_test_two_sided(a, b, TTestVariant::Pooled);
        CHECK(r.t == Approx(-1.224745).margin(1e-6));
        CHECK(r.df == Approx(4.0));
        CHECK(r.p == Approx(0.287864).margin(1e-6));
    }
    SECTION("ten frozen random-normal fixtures, both variants") {
        struct Fixture {
            std::vector<double> a, b;
            double t_pooled, df_pooled, p_pooled;
            double t_welch, df_welch, p_welch;
        };
        // expected values computed with an independent reference
        // statistics package and frozen
        const std::vector<Fixture> fixtures = {
            {{-1.528711, -0.11782, -0.09294, -1.729576, -0.591068, 0.191169, 6.815865, 2.176543, -3.267209, 0.225336, 5.408747},
             {1.094732, 0.680472, 1.384486, -2.144089, 0.210581, -1.566185},
             0.556076216154297, 15, 0.586358729024343, 0.676234880606468, 14.9184419977167, 0.509240392606487},
            {{-1.251241, -1.391339, -1.77622, -1.473216, -0.871777, -1.516039, -2.09473, -1.153834, -1.68757},
             {-1.106424, 1.157702, 3.363233, 1.730285, 3.657914, 1.076585, 3.480721, 0.943206, 3.818589},
             -6.08802110742608, 16, 1.569170613439e-05, -6.08802110742608, 8.74155450421776, 0.000204911189223172},
            {{4.092531, -3.162161, -0.315815, 0.389936, -1.202112, 2.174037, 2.079426, 4.013296, 3.626962},
             {0.362259, -0.873983, 1.88106, 1.609485, 1.174356},
             0.387417087873651, 12, 0.705231182432037, 0.47767377051657, 11.6932585627697, 0.64168719114166},
            {{-5.609466, -2.46146, -3.722508, -1.2819, -2.420448},
             {2.073582, 1.098342, 2.364887, 0.180389, 0.076044},
             -4.87048315248007, 8, 0.00123921266902531, -4.87048315248007, 6.79545407847809, 0.00197177205197445},
            {{-2.873017, -1.668211, -2.394536, 0.673687, -0.825153, -1.465113, -1.718652},
             {1.404711, -0.039696, -2.847966, 3.285542, 2.63048, 0.653121, -2.121649, -3.503142, -1.277002, 0.11816},
             -1.38395965333486, 15, 0.186618625918133, -1.54643179674202, 13.9901196221729, 0.144317469905045},
            {{0.624728, -0.519735, -1.643527, 0.592708, -1.928671, -3.224891, -0.856545, 3.417669, -2.208053, -0.259409},
             {-0.954516, -0.91491, -1.245088, 0.757309, 0.878197, 1.137763},
             -0.643305086574592, 14, 0.530422984851615, -0.734330035155737, 13.9995485036374, 0.474868348461004},
            {{1.213398, 2.401266, 0.451342, 0.765096, 2.632424, 1.026752},
             {-3.721765, 0.117953, 0.661065, -4.994645, -1.176906, -0.341934, -0.671659, 0.141549, -3.543031, -2.713047, -1.770742},
             3.74119897475359, 15, 0.00196604829077174, 4.55376759023939, 14.909024595768, 0.000386020039966007},
            {{1.132552, 0.126839, -0.160438, -0.156195, 1.685187, -0.943431, -0.382579, 0.452596},
             {-2.569926, -2.283784, -2.005641, -0.944655, -2.476815, -2.085524, -1.008563, -2.290943, -1.713818, -2.272678},
             6.50868421402208, 16, 7.20794497676975e-06, 6.22775965937656, 11.8263042833855, 4.69266801364398e-05},
            {{0.506195, 0.053082, -2.179987, 0.650707, 2.19793, 1.551867},
             {2.079773, 2.983662, 0.858179, -0.280035, 0.552974, 3.308469},
             -1.31967436576615, 10, 0.21635686032366, -1.31967436576615, 9.97215014953663, 0.216436735988521},
            {{-2.960226, -2.47981, -4.257743, 0.852065},
             {0.49339, -2.258996, -4.545901, -2.259648, -4.814952, -4.896977, -6.047352, -4.552206},
             1.07089288054053, 10, 0.30938294893582, 1.05969148509384, 5.93467538287712, 0.330496196005574},
        };
        for (const Fixture& f : fixtures) {
            const TTestResult pooled = t_test_two_sided(f.a, f.b, TTestVariant::Pooled);
            CHECK(pooled.t == Approx(f.t_pooled).margin(1e-9));
            CHECK(pooled.df == Approx(f.df_pooled).margin(1e-9));
            CHECK(pooled.p == Approx(f.p_pooled).margin(1e-6));

            const TTestResult welch = t_test_two_sided(f.a, f.b, TTestVariant::Welch);
            CHECK(welch.t == Approx(f.t_welch).margin(1e-9));
            CHECK(welch.df == Approx(f.df_welch).margin(1e-9));
            CHECK(welch.p == Approx(f.p_welch).margin(1e-6));
        }
    }
}

TEST_CASE("t-test symmetry and scale invariance", "[study][stats][property]") {
    SplitMix64 rng(3030);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> a, b;
        const int n1 = 3 + static_cast<int>(rng.next_below(10));
        const int n2 = 3 + static_cast<int>(rng.next_below(10));
        for (int k = 0; k < n1; ++k) a.push_back(rng.next_double() * 10.0 - 5.0);
        for (int k = 0; k < n2; ++k) b.push_back(rng.next_double() * 10.0 - 3.0);

        for (TTestVariant v : {TTestVariant::Welch, TTestVariant::Pooled}) {
            const TTestResult fwd = t_test_two_sided(a, b, v);
            const TTestResult rev = t_test_two_sided(b, a, v);
            CHECK(rev.t == Approx(-fwd.t).margin(1e-12));
            CHECK(rev.p == Approx(fwd.p).margin(1e-12));

            const double c = 0.5 + rng.next_double() * 9.5;
            std::vector<double> ac = a, bc = b;
            for (double& x : ac) x *= c;
            for (double& x : bc) x *= c;
            const TTestResult scaled = t_test_two_sided(ac, bc, v);
            CHECK(scaled.t == Approx(fwd.t).margin(1e-9));
            CHECK(scaled.p == Approx(fwd.p).margin(1e-9));
        }
    }
}

TEST_CASE("t-test degenerate cases", "[study][stats]") {
    CHECK_THROWS_AS(t_test_two_sided(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
                    DegenerateSample);
    CHECK_THROWS_AS(t_test_two_sided(std::vector<double>{}, std::vector<double>{1.0, 2.0}),
                    DegenerateSample);

    // zero variance in both groups
    const std::vector<double> flat1 = {2.0, 2.0, 2.0};
    const std::vector<double> flat2 = {2.0, 2.0};
    const TTestResult equal = t_test_two_sided(flat1, flat2, TTestVariant::Pooled);
    CHECK(equal.t == 0.0);
    CHECK(equal.p == 1.0);

    const std::vector<double> flat3 = {3.0, 3.0};
    const TTestResult separated = t_test_two_sided(flat1, flat3, TTestVariant::Pooled);
    CHECK(separated.p == 0.0);
}

TEST_CASE("student t CDF and incomplete beta sanity", "[study][stats]") {
    CHECK(student_t_cdf(0.0, 7.0) == Approx(0.5));
    CHECK(student_t_cdf(100.0, 7.0) == Approx(1.0).margin(1e-9));
    CHECK(student_t_cdf(-3.0, 9.0) == Approx(1.0 - student_t_cdf(3.0, 9.0)).margin(1e-12));
    // I_x(1, 1) is the identity
    for (double x : {0.1, 0.25, 0.5, 0.9}) CHECK(incomplete_beta(1.0, 1.0, x) == Approx(x));
    CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
}

TEST_CASE("trust mean", "[study]") {
    TrustSurvey s;
    s.participant = "p1";
    s.group = SurveyGroup::ShimiVoice;

    SECTION("all fifty") {
        s.items.fill(50.0);
        CHECK(trust_mean(s) == Approx(50.0));
    }
    SECTION("alternating extremes") {
        for (std::size_t i = 0; i < kTrustItemCount; ++i) s.items[i] = i % 2 == 0 ? 0.0 : 100.0;
        CHECK(trust_mean(s) == Approx(50.0));
    }
    SECTION("hand-summed fixture") {
        double sum = 0.0;
        for (std::size_t i = 0; i < kTrustItemCount; ++i) {
            s.items[i] = static_cast<double>((i * 7) % 101);
            sum += s.items[i];
        }
        CHECK(trust_mean(s) == Approx(sum / 40.0));
    }
    SECTION("out-of-range item is rejected") {
        s.items.fill(50.0);
        s.items[13] = 140.0;
        CHECK_THROWS_AS(trust_mean(s), InvalidSurvey);
    }
}

TEST_CASE("CSV ingestion", "[study]") {
    SECTION("trials") {
        const std::string csv =
            "participant,stimulus,true,predicted\n"
            "p1,audio_only-happy-1,happy,happy\n"
            "p1,audio_only-sad-1,sad,calm\r\n"
            "p2,audio_only-happy-1,happy,angry\n";
        const auto trials = read_trials_csv(csv);
        REQUIRE(trials.size() == 3);
        CHECK(trials[1].truth == Quadrant::Sad);
        CHECK(trials[1].predicted == Quadrant::Calm);
        CHECK(trials[2].participant == "p2");

        CHECK_THROWS_AS(read_trials_csv("a,b,c\n"), Error);
        CHECK_THROWS_AS(read_trials_csv("participant,stimulus,true,predicted\np1,s\n"), Error);
    }
    SECTION("surveys") {
        std::string header = "participant,group";
        for (int i = 1; i <= 40; ++i) header += ",q" + std::to_string(i);
        std::string row = "p1,shimi_voice";
        for (int i = 0; i < 40; ++i) row += "," + std::to_string(50 + i % 3);
        const auto surveys = read_surveys_csv(header + "\n" + row + "\n");
        REQUIRE(surveys.size() == 1);
        CHECK(surveys[0].group == SurveyGroup::ShimiVoice);
        CHECK(trust_mean(surveys[0]) == Approx(51.0).margin(0.15));

        CHECK_THROWS_AS(read_surveys_csv("participant,group,q1\np1,tts,50\n"), Error);
    }
}

TEST_CASE("analyze produces a combined report", "[study]") {
    std::vector<TrialRecord> trials;
    SplitMix64 rng(4040);
    for (int i = 0; i < 60; ++i) {
        const auto truth = static_cast<Quadrant>(rng.next_below(4));
        const auto pred = rng.next_below(5) == 0 ? static_cast<Quadrant>(rng.next_below(4)) : truth;
        trials.push_back({"p" + std::to_string(i % 6), "s", truth, pred});
    }
    std::vector<TrustSurvey> surveys;
    for (int i = 0; i < 8; ++i) {
        TrustSurvey s;
        s.participant = "p" + std::to_string(i);
        s.group = i < 4 ? SurveyGroup::ShimiVoice : SurveyGroup::Tts;
        s.items.fill(i < 4 ? 70.0 + i : 60.0 + i);
        surveys.push_back(std::move(s));
    }

    const nlohmann::json report = analyze(trials, surveys, TTestVariant::Welch);
    CHECK(report.at("classification").at("trials") == 60);
    CHECK(report.at("classification").at("f1_macro").get<double>() > 0.5);
    CHECK(report.at("trust").contains("t_test_welch"));
    CHECK(report.at("trust").contains("t_test_pooled"));
    CHECK(report.at("trust").at("shimi_voice").at("participants") == 4);
    CHECK(report.at("trust").at("mean_difference").get<double>() > 0.0);
}
