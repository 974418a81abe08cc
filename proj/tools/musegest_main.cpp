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

// Command-line front end wiring the pipeline stages together. Every
// subcommand reads and writes only its documented files; generative
// subcommands require an explicit seed so identical invocations always
// produce byte-identical artifacts.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "musegest/musegest.hpp"

namespace {

using nlohmann::json;

void write_json_or_print(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        musegest::write_text_file(out_path, text);
    }
}

musegest::Corpus load_corpus_for(const std::string& manifest_path, const std::string& ref_path,
                                 double threshold) {
    const auto manifest = musegest::CorpusManifest::load(manifest_path);
    if (!ref_path.empty()) {
        return musegest::load_corpus(manifest, musegest::ReferenceStats::load(ref_path),
                                     threshold);
    }
    return musegest::load_corpus(manifest, threshold);
}

musegest::EmotionPoint emotion_from_flags(const std::optional<double>& valence,
                                          const std::optional<double>& arousal,
                                          const std::string& quadrant) {
    if (!quadrant.empty()) {
        if (valence || arousal)
            throw musegest::Error("give either --quadrant or --valence/--arousal, not both");
        return musegest::centroid(musegest::quadrant_from_string(quadrant));
    }
    if (!valence || !arousal)
        throw musegest::Error("emotion required: --valence and --arousal, or --quadrant");
    return {*valence, *arousal};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"music-driven emotional prosody and gesture pipeline"};
    app.require_subcommand(1);

    // --- validate ---------------------------------------------------------
    std::string v_manifest, v_ref, v_out;
    double v_threshold = 2.5;
    auto* validate = app.add_subcommand("validate", "validate a tagged corpus against reference stats");
    validate->add_option("--manifest", v_manifest, "corpus manifest JSON")->required();
    validate->add_option("--ref", v_ref, "reference stats JSON (defaults to the manifest's)");
    validate->add_option("--threshold", v_threshold, "max z-score per prosody field");
    validate->add_option("--out", v_out, "validation report output path (stdout if omitted)");

    // --- train ------------------------------------------------------------
    std::string t_manifest, t_ref, t_quadrant, t_out;
    double t_threshold = 2.5;
    int t_order = 2;
    auto* train_cmd = app.add_subcommand("train", "train a phrase model for one quadrant");
    train_cmd->add_option("--manifest", t_manifest, "corpus manifest JSON")->required();
    train_cmd->add_option("--ref", t_ref, "reference stats JSON (defaults to the manifest's)");
    train_cmd->add_option("--threshold", t_threshold, "max z-score per prosody field");
    train_cmd->add_option("--quadrant", t_quadrant, "happy|angry|sad|calm")->required();
    train_cmd->add_option("--order", t_order, "Markov context length");
    train_cmd->add_option("--out", t_out, "model output path")->required();

    // --- generate ---------------------------------------------------------
    std::string g_model, g_out;
    std::uint64_t g_seed = 0;
    double g_duration = 0.0;
    int g_tpq = 480;
    double g_bpm = 120.0;
    auto* generate = app.add_subcommand("generate", "sample a phrase from a trained model");
    generate->add_option("--model", g_model, "model JSON")->required();
    generate->add_option("--seed", g_seed, "PRNG seed")->required();
    generate->add_option("--duration", g_duration, "target duration in ms")->required();
    generate->add_option("--out", g_out, "phrase output (.json or .mid)")->required();
    generate->add_option("--tpq", g_tpq, "ticks per quarter for .mid output");
    generate->add_option("--bpm", g_bpm, "tempo for .mid output");

    // --- features ---------------------------------------------------------
    std::string f_phrase, f_out;
    auto* features = app.add_subcommand("features", "extract musical features from a phrase");
    features->add_option("--phrase", f_phrase, "phrase file (.json or .mid)")->required();
    features->add_option("--out", f_out, "feature output path (stdout if omitted)");

    // --- gesture ----------------------------------------------------------
    std::string ge_phrase, ge_robot, ge_quadrant, ge_out, ge_csv;
    std::optional<double> ge_valence, ge_arousal;
    auto* gesture = app.add_subcommand("gesture", "generate an emotion-conditioned gesture plan");
    gesture->add_option("--phrase", ge_phrase, "phrase file (.json or .mid)")->required();
    gesture->add_option("--robot", ge_robot, "robot model JSON")->required();
    gesture->add_option("--valence", ge_valence, "valence in [-1, 1]");
    gesture->add_option("--arousal", ge_arousal, "arousal in [-1, 1]");
    gesture->add_option("--quadrant", ge_quadrant, "use the quadrant centroid emotion");
    gesture->add_option("--out", ge_out, "gesture plan output path")->required();
    gesture->add_option("--csv", ge_csv, "optional keyframe CSV output path");

    // --- stochastic -------------------------------------------------------
    std::string st_id, st_robot, st_out, st_csv;
    double st_duration = 0.0;
    auto* stochastic = app.add_subcommand("stochastic", "build the deterministic stochastic baseline gesture");
    stochastic->add_option("--id", st_id, "stimulus id (seeds the stream)")->required();
    stochastic->add_option("--duration", st_duration, "plan duration in ms")->required();
    stochastic->add_option("--robot", st_robot, "robot model JSON")->required();
    stochastic->add_option("--out", st_out, "gesture plan output path")->required();
    stochastic->add_option("--csv", st_csv, "optional keyframe CSV output path");

    // --- render -----------------------------------------------------------
    std::string r_phrase, r_bank, r_out, r_wav;
    std::uint64_t r_seed = 0;
    int r_rate = 44100;
    auto* render = app.add_subcommand("render", "plan sample playback for a phrase");
    render->add_option("--phrase", r_phrase, "phrase file (.json or .mid)")->required();
    render->add_option("--bank", r_bank, "sample bank JSON")->required();
    render->add_option("--seed", r_seed, "PRNG seed for sample selection")->required();
    render->add_option("--out", r_out, "render plan output path")->required();
    render->add_option("--wav", r_wav, "optional preview WAV output path");
    render->add_option("--rate", r_rate, "preview sample rate (22050|44100|48000)");

    // --- simulate ---------------------------------------------------------
    std::string si_gesture, si_render, si_robot, si_out;
    double si_dt = 5.0;
    auto* simulate_cmd = app.add_subcommand("simulate", "check a timeline against the robot's kinematic limits");
    simulate_cmd->add_option("--gesture", si_gesture, "gesture plan JSON")->required();
    simulate_cmd->add_option("--render", si_render, "render plan JSON (omit for gesture-only)");
    simulate_cmd->add_option("--robot", si_robot, "robot model JSON")->required();
    simulate_cmd->add_option("--dt", si_dt, "sampling step in ms, at most 10");
    simulate_cmd->add_option("--out", si_out, "report JSON output path");

    // --- stimuli ----------------------------------------------------------
    std::string sm_manifest, sm_ref, sm_robot, sm_bank, sm_outdir;
    double sm_threshold = 2.5;
    std::uint64_t sm_seed = 0;
    auto* stimuli = app.add_subcommand("stimuli", "build the 40-stimulus study grid");
    stimuli->add_option("--manifest", sm_manifest, "corpus manifest JSON")->required();
    stimuli->add_option("--ref", sm_ref, "reference stats JSON (defaults to the manifest's)");
    stimuli->add_option("--threshold", sm_threshold, "max z-score per prosody field");
    stimuli->add_option("--robot", sm_robot, "robot model JSON")->required();
    stimuli->add_option("--bank", sm_bank, "sample bank JSON")->required();
    stimuli->add_option("--seed", sm_seed, "master seed")->required();
    stimuli->add_option("--out-dir", sm_outdir, "output directory")->required();

    // --- analyze ----------------------------------------------------------
    std::string a_trials, a_surveys, a_variant = "welch", a_out, a_confusion_csv;
    auto* analyze_cmd = app.add_subcommand("analyze", "study statistics: confusion, F1, trust t-tests");
    analyze_cmd->add_option("--trials", a_trials, "trials CSV (participant,stimulus,true,predicted)");
    analyze_cmd->add_option("--surveys", a_surveys, "surveys CSV (participant,group,q1..q40)");
    analyze_cmd->add_option("--variant", a_variant, "headline t-test variant: welch|pooled");
    analyze_cmd->add_option("--out", a_out, "analysis JSON output path (stdout if omitted)");
    analyze_cmd->add_option("--confusion-csv", a_confusion_csv, "optional confusion matrix CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    }

    try {
        if (*validate) {
            const auto corpus = load_corpus_for(v_manifest, v_ref, v_threshold);
            write_json_or_print(musegest::validation_report_json(corpus, v_threshold), v_out);
            std::cerr << "accepted " << corpus.accepted_count() << ", rejected "
                      << corpus.rejected.size() << "\n";
        } else if (*train_cmd) {
            const auto corpus = load_corpus_for(t_manifest, t_ref, t_threshold);
            const auto model = musegest::train(
                corpus, musegest::quadrant_from_string(t_quadrant), t_order);
            musegest::write_text_file(t_out, musegest::to_json(model).dump(2) + "\n");
            std::cerr << "trained order-" << t_order << " model on "
                      << corpus.phrases(model.quadrant).size() << " phrases\n";
        } else if (*generate) {
            const auto model = musegest::model_from_json(
                json::parse(musegest::read_text_file(g_model)));
            const auto phrase = musegest::sample(model, g_seed, g_duration);
            musegest::save_phrase(phrase, g_out, g_tpq, g_bpm);
            std::cerr << "generated " << phrase.size() << " notes over "
                      << phrase.total_duration_ms() << " ms\n";
        } else if (*features) {
            const auto phrase = musegest::load_phrase(f_phrase);
            write_json_or_print(musegest::to_json(musegest::extract_features(phrase)), f_out);
        } else if (*gesture) {
            const auto phrase = musegest::load_phrase(ge_phrase);
            const auto robot = musegest::RobotModel::load(ge_robot);
            const auto emotion = emotion_from_flags(ge_valence, ge_arousal, ge_quadrant);
            const auto plan = musegest::generate_gesture(
                phrase, musegest::extract_features(phrase), emotion, robot);
            musegest::write_text_file(ge_out, musegest::to_json(plan).dump(2) + "\n");
            if (!ge_csv.empty()) musegest::write_text_file(ge_csv, musegest::to_csv(plan));
        } else if (*stochastic) {
            const auto robot = musegest::RobotModel::load(st_robot);
            const auto plan = musegest::stochastic_gesture(st_id, st_duration, robot);
            musegest::write_text_file(st_out, musegest::to_json(plan).dump(2) + "\n");
            if (!st_csv.empty()) musegest::write_text_file(st_csv, musegest::to_csv(plan));
        } else if (*render) {
            const auto phrase = musegest::load_phrase(r_phrase);
            const auto bank = musegest::SampleBank::load(r_bank);
            const auto plan = musegest::build_render_plan(phrase, bank, r_seed);
            musegest::write_text_file(r_out, musegest::to_json(plan).dump(2) + "\n");
            if (!r_wav.empty()) {
                const auto buffer = musegest::preview_synth(plan, bank, r_rate);
                musegest::write_file_bytes(r_wav, musegest::wav_pcm16_mono(buffer, r_rate));
            }
        } else if (*simulate_cmd) {
            const auto robot = musegest::RobotModel::load(si_robot);
            const auto plan = musegest::gesture_plan_from_json(
                json::parse(musegest::read_text_file(si_gesture)));
            musegest::SimReport report;
            if (!si_render.empty()) {
                const auto voice = musegest::render_plan_from_json(
                    json::parse(musegest::read_text_file(si_render)));
                report = musegest::simulate(musegest::merge(plan, voice), robot, si_dt);
            } else {
                report = musegest::simulate_plan(plan, robot, si_dt);
            }
            std::cout << musegest::to_text(report);
            if (!si_out.empty())
                musegest::write_text_file(si_out, musegest::to_json(report).dump(2) + "\n");
            if (!report.pass) return 1;
        } else if (*stimuli) {
            const auto corpus = load_corpus_for(sm_manifest, sm_ref, sm_threshold);
            const auto robot = musegest::RobotModel::load(sm_robot);
            const auto bank = musegest::SampleBank::load(sm_bank);
            const auto set = musegest::build_stimuli(corpus.accepted, robot, bank, sm_seed);

            json stimuli_json = json::array();
            for (const auto& s : set.stimuli) {
                json sj = {{"id", s.id},
                           {"condition", musegest::to_string(s.condition)},
                           {"quadrant", std::string(musegest::to_string(s.quadrant))},
                           {"phrase", musegest::phrase_to_json(s.phrase)},
                           {"gesture_plan", s.gesture ? musegest::to_json(*s.gesture)
                                                      : json(nullptr)},
                           {"render_plan", s.render ? musegest::to_json(*s.render)
                                                    : json(nullptr)}};
                stimuli_json.push_back(std::move(sj));
            }
            std::filesystem::create_directories(sm_outdir);
            musegest::write_text_file(
                sm_outdir + "/stimuli.json",
                json{{"master_seed", set.master_seed}, {"stimuli", std::move(stimuli_json)}}
                        .dump(2) +
                    "\n");
            std::cerr << "built " << set.stimuli.size() << " stimuli\n";
        } else if (*analyze_cmd) {
            std::vector<musegest::TrialRecord> trials;
            std::vector<musegest::TrustSurvey> surveys;
            if (!a_trials.empty())
                trials = musegest::read_trials_csv(musegest::read_text_file(a_trials));
            if (!a_surveys.empty())
                surveys = musegest::read_surveys_csv(musegest::read_text_file(a_surveys));
            if (trials.empty() && surveys.empty())
                throw musegest::Error("analyze needs --trials and/or --surveys");
            const auto report = musegest::analyze(
                trials, surveys, musegest::t_test_variant_from_string(a_variant));
            write_json_or_print(report, a_out);
            if (!a_confusion_csv.empty() && !trials.empty())
                musegest::write_text_file(a_confusion_csv,
                                          musegest::confusion_csv(musegest::confusion_matrix(trials)));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
