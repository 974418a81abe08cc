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
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "musegest/corpus.hpp"
#include "musegest/error.hpp"
#include "musegest/phrase.hpp"
#include "musegest/rng.hpp"

namespace musegest {

// ---------------------------------------------------------------------------
// Symbolic phrase generation: phrases are tokenized into a finite vocabulary
// of (pitch-or-rest, duration class, velocity class) symbols, and new
// quadrant-conditioned phrases are sampled from an order-k Markov model
// trained on an accepted corpus. The model sits behind a small generator
// interface so a heavier sequence model can be slotted in unchanged.
// ---------------------------------------------------------------------------

struct EmptyQuadrantCorpus : Error { using Error::Error; };
struct TargetOutOfBounds : Error { using Error::Error; };
struct GenerationFailed : Error { using Error::Error; };

inline constexpr int kRestPitch = 128;

/// 16 geometric duration bins spanning 50..2000 ms. The tables are frozen as
/// literals (edge_i = 50 * 40^(i/16), representative = geometric bin mean) so
/// tokenization never touches libm and is bit-identical everywhere.
inline constexpr std::array<double, 17> kDurationBinEdgesMs = {
    50.0,
    62.96493419231937,
    79.29165875686218,
    99.8518815125134,
    125.74334296829355,
    158.34842630241695,
    199.4079648317803,
    251.1141876611476,
    316.22776601683796,
    398.22520954068733,
    501.4844822490394,
    631.5187484656022,
    795.2707287670506,
    1001.4833820379042,
    1261.1667048943614,
    1588.1855715843544,
    2000.0};

inline constexpr std::array<double, 16> kDurationBinRepMs = {
    56.10923907536056,
    70.65829091922384,
    88.97989275741372,
    112.05226183820379,
    141.10726585486083,
    177.69619417218848,
    223.77258344554903,
    281.7965198138858,
    354.8659865141188,
    446.88226975907963,
    562.7582541418952,
    708.6807287645793,
    892.4407090005334,
    1123.8494102553084,
    1415.2620831760485,
    1782.2376786412942};

/// 8 uniform velocity bins over 1..127 (width 15.75), rounded bin centers.
inline constexpr std::array<int, 8> kVelocityBinRep = {9, 25, 40, 56, 72, 88, 103, 119};

inline int duration_class_of(double ms) {
    int k = 0;
    for (int i = 1; i < 16; ++i) {
        if (ms >= kDurationBinEdgesMs[i]) k = i;
    }
    return k;
}

inline int velocity_class_of(int velocity) {
    const int k = static_cast<int>((velocity - 1) / 15.75);
    return std::clamp(k, 0, 7);
}

struct PhraseToken {
    int pitch = 60;  // 0..127 or kRestPitch
    int duration_class = 0;
    int velocity_class = 0;

    bool is_rest() const { return pitch == kRestPitch; }
    auto operator<=>(const PhraseToken&) const = default;
};

using TokenSeq = std::vector<PhraseToken>;

/// One token per note, in onset order; inter-note gaps of at least 50 ms
/// become rest tokens carrying the gap's duration class.
inline TokenSeq tokenize(const Phrase& p) {
    if (p.empty()) throw EmptyPhrase();
    TokenSeq tokens;
    double prev_end = p.notes.front().onset_ms;
    for (const NoteEvent& n : p.notes) {
        const double gap = n.onset_ms - prev_end;
        if (gap >= kDurationBinEdgesMs.front()) {
            tokens.push_back({kRestPitch, duration_class_of(gap), 0});
        }
        tokens.push_back({n.pitch, duration_class_of(n.duration_ms),
                          velocity_class_of(n.velocity)});
        prev_end = n.onset_ms + n.duration_ms;
    }
    return tokens;
}

/// Inverse of tokenize up to bin quantization: notes are laid back-to-back
/// using the representative duration and velocity of each class.
inline Phrase detokenize(const TokenSeq& tokens,
                         std::optional<Quadrant> quadrant = std::nullopt) {
    std::vector<NoteEvent> notes;
    double cursor = 0.0;
    for (const PhraseToken& t : tokens) {
        const double dur = kDurationBinRepMs[static_cast<std::size_t>(t.duration_class)];
        if (!t.is_rest()) {
            notes.push_back({t.pitch, cursor, dur,
                             kVelocityBinRep[static_cast<std::size_t>(t.velocity_class)]});
        }
        cursor += dur;
    }
    return Phrase(std::move(notes), quadrant);
}

/// Order-k Markov model over phrase tokens. Transition tables are kept for
/// every context length 1..order so sampling can back off on dead ends.
/// All containers are ordered maps: iteration order, and therefore both
/// serialization and weighted drawing, are deterministic.
struct MarkovModel {
    Quadrant quadrant = Quadrant::Happy;
    int order = 2;
    std::vector<std::map<TokenSeq, std::map<PhraseToken, std::uint64_t>>> transitions;
    std::map<TokenSeq, std::uint64_t> start_contexts;

    /// Transitions at the model's full context length.
    const std::map<TokenSeq, std::map<PhraseToken, std::uint64_t>>& transition_table() const {
        return transitions.back();
    }

    /// Every token observed during training.
    std::vector<PhraseToken> vocabulary() const {
        std::map<PhraseToken, bool> seen;
        for (const auto& [ctx, count] : start_contexts)
            for (const PhraseToken& t : ctx) seen[t] = true;
        for (const auto& table : transitions)
            for (const auto& [ctx, successors] : table)
                for (const auto& [tok, n] : successors) seen[tok] = true;
        std::vector<PhraseToken> out;
        for (const auto& [tok, b] : seen) out.push_back(tok);
        return out;
    }
};

/// Counts every observed (context -> successor) pair in the accepted phrases
/// of one quadrant, for all context lengths up to `order`; each phrase's
/// opening context is tallied as a start context.
inline MarkovModel train(const Corpus& corpus, Quadrant q, int order = 2) {
    if (order < 1) throw Error("model order must be >= 1");
    const std::vector<Phrase>& phrases = corpus.phrases(q);
    if (phrases.empty())
        throw EmptyQuadrantCorpus("no accepted phrases for quadrant " +
                                  std::string(to_string(q)));

    MarkovModel model;
    model.quadrant = q;
    model.order = order;
    model.transitions.resize(static_cast<std::size_t>(order));

    for (const Phrase& p : phrases) {
        const TokenSeq tokens = tokenize(p);
        const std::size_t start_len = std::min<std::size_t>(tokens.size(), order);
        model.start_contexts[TokenSeq(tokens.begin(), tokens.begin() + start_len)] += 1;
        for (std::size_t len = 1; len <= static_cast<std::size_t>(order); ++len) {
            for (std::size_t i = len; i < tokens.size(); ++i) {
                TokenSeq ctx(tokens.begin() + (i - len), tokens.begin() + i);
                model.transitions[len - 1][std::move(ctx)][tokens[i]] += 1;
            }
        }
    }
    return model;
}

namespace detail {

template <typename Key>
const Key& draw_weighted(const std::map<Key, std::uint64_t>& dist, SplitMix64& rng) {
    std::uint64_t total = 0;
    for (const auto& [k, n] : dist) total += n;
    std::uint64_t x = rng.next_below(total);
    for (const auto& [k, n] : dist) {
        if (x < n) return k;
        x -= n;
    }
    return dist.rbegin()->first;  // unreachable for consistent counts
}

}  // namespace detail

/// Samples one phrase from a seeded deterministic stream. Tokens are drawn
/// from the start distribution and then the transition tables, backing off to
/// shorter context suffixes on dead ends; when even backoff fails before the
/// minimum admissible duration, a fresh start context is chained on. The
/// result always satisfies 100 <= total_duration_ms <= 6000 (the final note
/// is truncated at the ceiling) and carries the model's quadrant tag.
inline Phrase sample(const MarkovModel& model, std::uint64_t seed, double target_duration_ms) {
    if (target_duration_ms < kMinPhraseMs || target_duration_ms > kMaxPhraseMs)
        throw TargetOutOfBounds("target duration must lie in [100, 6000] ms");
    if (model.start_contexts.empty()) throw GenerationFailed("model has no start contexts");

    SplitMix64 rng(seed);
    std::vector<NoteEvent> notes;
    TokenSeq history;
    double cursor = 0.0;    // running token time
    double note_end = 0.0;  // end of the last emitted note

    auto emit = [&](const PhraseToken& t) {
        const double dur = kDurationBinRepMs[static_cast<std::size_t>(t.duration_class)];
        if (t.is_rest()) {
            // never let a rest run push the next onset past the target
            cursor = std::min(cursor + dur, target_duration_ms - 1.0);
        } else {
            notes.push_back({t.pitch, cursor, dur,
                             kVelocityBinRep[static_cast<std::size_t>(t.velocity_class)]});
            cursor += dur;
            note_end = cursor;
        }
        history.push_back(t);
        return note_end >= target_duration_ms;
    };

    bool done = false;
    for (const PhraseToken& t : detail::draw_weighted(model.start_contexts, rng)) {
        if ((done = emit(t))) break;
    }

    constexpr std::size_t kMaxTokens = 100000;
    while (!done && history.size() < kMaxTokens) {
        const std::map<PhraseToken, std::uint64_t>* successors = nullptr;
        const std::size_t max_len =
            std::min<std::size_t>(history.size(), static_cast<std::size_t>(model.order));
        for (std::size_t len = max_len; len >= 1; --len) {
            TokenSeq ctx(history.end() - static_cast<std::ptrdiff_t>(len), history.end());
            const auto& table = model.transitions[len - 1];
            if (auto it = table.find(ctx); it != table.end() && !it->second.empty()) {
                successors = &it->second;
                break;
            }
        }
        if (successors != nullptr) {
            done = emit(detail::draw_weighted(*successors, rng));
        } else if (note_end >= kMinPhraseMs) {
            break;  // dead end past the minimum bound: stop cleanly
        } else {
            // dead end too early: chain a fresh opening from the same stream
            for (const PhraseToken& t : detail::draw_weighted(model.start_contexts, rng)) {
                if ((done = emit(t))) break;
            }
        }
    }

    if (notes.empty()) throw GenerationFailed("model produced no notes");

    Phrase phrase(std::move(notes), model.quadrant);
    if (phrase.total_duration_ms() > kMaxPhraseMs) {
        NoteEvent& last = phrase.notes.back();
        last.duration_ms = kMaxPhraseMs - last.onset_ms;
    }
    return phrase;
}

/// Generator contract: anything that can produce a quadrant-tagged phrase of
/// a requested duration from a seed.
class PhraseGenerator {
public:
    virtual ~PhraseGenerator() = default;
    virtual Quadrant quadrant() const = 0;
    virtual Phrase generate(std::uint64_t seed, double target_duration_ms) const = 0;
};

class MarkovGenerator final : public PhraseGenerator {
public:
    explicit MarkovGenerator(MarkovModel model) : model_(std::move(model)) {}

    Quadrant quadrant() const override { return model_.quadrant; }
    Phrase generate(std::uint64_t seed, double target_duration_ms) const override {
        return sample(model_, seed, target_duration_ms);
    }
    const MarkovModel& model() const { return model_; }

private:
    MarkovModel model_;
};

// ---------------------------------------------------------------------------
// Model serialization (versioned)
// ---------------------------------------------------------------------------

inline nlohmann::json token_to_json(const PhraseToken& t) {
    return nlohmann::json::array({t.pitch, t.duration_class, t.velocity_class});
}

inline PhraseToken token_from_json(const nlohmann::json& j) {
    PhraseToken t{j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>()};
    if ((t.pitch < 0 || t.pitch > 127) && t.pitch != kRestPitch)
        throw Error("token pitch out of range");
    if (t.duration_class < 0 || t.duration_class > 15) throw Error("duration class out of range");
    if (t.velocity_class < 0 || t.velocity_class > 7) throw Error("velocity class out of range");
    return t;
}

inline nlohmann::json to_json(const MarkovModel& model) {
    auto context_json = [](const TokenSeq& ctx) {
        nlohmann::json arr = nlohmann::json::array();
        for (const PhraseToken& t : ctx) arr.push_back(token_to_json(t));
        return arr;
    };

    nlohmann::json starts = nlohmann::json::array();
    for (const auto& [ctx, count] : model.start_contexts)
        starts.push_back({{"context", context_json(ctx)}, {"count", count}});

    nlohmann::json transitions = nlohmann::json::array();
    for (const auto& table : model.transitions) {
        for (const auto& [ctx, successors] : table) {
            nlohmann::json succ = nlohmann::json::array();
            for (const auto& [tok, count] : successors)
                succ.push_back({{"token", token_to_json(tok)}, {"count", count}});
            transitions.push_back({{"context", context_json(ctx)}, {"successors", std::move(succ)}});
        }
    }

    return {{"format", "musegest-model"},
            {"version", 1},
            {"quadrant", std::string(to_string(model.quadrant))},
            {"order", model.order},
            {"duration_bin_edges_ms", kDurationBinEdgesMs},
            {"duration_bin_rep_ms", kDurationBinRepMs},
            {"velocity_bin_rep", kVelocityBinRep},
            {"start_contexts", std::move(starts)},
            {"transitions", std::move(transitions)}};
}

inline MarkovModel model_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "musegest-model") throw Error("not a model file");
    if (j.value("version", 0) != 1) throw Error("unsupported model version");

    const auto edges = j.at("duration_bin_edges_ms").get<std::vector<double>>();
    if (edges.size() != kDurationBinEdgesMs.size() ||
        !std::equal(edges.begin(), edges.end(), kDurationBinEdgesMs.begin()))
        throw Error("model bin tables do not match this build");

    MarkovModel model;
    model.quadrant = quadrant_from_string(j.at("quadrant").get<std::string>());
    model.order = j.at("order").get<int>();
    if (model.order < 1) throw Error("model order must be >= 1");
    model.transitions.resize(static_cast<std::size_t>(model.order));

    auto context_from = [](const nlohmann::json& arr) {
        TokenSeq ctx;
        for (const auto& tj : arr) ctx.push_back(token_from_json(tj));
        return ctx;
    };

    for (const auto& sj : j.at("start_contexts")) {
        model.start_contexts[context_from(sj.at("context"))] =
            sj.at("count").get<std::uint64_t>();
    }
    for (const auto& tj : j.at("transitions")) {
        TokenSeq ctx = context_from(tj.at("context"));
        if (ctx.empty() || ctx.size() > static_cast<std::size_t>(model.order))
            throw Error("transition context length out of range");
        auto& successors = model.transitions[ctx.size() - 1][std::move(ctx)];
        for (const auto& sj : tj.at("successors"))
            successors[token_from_json(sj.at("token"))] = sj.at("count").get<std::uint64_t>();
    }
    return model;
}

}  // namespace musegest
