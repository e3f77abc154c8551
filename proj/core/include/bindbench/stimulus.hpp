#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bindbench/analysis.hpp"
#include "bindbench/domain.hpp"
#include "bindbench/rng.hpp"

namespace bindbench {

enum class SearchCondition { Disjunctive, Conjunctive, DisjunctiveControl };
enum class EntropyCondition { Low, MediumUniqueColor, MediumUniqueShape, High };

std::string_view to_string(SearchCondition cond);
SearchCondition search_condition_from_string(std::string_view text);
std::string_view to_string(EntropyCondition cond);
EntropyCondition entropy_condition_from_string(std::string_view text);

inline constexpr Canvas kSceneCanvas{1024, 1024};
inline constexpr int kObjectSize = 64;
inline constexpr int kMinSeparation = 96;
inline constexpr int kPlacementAttempts = 10000;
inline constexpr long kDescriptionMutationBudget = 50000;

inline constexpr int kMinDistractors = 4;
inline constexpr int kMaxDistractors = 50;
inline constexpr int kMinNumerosity = 1;
inline constexpr int kMaxNumerosity = 20;
inline constexpr int kMinDescriptionObjects = 10;
inline constexpr int kMaxDescriptionObjects = 15;

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

// n centers whose `size`-px boxes lie inside the canvas, pairwise at least min_sep apart.
// Rejection sampling first, then a jittered grid.
std::vector<Point> place_objects(int n, Canvas canvas, int min_sep, std::uint64_t seed, int size = kObjectSize);

SceneSpec gen_search_trial(SearchCondition cond, int n_distractors, bool target_present, std::uint64_t seed);

// `count` trials with the target present in exactly count / 2 of them (rounded down).
std::vector<SceneSpec> gen_search_batch(SearchCondition cond, int n_distractors, int count, std::uint64_t seed);

SceneSpec gen_numerosity_trial(EntropyCondition cond, int n, std::uint64_t seed);

SceneSpec gen_scene_description_trial(int n, TripletCount target_triplets, std::uint64_t seed,
                                      long attempt_budget = kDescriptionMutationBudget);

// Hill-climbs a feature assignment over the given vocabularies until it has exactly
// target_triplets feature triplets. Throws TargetUnreachable when the budget runs out.
ObjectList triplet_targeted_objects(int n, TripletCount target_triplets, const std::vector<std::string>& shapes,
                                    const std::vector<std::string>& colors, Rng& rng, long attempt_budget);

RmtsTrial gen_rmts_trial(std::uint64_t seed);

// Scenes to render for an RMTS trial: one 1024x768 scene (Unified) or three 512x256 scenes
// ordered source, target 1, target 2 (Decomposed).
std::vector<SceneSpec> rmts_scenes(const RmtsTrial& trial, RmtsMode mode);

inline constexpr Canvas kRmtsUnifiedCanvas{1024, 768};
inline constexpr Canvas kRmtsPairCanvas{512, 256};
inline constexpr int kRmtsObjectSize = 128;

}  // namespace bindbench
