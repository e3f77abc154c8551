#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "bindbench/domain.hpp"

namespace bindbench {

using TripletCount = std::uint64_t;

// Integer-coded features; codes are only compared for equality.
struct FeatureCodes {
  std::uint32_t color = 0;
  std::uint32_t shape = 0;

  std::uint32_t on(FeatureDim dim) const { return dim == FeatureDim::Color ? color : shape; }
  friend bool operator==(const FeatureCodes&, const FeatureCodes&) = default;
};

std::vector<FeatureCodes> encode_features(std::span<const ObjectDesc> objects);
std::vector<FeatureCodes> encode_features(std::span<const ObjectSpec> objects);

// A 3-subset {a,b,c} is a feature triplet when one pair shares a color and a
// different pair shares a shape. Each qualifying subset counts once.
TripletCount count_feature_triplets(const SceneSpec& scene);
TripletCount count_feature_triplets(std::span<const ObjectDesc> objects);
TripletCount count_feature_triplets(std::span<const FeatureCodes> objects);

// O(n^3) enumeration over all subsets.
TripletCount count_feature_triplets_reference(std::span<const FeatureCodes> objects);

// O(n^2) over pairs with 64-bit partner masks; falls back to the reference above 64 objects.
TripletCount count_feature_triplets_pairwise(std::span<const FeatureCodes> objects);

bool is_feature_triplet(const FeatureCodes& a, const FeatureCodes& b, const FeatureCodes& c);

// The object shared by a color pair and a shape pair inside a triplet.
struct TripletWitness {
  std::size_t bridge = 0;
  std::size_t color_partner = 0;  // shares color with bridge
  std::size_t shape_partner = 0;  // shares shape with bridge
  friend bool operator==(const TripletWitness&, const TripletWitness&) = default;
};

std::vector<std::array<std::size_t, 3>> list_feature_triplets(std::span<const FeatureCodes> objects);

// All (bridge, color partner, shape partner) assignments with distinct partners witnessing {i,j,k}.
std::vector<TripletWitness> triplet_witnesses(std::span<const FeatureCodes> objects,
                                              const std::array<std::size_t, 3>& subset);

// Shannon entropy in bits of the empirical value distribution on `dim`. Requires a nonempty scene.
double feature_entropy(const SceneSpec& scene, FeatureDim dim);
double feature_entropy(std::span<const ObjectDesc> objects, FeatureDim dim);

// True iff the target holds a value, on some dimension, that no distractor holds.
bool popout_predicate(const ObjectDesc& target, std::span<const ObjectDesc> distractors);

}  // namespace bindbench
