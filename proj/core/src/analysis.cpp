#include "bindbench/analysis.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

namespace bindbench {
namespace {

template <class Object>
std::vector<FeatureCodes> encode(std::span<const Object> objects) {
  std::unordered_map<std::string, std::uint32_t> colors;
  std::unordered_map<std::string, std::uint32_t> shapes;
  std::vector<FeatureCodes> out;
  out.reserve(objects.size());
  for (const auto& o : objects) {
    auto c = colors.try_emplace(o.color, static_cast<std::uint32_t>(colors.size())).first->second;
    auto s = shapes.try_emplace(o.shape, static_cast<std::uint32_t>(shapes.size())).first->second;
    out.push_back({c, s});
  }
  return out;
}

bool shares(const FeatureCodes& a, const FeatureCodes& b, FeatureDim dim) { return a.on(dim) == b.on(dim); }

}  // namespace

std::vector<FeatureCodes> encode_features(std::span<const ObjectDesc> objects) { return encode(objects); }
std::vector<FeatureCodes> encode_features(std::span<const ObjectSpec> objects) { return encode(objects); }

bool is_feature_triplet(const FeatureCodes& a, const FeatureCodes& b, const FeatureCodes& c) {
  const std::array<std::array<const FeatureCodes*, 2>, 3> pairs{{{&a, &b}, {&a, &c}, {&b, &c}}};
  for (std::size_t p1 = 0; p1 < 3; ++p1) {
    for (std::size_t p2 = 0; p2 < 3; ++p2) {
      if (p1 == p2) continue;
      if (shares(*pairs[p1][0], *pairs[p1][1], FeatureDim::Color) &&
          shares(*pairs[p2][0], *pairs[p2][1], FeatureDim::Shape)) {
        return true;
      }
    }
  }
  return false;
}

TripletCount count_feature_triplets_reference(std::span<const FeatureCodes> objects) {
  const std::size_t n = objects.size();
  TripletCount count = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        if (is_feature_triplet(objects[i], objects[j], objects[k])) ++count;
  return count;
}

TripletCount count_feature_triplets_pairwise(std::span<const FeatureCodes> objects) {
  const std::size_t n = objects.size();
  if (n > 64) return count_feature_triplets_reference(objects);

  std::array<std::uint64_t, 64> same_color{};
  std::array<std::uint64_t, 64> same_shape{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      if (objects[i].color == objects[k].color) same_color[i] |= std::uint64_t{1} << k;
      if (objects[i].shape == objects[k].shape) same_shape[i] |= std::uint64_t{1} << k;
    }
  }

  constexpr std::uint64_t kAll = ~std::uint64_t{0};
  TripletCount count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::uint64_t above_j = (j + 1 >= 64) ? 0 : (kAll << (j + 1));
      const std::uint64_t valid = above_j & (n == 64 ? kAll : ((std::uint64_t{1} << n) - 1));
      if (valid == 0) continue;
      const std::uint64_t cij = objects[i].color == objects[j].color ? kAll : 0;
      const std::uint64_t sij = objects[i].shape == objects[j].shape ? kAll : 0;
      const std::uint64_t cik = same_color[i], cjk = same_color[j];
      const std::uint64_t sik = same_shape[i], sjk = same_shape[j];

      const std::uint64_t any_color = cij | cik | cjk;
      const std::uint64_t any_shape = sij | sik | sjk;
      // Fails when the only color-sharing pair is also the only shape-sharing pair.
      const std::uint64_t lone_ij = cij & sij & ~cik & ~cjk & ~sik & ~sjk;
      const std::uint64_t lone_ik = cik & sik & ~cij & ~cjk & ~sij & ~sjk;
      const std::uint64_t lone_jk = cjk & sjk & ~cij & ~cik & ~sij & ~sik;

      const std::uint64_t qualifying = any_color & any_shape & ~(lone_ij | lone_ik | lone_jk) & valid;
      count += static_cast<TripletCount>(std::popcount(qualifying));
    }
  }
  return count;
}

TripletCount count_feature_triplets(std::span<const FeatureCodes> objects) {
  return count_feature_triplets_pairwise(objects);
}

TripletCount count_feature_triplets(std::span<const ObjectDesc> objects) {
  const auto codes = encode_features(objects);
  return count_feature_triplets_pairwise(codes);
}

TripletCount count_feature_triplets(const SceneSpec& scene) {
  const auto codes = encode_features(std::span<const ObjectSpec>(scene.objects));
  return count_feature_triplets_pairwise(codes);
}

std::vector<std::array<std::size_t, 3>> list_feature_triplets(std::span<const FeatureCodes> objects) {
  std::vector<std::array<std::size_t, 3>> out;
  const std::size_t n = objects.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        if (is_feature_triplet(objects[i], objects[j], objects[k])) out.push_back({i, j, k});
  return out;
}

std::vector<TripletWitness> triplet_witnesses(std::span<const FeatureCodes> objects,
                                              const std::array<std::size_t, 3>& subset) {
  std::vector<TripletWitness> out;
  for (std::size_t b = 0; b < 3; ++b) {
    const std::size_t x = subset[(b + 1) % 3];
    const std::size_t y = subset[(b + 2) % 3];
    const auto& bridge = objects[subset[b]];
    if (bridge.color == objects[x].color && bridge.shape == objects[y].shape) out.push_back({subset[b], x, y});
    if (bridge.color == objects[y].color && bridge.shape == objects[x].shape) out.push_back({subset[b], y, x});
  }
  return out;
}

double feature_entropy(std::span<const ObjectDesc> objects, FeatureDim dim) {
  if (objects.empty()) throw Error(ErrorCode::PreconditionViolated, "feature_entropy of an empty scene");
  std::map<std::string, std::size_t> counts;
  for (const auto& o : objects) ++counts[o.feature(dim)];
  const double n = static_cast<double>(objects.size());
  double bits = 0.0;
  for (const auto& [value, c] : counts) {
    const double p = static_cast<double>(c) / n;
    bits -= p * std::log2(p);
  }
  return bits == 0.0 ? 0.0 : bits;  // normalizes -0.0
}

double feature_entropy(const SceneSpec& scene, FeatureDim dim) {
  const auto descs = scene.descs();
  return feature_entropy(descs, dim);
}

bool popout_predicate(const ObjectDesc& target, std::span<const ObjectDesc> distractors) {
  for (auto dim : kFeatureDims) {
    bool unique = true;
    for (const auto& d : distractors) {
      if (d.feature(dim) == target.feature(dim)) {
        unique = false;
        break;
      }
    }
    if (unique) return true;
  }
  return false;
}

}  // namespace bindbench
