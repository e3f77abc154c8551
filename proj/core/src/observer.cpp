#include "bindbench/observer.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "bindbench/analysis.hpp"
#include "bindbench/catalog.hpp"
#include "bindbench/parse.hpp"
#include "bindbench/rng.hpp"

namespace bindbench {
namespace {

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::string condition(const TrialRecord& t, const std::string& key) {
  auto it = t.conditions.find(key);
  if (it == t.conditions.end()) throw Error(ErrorCode::PreconditionViolated, "trial " + t.id + " lacks '" + key + "'");
  return it->second;
}

const SceneSpec& only_scene(const TrialRecord& t) {
  if (t.scenes.empty()) throw Error(ErrorCode::PreconditionViolated, "trial " + t.id + " carries no scene");
  return t.scenes.front();
}

std::string answer_search(const TrialRecord& t, const ObserverParams& p, std::uint64_t seed) {
  const SceneSpec& scene = only_scene(t);
  ObjectList objects = scene.descs();
  bool popout = true;
  std::size_t distractors = objects.size();
  if (scene.condition == "conjunctive") {
    ObjectDesc target{std::string(catalog::kLetterL), "green"};
    ObjectList others;
    for (const auto& o : objects) {
      if (o != target) others.push_back(o);
    }
    distractors = others.size();
    popout = popout_predicate(target, others);
  }
  bool answer = std::get<BoolAnswer>(t.expected).value;
  if (!popout) {
    Rng rng(derive_seed(seed, "confusion"));
    double p_flip = 1.0 - std::pow(1.0 - p.eps_conj, static_cast<double>(distractors));
    if (rng.uniform01() < p_flip) answer = !answer;
  }
  return fmt::format("The image shows {} shapes. {}", objects.size(), format_answer(BoolAnswer{answer}));
}

long long perceived_count(const ObjectList& objects, const ObserverParams& p, std::uint64_t seed) {
  const auto n = static_cast<long long>(objects.size());
  if (n <= p.k) return n;
  long long identical_pairs = 0;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    for (std::size_t j = i + 1; j < objects.size(); ++j) identical_pairs += objects[i] == objects[j];
  }
  // Separate streams keep the merge and noise draws aligned across scenes of different sizes.
  Rng merge_rng(derive_seed(seed, "merge"));
  Rng noise_rng(derive_seed(seed, "weber"));
  auto merged = static_cast<long long>(merge_rng.binomial(static_cast<std::uint64_t>(std::min(identical_pairs, n)), p.p_merge));
  long long effective = n - merged;
  if (effective <= p.k) return effective;
  double e = static_cast<double>(effective);
  return std::max(0LL, std::llround(e + e * p.w * noise_rng.normal()));
}

std::string answer_count(const TrialRecord& t, const ObserverParams& p, std::uint64_t seed) {
  ObjectList objects = only_scene(t).descs();
  std::string described;
  for (std::size_t i = 0; i < objects.size() && i < 3; ++i) {
    described += fmt::format("{}a {} {}", i ? ", " : "", objects[i].color, objects[i].shape);
  }
  return fmt::format("I can see {}{}. Total: {}", described, objects.size() > 3 ? " and more" : "",
                     format_answer(IntAnswer{perceived_count(objects, p, seed)}));
}

std::string answer_describe(const TrialRecord& t, const ObserverParams& p, std::uint64_t seed) {
  const ObjectList truth = std::get<ObjectListAnswer>(t.expected).objects;
  ObjectList reported = truth;
  auto codes = encode_features(std::span<const ObjectDesc>(truth));
  Rng rng(seed);
  for (const auto& subset : list_feature_triplets(codes)) {
    if (!rng.bernoulli(p.p_bind)) continue;
    auto witnesses = triplet_witnesses(codes, subset);
    const TripletWitness& w = witnesses[static_cast<std::size_t>(rng.below(witnesses.size()))];
    ObjectDesc illusory{truth[w.color_partner].shape, truth[w.shape_partner].color};
    std::size_t end = rng.bernoulli(0.5) ? w.color_partner : w.shape_partner;
    reported[end] = illusory;
  }
  return format_answer(ObjectListAnswer{reported});
}

std::string display_shape(const std::string& shape) { return shape == "X-shape" ? "cross" : shape; }

struct RmtsView {
  std::array<ObjectDesc, 6> objects;  // source 1, source 2, target1 1, target1 2, target2 1, target2 2

  ObjectPair pair(int index) const { return {objects[2 * index], objects[2 * index + 1]}; }
};

int pair_index(const std::string& name) {
  if (name == "source") return 0;
  if (name == "target1") return 1;
  if (name == "target2") return 2;
  throw Error(ErrorCode::PreconditionViolated, "unknown pair '" + name + "'");
}

RmtsView perceive(const RmtsTrial& trial, double error_rate, std::uint64_t seed) {
  RmtsView v{{trial.source.first, trial.source.second, trial.target1.first, trial.target1.second, trial.target2.first,
              trial.target2.second}};
  // Fixed draw order per feature so a lower error rate corrupts a subset of the same features.
  Rng hit(derive_seed(seed, "decode"));
  Rng value(derive_seed(seed, "substitute"));
  for (auto& o : v.objects) {
    for (FeatureDim dim : kFeatureDims) {
      bool corrupt = hit.uniform01() < error_rate;
      const auto& pool = dim == FeatureDim::Color ? catalog::rmts_colors() : catalog::rmts_shapes();
      std::string& slot = dim == FeatureDim::Color ? o.color : o.shape;
      auto offset = 1 + value.below(pool.size() - 1);
      if (!corrupt) continue;
      auto at = static_cast<std::size_t>(std::find(pool.begin(), pool.end(), slot) - pool.begin());
      slot = pool[(at + offset) % pool.size()];
    }
  }
  return v;
}

int matching_relations(const PairRelations& a, const PairRelations& b) { return (a.color == b.color) + (a.shape == b.shape); }

std::string answer_rmts(const TrialRecord& t, const ObserverParams& p, std::uint64_t seed) {
  if (!t.rmts) throw Error(ErrorCode::PreconditionViolated, "trial " + t.id + " carries no RMTS stimulus");
  const bool unified = t.variant.size() >= 7 && t.variant.substr(t.variant.size() - 7) == "unified";
  RmtsView v = perceive(*t.rmts, unified ? p.e_unified : p.e_decomposed, seed);

  if (starts_with(t.variant, "full")) {
    PairRelations src = v.pair(0).relations();
    int m1 = matching_relations(src, v.pair(1).relations());
    int m2 = matching_relations(src, v.pair(2).relations());
    int choice = m1 > m2 ? 1 : 2;
    if (m1 == m2) choice = Rng(derive_seed(seed, "tie")).bernoulli(0.5) ? 1 : 2;
    return fmt::format("Comparing the relations of each target pair with the source pair, the match is {}",
                       format_answer(ChoiceAnswer{choice}));
  }
  if (starts_with(t.variant, "relation")) {
    ObjectPair pair = v.pair(pair_index(condition(t, "pair")));
    FeatureDim dim = feature_dim_from_string(condition(t, "relation"));
    bool same = pair.first.feature(dim) == pair.second.feature(dim);
    return format_answer(BoolAnswer{same});
  }
  if (starts_with(t.variant, "single_feature")) {
    ObjectPair pair = v.pair(pair_index(condition(t, "pair")));
    FeatureDim dim = feature_dim_from_string(condition(t, "feature"));
    const ObjectDesc& o = condition(t, "object") == "1" ? pair.first : pair.second;
    return dim == FeatureDim::Color ? format_answer(FeatureAnswer{dim, o.color})
                                    : "[" + display_shape(o.shape) + "]";
  }
  if (starts_with(t.variant, "all_feature")) {
    std::string out = "{\n";
    const char* names[3] = {"source", "target1", "target2"};
    for (int i = 0; i < 3; ++i) {
      out += fmt::format("    {}: {{\n", names[i]);
      for (int j = 0; j < 2; ++j) {
        const ObjectDesc& o = v.objects[2 * i + j];
        out += fmt::format("      {}_object{}: {{shape: {}, color: {}}}{}\n", names[i], j + 1, display_shape(o.shape),
                           o.color, j == 0 ? "," : "");
      }
      out += i < 2 ? "    },\n" : "    }\n";
    }
    return out + "}";
  }
  throw Error(ErrorCode::PreconditionViolated, "unknown RMTS probe '" + t.variant + "'");
}

}  // namespace

void ObserverParams::validate() const {
  for (double prob : {p_bind, p_merge, eps_conj, e_unified, e_decomposed}) {
    if (!(prob >= 0 && prob <= 1)) throw Error(ErrorCode::ConfigError, "observer probabilities must lie in [0, 1]");
  }
  if (k < 1) throw Error(ErrorCode::ConfigError, "observer capacity k must be >= 1");
  if (!(w >= 0)) throw Error(ErrorCode::ConfigError, "observer Weber fraction must be >= 0");
}

std::string synthetic_describe(const TrialRecord& trial, const ObserverParams& params, std::uint64_t seed) {
  switch (trial.task) {
    case TaskKind::Search: return answer_search(trial, params, seed);
    case TaskKind::Count: return answer_count(trial, params, seed);
    case TaskKind::Describe: return answer_describe(trial, params, seed);
    case TaskKind::Rmts: return answer_rmts(trial, params, seed);
    case TaskKind::T2ICount:
    case TaskKind::T2IDescribe: break;
  }
  throw Error(ErrorCode::PreconditionViolated, "the synthetic observer cannot generate images");
}

}  // namespace bindbench
