#include "bindbench/stimulus.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <string>

#include "bindbench/catalog.hpp"

namespace bindbench {
namespace {

bool far_enough(const std::vector<Point>& placed, Point p, long long min_sep_sq) {
  for (const Point& q : placed) {
    long long dx = p.x - q.x;
    long long dy = p.y - q.y;
    if (dx * dx + dy * dy < min_sep_sq) return false;
  }
  return true;
}

std::vector<Point> grid_placement(int n, int lo_x, int hi_x, int lo_y, int hi_y, int min_sep, Rng& rng) {
  auto axis = [&](int lo, int hi) {
    int span = hi - lo;
    int cells = span / min_sep + 1;
    int spacing = cells > 1 ? span / (cells - 1) : 0;
    return std::array<int, 2>{cells, spacing};
  };
  auto [nx, sx] = axis(lo_x, hi_x);
  auto [ny, sy] = axis(lo_y, hi_y);
  if (static_cast<long long>(nx) * ny < n) {
    throw Error(ErrorCode::PlacementInfeasible,
                std::to_string(n) + " objects exceed a " + std::to_string(nx) + "x" + std::to_string(ny) + " grid");
  }
  int jx = nx > 1 ? (sx - min_sep) / 2 : 0;
  int jy = ny > 1 ? (sy - min_sep) / 2 : 0;

  std::vector<int> cells(static_cast<std::size_t>(nx) * ny);
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = static_cast<int>(i);
  rng.shuffle(cells);

  std::vector<Point> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    int cx = lo_x + (cells[i] % nx) * sx;
    int cy = lo_y + (cells[i] / nx) * sy;
    cx = std::clamp(cx + rng.uniform_int(-jx, jx), lo_x, hi_x);
    cy = std::clamp(cy + rng.uniform_int(-jy, jy), lo_y, hi_y);
    out.push_back({cx, cy});
  }
  return out;
}

std::vector<ObjectSpec> with_positions(const ObjectList& descs, const std::vector<Point>& centers, int size) {
  std::vector<ObjectSpec> out;
  out.reserve(descs.size());
  for (std::size_t i = 0; i < descs.size(); ++i) {
    out.push_back({descs[i].shape, descs[i].color, centers[i].x, centers[i].y, size});
  }
  return out;
}

std::vector<ObjectSpec> place_descs(const ObjectList& descs, std::uint64_t seed) {
  auto centers = place_objects(static_cast<int>(descs.size()), kSceneCanvas, kMinSeparation,
                               derive_seed(seed, "placement"), kObjectSize);
  return with_positions(descs, centers, kObjectSize);
}

std::vector<std::string> sample_values(const std::vector<std::string>& pool, std::size_t k, Rng& rng) {
  std::vector<std::string> out;
  for (std::size_t idx : rng.sample_indices(pool.size(), k)) out.push_back(pool[idx]);
  return out;
}

TripletCount choose3(int n) {
  if (n < 3) return 0;
  auto m = static_cast<TripletCount>(n);
  return m * (m - 1) * (m - 2) / 6;
}

TripletCount distance(TripletCount a, TripletCount b) { return a > b ? a - b : b - a; }

ObjectList sample_at_diversity(int n, std::size_t kc, std::size_t ks, const std::vector<std::string>& shapes,
                               const std::vector<std::string>& colors, Rng& rng) {
  auto palette = sample_values(colors, kc, rng);
  auto glyphs = sample_values(shapes, ks, rng);
  ObjectList out(n);
  for (auto& o : out) {
    o.color = rng.pick(palette);
    o.shape = rng.pick(glyphs);
  }
  return out;
}

ObjectDesc random_rmts_object(Rng& rng) { return {rng.pick(catalog::rmts_shapes()), rng.pick(catalog::rmts_colors())}; }

std::string other_value(const std::vector<std::string>& pool, const std::string& avoid, Rng& rng) {
  std::string v;
  do {
    v = rng.pick(pool);
  } while (v == avoid);
  return v;
}

ObjectPair pair_with_relations(PairRelations rel, Rng& rng) {
  ObjectPair p;
  p.first = random_rmts_object(rng);
  p.second.shape = rel.shape == Relation::Same ? p.first.shape : other_value(catalog::rmts_shapes(), p.first.shape, rng);
  p.second.color = rel.color == Relation::Same ? p.first.color : other_value(catalog::rmts_colors(), p.first.color, rng);
  return p;
}

Relation flip(Relation r) { return r == Relation::Same ? Relation::Different : Relation::Same; }

}  // namespace

std::string_view to_string(SearchCondition cond) {
  switch (cond) {
    case SearchCondition::Disjunctive: return "disjunctive";
    case SearchCondition::Conjunctive: return "conjunctive";
    case SearchCondition::DisjunctiveControl: return "disjunctive-control";
  }
  return "?";
}

SearchCondition search_condition_from_string(std::string_view text) {
  for (auto c : {SearchCondition::Disjunctive, SearchCondition::Conjunctive, SearchCondition::DisjunctiveControl}) {
    if (to_string(c) == text) return c;
  }
  throw Error(ErrorCode::UnknownIdentifier, "search condition '" + std::string(text) + "'");
}

std::string_view to_string(EntropyCondition cond) {
  switch (cond) {
    case EntropyCondition::Low: return "low";
    case EntropyCondition::MediumUniqueColor: return "medium-unique-color";
    case EntropyCondition::MediumUniqueShape: return "medium-unique-shape";
    case EntropyCondition::High: return "high";
  }
  return "?";
}

EntropyCondition entropy_condition_from_string(std::string_view text) {
  for (auto c : {EntropyCondition::Low, EntropyCondition::MediumUniqueColor, EntropyCondition::MediumUniqueShape,
                 EntropyCondition::High}) {
    if (to_string(c) == text) return c;
  }
  throw Error(ErrorCode::UnknownIdentifier, "entropy condition '" + std::string(text) + "'");
}

std::vector<Point> place_objects(int n, Canvas canvas, int min_sep, std::uint64_t seed, int size) {
  if (n < 0 || min_sep <= 0 || size <= 0) {
    throw Error(ErrorCode::PreconditionViolated, "place_objects needs n >= 0, min_sep > 0, size > 0");
  }
  if (n == 0) return {};
  int lo_x = size / 2;
  int hi_x = canvas.width - (size - size / 2);
  int lo_y = size / 2;
  int hi_y = canvas.height - (size - size / 2);
  if (hi_x < lo_x || hi_y < lo_y) {
    throw Error(ErrorCode::PlacementInfeasible, "object larger than canvas");
  }

  Rng rng(seed);
  const long long min_sep_sq = static_cast<long long>(min_sep) * min_sep;
  std::vector<Point> placed;
  placed.reserve(n);
  for (int attempt = 0; attempt < kPlacementAttempts && static_cast<int>(placed.size()) < n; ++attempt) {
    Point p{rng.uniform_int(lo_x, hi_x), rng.uniform_int(lo_y, hi_y)};
    if (far_enough(placed, p, min_sep_sq)) placed.push_back(p);
  }
  if (static_cast<int>(placed.size()) == n) return placed;
  return grid_placement(n, lo_x, hi_x, lo_y, hi_y, min_sep, rng);
}

SceneSpec gen_search_trial(SearchCondition cond, int n_distractors, bool target_present, std::uint64_t seed) {
  if (n_distractors < kMinDistractors || n_distractors > kMaxDistractors) {
    throw Error(ErrorCode::PreconditionViolated, "n_distractors must be in [4, 50]");
  }
  Rng rng(derive_seed(seed, "features"));
  const std::string circle(catalog::kSearchShape);
  ObjectList objects;
  ObjectDesc target;

  switch (cond) {
    case SearchCondition::Disjunctive:
      objects.assign(n_distractors, {circle, std::string(catalog::kSearchDistractorColor)});
      target = {circle, std::string(catalog::kSearchTargetColor)};
      break;
    case SearchCondition::Conjunctive: {
      const ObjectDesc red_l{std::string(catalog::kLetterL), "red"};
      const ObjectDesc green_t{std::string(catalog::kLetterT), "green"};
      // A single distractor type would hand the target a unique feature; redraw until both appear.
      do {
        objects.clear();
        for (int i = 0; i < n_distractors; ++i) objects.push_back(rng.bernoulli(0.5) ? red_l : green_t);
      } while (std::all_of(objects.begin(), objects.end(), [&](const ObjectDesc& o) { return o == objects[0]; }));
      target = {std::string(catalog::kLetterL), "green"};
      break;
    }
    case SearchCondition::DisjunctiveControl: {
      const auto& colors = catalog::description_colors();
      std::string distractor_color = rng.pick(colors);
      objects.assign(n_distractors, {circle, distractor_color});
      target = {circle, other_value(colors, distractor_color, rng)};
      break;
    }
  }
  if (target_present) {
    auto at = static_cast<std::ptrdiff_t>(rng.below(objects.size() + 1));
    objects.insert(objects.begin() + at, target);
  }

  SceneSpec scene;
  scene.canvas = kSceneCanvas;
  scene.objects = place_descs(objects, seed);
  scene.task = TaskKind::Search;
  scene.condition = std::string(to_string(cond));
  scene.seed = seed;
  scene.expected = BoolAnswer{target_present};
  return scene;
}

std::vector<SceneSpec> gen_search_batch(SearchCondition cond, int n_distractors, int count, std::uint64_t seed) {
  if (count < 0) throw Error(ErrorCode::PreconditionViolated, "negative batch size");
  std::vector<char> present(count, 0);
  std::fill(present.begin(), present.begin() + count / 2, 1);
  Rng rng(derive_seed(seed, "batch/presence"));
  rng.shuffle(present);
  std::vector<SceneSpec> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    out.push_back(gen_search_trial(cond, n_distractors, present[i] != 0, derive_seed(seed, "search/" + std::to_string(i))));
  }
  return out;
}

SceneSpec gen_numerosity_trial(EntropyCondition cond, int n, std::uint64_t seed) {
  const auto& shapes = catalog::numerosity_shapes();
  const auto& colors = catalog::numerosity_colors();
  bool unique_color = cond == EntropyCondition::MediumUniqueColor || cond == EntropyCondition::High;
  bool unique_shape = cond == EntropyCondition::MediumUniqueShape || cond == EntropyCondition::High;
  if (n < kMinNumerosity) throw Error(ErrorCode::PreconditionViolated, "numerosity needs n >= 1");
  if ((unique_color && static_cast<std::size_t>(n) > colors.size()) ||
      (unique_shape && static_cast<std::size_t>(n) > shapes.size())) {
    throw Error(ErrorCode::InsufficientPalette,
                std::to_string(n) + " unique values requested from a " + std::to_string(colors.size()) + "-entry catalog");
  }
  if (n > kMaxNumerosity) throw Error(ErrorCode::PreconditionViolated, "numerosity needs n <= 20");

  Rng rng(derive_seed(seed, "features"));
  auto color_values = sample_values(colors, unique_color ? n : 1, rng);
  auto shape_values = sample_values(shapes, unique_shape ? n : 1, rng);
  ObjectList objects(n);
  for (int i = 0; i < n; ++i) {
    objects[i].color = color_values[unique_color ? i : 0];
    objects[i].shape = shape_values[unique_shape ? i : 0];
  }

  SceneSpec scene;
  scene.canvas = kSceneCanvas;
  scene.objects = place_descs(objects, seed);
  scene.task = TaskKind::Count;
  scene.condition = std::string(to_string(cond));
  scene.seed = seed;
  scene.expected = IntAnswer{n};
  return scene;
}

ObjectList triplet_targeted_objects(int n, TripletCount target, const std::vector<std::string>& shapes,
                                    const std::vector<std::string>& colors, Rng& rng, long attempt_budget) {
  if (n < 0) throw Error(ErrorCode::PreconditionViolated, "negative object count");
  if (target > choose3(n)) {
    throw Error(ErrorCode::PreconditionViolated,
                "target " + std::to_string(target) + " exceeds C(" + std::to_string(n) + ",3)");
  }
  if (shapes.empty() || colors.empty()) throw Error(ErrorCode::PreconditionViolated, "empty vocabulary");

  const std::size_t max_c = std::min<std::size_t>(colors.size(), n);
  const std::size_t max_s = std::min<std::size_t>(shapes.size(), n);
  if (target == 0 && max_c == static_cast<std::size_t>(n) && max_s == static_cast<std::size_t>(n)) {
    auto c = sample_values(colors, n, rng);
    auto s = sample_values(shapes, n, rng);
    ObjectList out(n);
    for (int i = 0; i < n; ++i) out[i] = {s[i], c[i]};
    return out;
  }

  constexpr long kPlateau = 200;
  long spent = 0;
  while (spent < attempt_budget) {
    // Start from the diversity level whose sample lands closest to the target.
    ObjectList current;
    TripletCount best = 0;
    bool have = false;
    for (std::size_t kc = 1; kc <= max_c; ++kc) {
      for (std::size_t ks = 1; ks <= max_s; ++ks) {
        auto candidate = sample_at_diversity(n, kc, ks, shapes, colors, rng);
        TripletCount d = distance(count_feature_triplets(candidate), target);
        if (!have || d < best || (d == best && rng.bernoulli(0.5))) {
          current = std::move(candidate);
          best = d;
          have = true;
        }
      }
    }
    long stale = 0;
    while (best != 0 && stale < kPlateau && spent < attempt_budget) {
      ++spent;
      auto i = static_cast<std::size_t>(rng.below(n));
      bool on_color = rng.bernoulli(0.5);
      std::string& slot = on_color ? current[i].color : current[i].shape;
      std::string previous = slot;
      slot = rng.pick(on_color ? colors : shapes);
      TripletCount d = distance(count_feature_triplets(current), target);
      if (d < best) {
        best = d;
        stale = 0;
      } else {
        slot = previous;
        ++stale;
      }
    }
    if (best == 0) return current;
  }
  throw Error(ErrorCode::TargetUnreachable, "no scene with " + std::to_string(target) + " triplets for n=" +
                                                std::to_string(n) + " within " + std::to_string(attempt_budget) +
                                                " mutations");
}

SceneSpec gen_scene_description_trial(int n, TripletCount target_triplets, std::uint64_t seed, long attempt_budget) {
  if (n < kMinDescriptionObjects || n > kMaxDescriptionObjects) {
    throw Error(ErrorCode::PreconditionViolated, "description scenes hold 10 to 15 objects");
  }
  Rng rng(derive_seed(seed, "features"));
  auto objects = triplet_targeted_objects(n, target_triplets, catalog::description_shapes(),
                                          catalog::description_colors(), rng, attempt_budget);
  SceneSpec scene;
  scene.canvas = kSceneCanvas;
  scene.objects = place_descs(objects, seed);
  scene.task = TaskKind::Describe;
  scene.condition = "triplets-" + std::to_string(target_triplets);
  scene.seed = seed;
  scene.expected = ObjectListAnswer{std::move(objects)};
  return scene;
}

RmtsTrial gen_rmts_trial(std::uint64_t seed) {
  Rng rng(seed);
  RmtsTrial trial;
  trial.seed = seed;
  do {
    trial.source = {random_rmts_object(rng), random_rmts_object(rng)};
  } while (trial.source.first.shape != trial.source.second.shape &&
           trial.source.first.color != trial.source.second.color);

  PairRelations rel = trial.source.relations();
  PairRelations foil_rel = rel;
  if (rng.bernoulli(0.5)) {
    foil_rel.color = flip(foil_rel.color);
  } else {
    foil_rel.shape = flip(foil_rel.shape);
  }
  ObjectPair match = pair_with_relations(rel, rng);
  ObjectPair foil = pair_with_relations(foil_rel, rng);
  trial.correct = rng.bernoulli(0.5) ? 1 : 2;
  trial.target1 = trial.correct == 1 ? match : foil;
  trial.target2 = trial.correct == 1 ? foil : match;
  return trial;
}

std::vector<SceneSpec> rmts_scenes(const RmtsTrial& trial, RmtsMode mode) {
  auto base = [&](Canvas canvas) {
    SceneSpec s;
    s.canvas = canvas;
    s.task = TaskKind::Rmts;
    s.condition = std::string(to_string(mode));
    s.seed = trial.seed;
    s.expected = ChoiceAnswer{trial.correct};
    return s;
  };
  auto add = [](SceneSpec& s, const ObjectDesc& o, int cx, int cy) {
    s.objects.push_back({o.shape, o.color, cx, cy, kRmtsObjectSize});
  };

  if (mode == RmtsMode::Unified) {
    SceneSpec s = base(kRmtsUnifiedCanvas);
    add(s, trial.source.first, 352, 200);
    add(s, trial.source.second, 672, 200);
    add(s, trial.target1.first, 144, 568);
    add(s, trial.target1.second, 400, 568);
    add(s, trial.target2.first, 624, 568);
    add(s, trial.target2.second, 880, 568);
    return {s};
  }
  std::vector<SceneSpec> out;
  for (RmtsPairId id : {RmtsPairId::Source, RmtsPairId::Target1, RmtsPairId::Target2}) {
    SceneSpec s = base(kRmtsPairCanvas);
    add(s, trial.pair(id).first, 160, 128);
    add(s, trial.pair(id).second, 352, 128);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace bindbench
