#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bindbench/error.hpp"

namespace bindbench {

// Binding operates over exactly these two dimensions; position and size are not features.
enum class FeatureDim { Color, Shape };
inline constexpr std::array<FeatureDim, 2> kFeatureDims{FeatureDim::Color, FeatureDim::Shape};

std::string_view to_string(FeatureDim dim);
FeatureDim feature_dim_from_string(std::string_view text);

// The (shape, color) conjunction of an object, without geometry.
struct ObjectDesc {
  std::string shape;
  std::string color;

  const std::string& feature(FeatureDim dim) const { return dim == FeatureDim::Color ? color : shape; }

  friend auto operator<=>(const ObjectDesc&, const ObjectDesc&) = default;
};

using ObjectList = std::vector<ObjectDesc>;

struct ObjectSpec {
  std::string shape;
  std::string color;
  int cx = 0;
  int cy = 0;
  int size = 0;

  ObjectDesc desc() const { return {shape, color}; }
  const std::string& feature(FeatureDim dim) const { return dim == FeatureDim::Color ? color : shape; }

  friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

struct Canvas {
  int width = 0;
  int height = 0;

  friend bool operator==(const Canvas&, const Canvas&) = default;
};

enum class TaskKind { Search, Count, Describe, Rmts, T2ICount, T2IDescribe };

std::string_view to_string(TaskKind kind);
TaskKind task_kind_from_string(std::string_view text);

struct BoolAnswer {
  bool value = false;
  friend bool operator==(const BoolAnswer&, const BoolAnswer&) = default;
};
struct IntAnswer {
  long long value = 0;
  friend bool operator==(const IntAnswer&, const IntAnswer&) = default;
};
struct ObjectListAnswer {
  ObjectList objects;
  friend bool operator==(const ObjectListAnswer&, const ObjectListAnswer&) = default;
};
struct ChoiceAnswer {
  int index = 1;  // 1 or 2
  friend bool operator==(const ChoiceAnswer&, const ChoiceAnswer&) = default;
};
struct FeatureAnswer {
  FeatureDim dim = FeatureDim::Color;
  std::string value;
  friend bool operator==(const FeatureAnswer&, const FeatureAnswer&) = default;
};

using Answer = std::variant<BoolAnswer, IntAnswer, ObjectListAnswer, ChoiceAnswer, FeatureAnswer>;

enum class AnswerKind { Bool, Int, ObjectList, Choice, Color, Shape };

AnswerKind kind_of(const Answer& answer);
std::string_view to_string(AnswerKind kind);
AnswerKind answer_kind_from_string(std::string_view text);

struct SceneSpec {
  Canvas canvas;
  std::vector<ObjectSpec> objects;
  TaskKind task = TaskKind::Search;
  std::string condition;
  std::uint64_t seed = 0;
  Answer expected;

  ObjectList descs() const;

  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

enum class Relation { Same, Different };

struct PairRelations {
  Relation color = Relation::Same;
  Relation shape = Relation::Same;

  Relation on(FeatureDim dim) const { return dim == FeatureDim::Color ? color : shape; }
  friend bool operator==(const PairRelations&, const PairRelations&) = default;
};

struct ObjectPair {
  ObjectDesc first;
  ObjectDesc second;

  PairRelations relations() const;
  friend bool operator==(const ObjectPair&, const ObjectPair&) = default;
};

enum class RmtsPairId { Source, Target1, Target2 };
enum class RmtsMode { Unified, Decomposed };

std::string_view to_string(RmtsMode mode);
RmtsMode rmts_mode_from_string(std::string_view text);

struct RmtsTrial {
  ObjectPair source;
  ObjectPair target1;
  ObjectPair target2;
  int correct = 1;  // 1 or 2
  std::uint64_t seed = 0;

  const ObjectPair& pair(RmtsPairId id) const;
  friend bool operator==(const RmtsTrial&, const RmtsTrial&) = default;
};

// The harness's unit of work: scene(s), prompt and the answer the prompt asks for.
struct TrialRecord {
  std::string id;
  TaskKind task = TaskKind::Search;
  std::string variant;
  std::string prompt;
  std::vector<SceneSpec> scenes;
  std::optional<RmtsTrial> rmts;
  std::vector<std::string> images;
  Answer expected;
  std::map<std::string, std::string> conditions;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct ModelResponse {
  std::string model_id;
  std::string raw;
  std::optional<Answer> parsed;
  std::optional<Failure> parse_error;
  double latency_ms = 0.0;
};

struct ScoreRecord {
  std::string trial_id;
  std::string metric;
  double value = 0.0;
  std::map<std::string, std::string> keys;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

}  // namespace bindbench
