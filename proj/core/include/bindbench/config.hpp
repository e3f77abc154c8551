#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bindbench/adapters.hpp"
#include "bindbench/analysis.hpp"
#include "bindbench/observer.hpp"
#include "bindbench/scoring.hpp"
#include "bindbench/stimulus.hpp"

namespace bindbench {

struct SearchTaskConfig {
  std::vector<SearchCondition> conditions{SearchCondition::Disjunctive, SearchCondition::Conjunctive,
                                          SearchCondition::DisjunctiveControl};
  std::vector<int> distractors{5, 10, 15, 20, 30, 40, 50};
  int trials_per_cell = 20;
};

struct CountTaskConfig {
  std::vector<EntropyCondition> conditions{EntropyCondition::Low, EntropyCondition::MediumUniqueColor,
                                           EntropyCondition::MediumUniqueShape, EntropyCondition::High};
  int n_min = kMinNumerosity;
  int n_max = kMaxNumerosity;
  int trials_per_cell = 5;
};

struct DescribeTaskConfig {
  std::vector<TripletCount> triplet_targets{0, 1, 2, 4, 6, 8, 10, 12};
  int n_min = kMinDescriptionObjects;
  int n_max = kMaxDescriptionObjects;
  int trials_per_target = 20;
  long attempt_budget = kDescriptionMutationBudget;
};

struct RmtsTaskConfig {
  int trials = 200;
  std::vector<RmtsMode> modes{RmtsMode::Unified, RmtsMode::Decomposed};
};

struct T2ICountTaskConfig {
  std::vector<std::string> categories;  // empty: every catalog category
  int n_min = 1;
  int n_max = 10;
  int trials_per_cell = 1;
};

struct T2IDescribeTaskConfig {
  std::vector<TripletCount> triplet_targets{0, 1, 2, 3, 4};
  int n_min = 4;
  int n_max = 8;
  int trials_per_target = 20;
  long attempt_budget = kDescriptionMutationBudget;
};

enum class ModelKind { Synthetic, Remote, RemoteImage };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view text);

struct ModelConfig {
  std::string id;
  ModelKind kind = ModelKind::Synthetic;
  ObserverParams observer;  // Synthetic
  EndpointConfig endpoint;  // Remote, RemoteImage

  // True when the model can answer trials of this task.
  bool accepts(TaskKind task) const;
};

struct AnnotationConfig {
  int annotators_per_image = 1;
  std::string instructions =
      "Count the objects in the image, or mark which of the listed objects appear and name any extra objects.";
};

struct RunConfig {
  std::uint64_t seed = 0;
  int workers = 1;
  std::filesystem::path out = "runs/default";
  std::optional<SearchTaskConfig> search;
  std::optional<CountTaskConfig> count;
  std::optional<DescribeTaskConfig> describe;
  std::optional<RmtsTaskConfig> rmts;
  std::optional<T2ICountTaskConfig> t2i_count;
  std::optional<T2IDescribeTaskConfig> t2i_describe;
  std::vector<ModelConfig> models;
  AggregateFilters filters;
  AnnotationConfig annotation;
  bool render_images = true;
  std::string source_text;  // the TOML document this was read from

  // Throws ConfigError.
  void validate() const;
};

// Throws ConfigError on syntax errors, unknown keys, wrong types and invalid values.
RunConfig parse_run_config(std::string_view toml_text, std::string_view source_name = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace bindbench
