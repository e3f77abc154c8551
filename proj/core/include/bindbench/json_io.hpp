#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "bindbench/domain.hpp"

namespace bindbench {

void to_json(nlohmann::json& j, const ObjectDesc& o);
void from_json(const nlohmann::json& j, ObjectDesc& o);
void to_json(nlohmann::json& j, const ObjectSpec& o);
void from_json(const nlohmann::json& j, ObjectSpec& o);
void to_json(nlohmann::json& j, const SceneSpec& s);
void from_json(const nlohmann::json& j, SceneSpec& s);
void to_json(nlohmann::json& j, const RmtsTrial& t);
void from_json(const nlohmann::json& j, RmtsTrial& t);
void to_json(nlohmann::json& j, const TrialRecord& t);
void from_json(const nlohmann::json& j, TrialRecord& t);
void to_json(nlohmann::json& j, const ScoreRecord& r);
void from_json(const nlohmann::json& j, ScoreRecord& r);

nlohmann::json answer_to_json(const Answer& answer);
Answer answer_from_json(const nlohmann::json& j, AnswerKind kind);

// The answer kind a scene's `expected` field holds for its task.
AnswerKind scene_answer_kind(TaskKind task);

// One compact JSON document per line, keys sorted.
std::string to_jsonl_line(const nlohmann::json& j);

template <class T>
std::string to_jsonl(const std::vector<T>& items) {
  std::string out;
  for (const auto& item : items) out += to_jsonl_line(nlohmann::json(item));
  return out;
}

std::vector<nlohmann::json> parse_jsonl(const std::string& text);

}  // namespace bindbench
