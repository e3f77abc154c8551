#include "bindbench/json_io.hpp"

#include <sstream>

namespace bindbench {

using nlohmann::json;

void to_json(json& j, const ObjectDesc& o) { j = json{{"shape", o.shape}, {"color", o.color}}; }

void from_json(const json& j, ObjectDesc& o) {
  j.at("shape").get_to(o.shape);
  j.at("color").get_to(o.color);
}

void to_json(json& j, const ObjectSpec& o) {
  j = json{{"shape", o.shape}, {"color", o.color}, {"cx", o.cx}, {"cy", o.cy}, {"size", o.size}};
}

void from_json(const json& j, ObjectSpec& o) {
  j.at("shape").get_to(o.shape);
  j.at("color").get_to(o.color);
  j.at("cx").get_to(o.cx);
  j.at("cy").get_to(o.cy);
  j.at("size").get_to(o.size);
}

AnswerKind scene_answer_kind(TaskKind task) {
  switch (task) {
    case TaskKind::Search: return AnswerKind::Bool;
    case TaskKind::Count:
    case TaskKind::T2ICount: return AnswerKind::Int;
    case TaskKind::Describe:
    case TaskKind::T2IDescribe: return AnswerKind::ObjectList;
    case TaskKind::Rmts: return AnswerKind::Choice;
  }
  return AnswerKind::Bool;
}

json answer_to_json(const Answer& answer) {
  struct Visitor {
    json operator()(const BoolAnswer& a) const { return a.value; }
    json operator()(const IntAnswer& a) const { return a.value; }
    json operator()(const ObjectListAnswer& a) const { return json(a.objects); }
    json operator()(const ChoiceAnswer& a) const { return a.index; }
    json operator()(const FeatureAnswer& a) const { return a.value; }
  };
  return std::visit(Visitor{}, answer);
}

Answer answer_from_json(const json& j, AnswerKind kind) {
  switch (kind) {
    case AnswerKind::Bool: return BoolAnswer{j.get<bool>()};
    case AnswerKind::Int: return IntAnswer{j.get<long long>()};
    case AnswerKind::ObjectList: return ObjectListAnswer{j.get<ObjectList>()};
    case AnswerKind::Choice: return ChoiceAnswer{j.get<int>()};
    case AnswerKind::Color: return FeatureAnswer{FeatureDim::Color, j.get<std::string>()};
    case AnswerKind::Shape: return FeatureAnswer{FeatureDim::Shape, j.get<std::string>()};
  }
  throw Error(ErrorCode::UnknownIdentifier, "answer kind");
}

void to_json(json& j, const SceneSpec& s) {
  j = json{{"canvas", {{"width", s.canvas.width}, {"height", s.canvas.height}}},
           {"objects", s.objects},
           {"task", to_string(s.task)},
           {"condition", s.condition},
           {"seed", s.seed},
           {"expected", answer_to_json(s.expected)}};
}

void from_json(const json& j, SceneSpec& s) {
  j.at("canvas").at("width").get_to(s.canvas.width);
  j.at("canvas").at("height").get_to(s.canvas.height);
  j.at("objects").get_to(s.objects);
  s.task = task_kind_from_string(j.at("task").get<std::string>());
  j.at("condition").get_to(s.condition);
  j.at("seed").get_to(s.seed);
  s.expected = answer_from_json(j.at("expected"), scene_answer_kind(s.task));
}

namespace {

json pair_to_json(const ObjectPair& p) { return json::array({json(p.first), json(p.second)}); }

ObjectPair pair_from_json(const json& j) { return {j.at(0).get<ObjectDesc>(), j.at(1).get<ObjectDesc>()}; }

}  // namespace

void to_json(json& j, const RmtsTrial& t) {
  j = json{{"source", pair_to_json(t.source)},
           {"target1", pair_to_json(t.target1)},
           {"target2", pair_to_json(t.target2)},
           {"correct", t.correct},
           {"seed", t.seed}};
}

void from_json(const json& j, RmtsTrial& t) {
  t.source = pair_from_json(j.at("source"));
  t.target1 = pair_from_json(j.at("target1"));
  t.target2 = pair_from_json(j.at("target2"));
  j.at("correct").get_to(t.correct);
  j.at("seed").get_to(t.seed);
}

void to_json(json& j, const TrialRecord& t) {
  j = json{{"trial_id", t.id},
           {"task", to_string(t.task)},
           {"variant", t.variant},
           {"prompt", t.prompt},
           {"scenes", t.scenes},
           {"images", t.images},
           {"answer_kind", to_string(kind_of(t.expected))},
           {"expected", answer_to_json(t.expected)},
           {"conditions", t.conditions}};
  if (t.rmts) j["rmts"] = *t.rmts;
}

void from_json(const json& j, TrialRecord& t) {
  j.at("trial_id").get_to(t.id);
  t.task = task_kind_from_string(j.at("task").get<std::string>());
  j.at("variant").get_to(t.variant);
  j.at("prompt").get_to(t.prompt);
  j.at("scenes").get_to(t.scenes);
  j.at("images").get_to(t.images);
  t.expected = answer_from_json(j.at("expected"), answer_kind_from_string(j.at("answer_kind").get<std::string>()));
  j.at("conditions").get_to(t.conditions);
  if (j.contains("rmts")) t.rmts = j.at("rmts").get<RmtsTrial>();
}

void to_json(json& j, const ScoreRecord& r) {
  j = json{{"trial_id", r.trial_id}, {"metric", r.metric}, {"value", r.value}, {"keys", r.keys}};
}

void from_json(const json& j, ScoreRecord& r) {
  j.at("trial_id").get_to(r.trial_id);
  j.at("metric").get_to(r.metric);
  j.at("value").get_to(r.value);
  j.at("keys").get_to(r.keys);
}

std::string to_jsonl_line(const json& j) { return j.dump() + "\n"; }

std::vector<json> parse_jsonl(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedJSON, e.what());
    }
  }
  return out;
}

}  // namespace bindbench
