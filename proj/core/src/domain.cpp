#include "bindbench/domain.hpp"

#include <string>

namespace bindbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::PlacementInfeasible: return "PlacementInfeasible";
    case ErrorCode::InsufficientPalette: return "InsufficientPalette";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::MissingBinding: return "MissingBinding";
    case ErrorCode::NoAnswerFound: return "NoAnswerFound";
    case ErrorCode::MalformedJSON: return "MalformedJSON";
    case ErrorCode::UnknownFeatureValue: return "UnknownFeatureValue";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::AuthMissing: return "AuthMissing";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::EmptyRun: return "EmptyRun";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(FeatureDim dim) { return dim == FeatureDim::Color ? "color" : "shape"; }

FeatureDim feature_dim_from_string(std::string_view text) {
  if (text == "color") return FeatureDim::Color;
  if (text == "shape") return FeatureDim::Shape;
  throw Error(ErrorCode::UnknownIdentifier, "feature dimension '" + std::string(text) + "'");
}

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::Search: return "search";
    case TaskKind::Count: return "count";
    case TaskKind::Describe: return "describe";
    case TaskKind::Rmts: return "rmts";
    case TaskKind::T2ICount: return "t2i-count";
    case TaskKind::T2IDescribe: return "t2i-describe";
  }
  return "unknown";
}

TaskKind task_kind_from_string(std::string_view text) {
  for (auto kind : {TaskKind::Search, TaskKind::Count, TaskKind::Describe, TaskKind::Rmts, TaskKind::T2ICount,
                    TaskKind::T2IDescribe}) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(ErrorCode::UnknownIdentifier, "task kind '" + std::string(text) + "'");
}

AnswerKind kind_of(const Answer& answer) {
  struct Visitor {
    AnswerKind operator()(const BoolAnswer&) const { return AnswerKind::Bool; }
    AnswerKind operator()(const IntAnswer&) const { return AnswerKind::Int; }
    AnswerKind operator()(const ObjectListAnswer&) const { return AnswerKind::ObjectList; }
    AnswerKind operator()(const ChoiceAnswer&) const { return AnswerKind::Choice; }
    AnswerKind operator()(const FeatureAnswer& f) const {
      return f.dim == FeatureDim::Color ? AnswerKind::Color : AnswerKind::Shape;
    }
  };
  return std::visit(Visitor{}, answer);
}

std::string_view to_string(AnswerKind kind) {
  switch (kind) {
    case AnswerKind::Bool: return "bool";
    case AnswerKind::Int: return "int";
    case AnswerKind::ObjectList: return "objects";
    case AnswerKind::Choice: return "choice";
    case AnswerKind::Color: return "color";
    case AnswerKind::Shape: return "shape";
  }
  return "unknown";
}

AnswerKind answer_kind_from_string(std::string_view text) {
  for (auto kind : {AnswerKind::Bool, AnswerKind::Int, AnswerKind::ObjectList, AnswerKind::Choice, AnswerKind::Color,
                    AnswerKind::Shape}) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(ErrorCode::UnknownIdentifier, "answer kind '" + std::string(text) + "'");
}

ObjectList SceneSpec::descs() const {
  ObjectList out;
  out.reserve(objects.size());
  for (const auto& o : objects) out.push_back(o.desc());
  return out;
}

PairRelations ObjectPair::relations() const {
  return {first.color == second.color ? Relation::Same : Relation::Different,
          first.shape == second.shape ? Relation::Same : Relation::Different};
}

std::string_view to_string(RmtsMode mode) { return mode == RmtsMode::Unified ? "unified" : "decomposed"; }

RmtsMode rmts_mode_from_string(std::string_view text) {
  if (text == "unified") return RmtsMode::Unified;
  if (text == "decomposed") return RmtsMode::Decomposed;
  throw Error(ErrorCode::UnknownIdentifier, "rmts mode '" + std::string(text) + "'");
}

const ObjectPair& RmtsTrial::pair(RmtsPairId id) const {
  switch (id) {
    case RmtsPairId::Source: return source;
    case RmtsPairId::Target1: return target1;
    case RmtsPairId::Target2: return target2;
  }
  return source;
}

}  // namespace bindbench
