#pragma once

#include <map>
#include <string>
#include <string_view>

#include "bindbench/domain.hpp"
#include "bindbench/error.hpp"

namespace bindbench {

// Maps free-text feature names to canonical catalog ids. Keys are lowercase.
class SynonymTable {
 public:
  static SynonymTable from_json(std::string_view text);
  static const SynonymTable& builtin();

  // Canonical id or nullptr.
  const std::string* lookup(FeatureDim dim, std::string_view key) const;
  int version() const { return version_; }

 private:
  std::map<std::string, std::string, std::less<>> color_;
  std::map<std::string, std::string, std::less<>> shape_;
  int version_ = 0;
};

// Lowercases, trims, collapses whitespace and strips quotes and a trailing period, then resolves
// through canonical ids, the synonym table and a singular form. Fails with UnknownFeatureValue.
Outcome<std::string> normalize_feature(std::string_view raw, FeatureDim dim,
                                       const SynonymTable& synonyms = SynonymTable::builtin());

// The last [..] token in the text that reads as `kind` (Bool, Int, Choice, Color or Shape).
// Fails with NoAnswerFound.
Outcome<Answer> parse_bracketed(std::string_view text, AnswerKind kind);

// The first balanced JSON array of {shape, color} objects anywhere in the text, normalized.
// Fails with MalformedJSON or UnknownFeatureValue.
Outcome<ObjectList> parse_object_json(std::string_view text);

// The six objects of an all-feature RMTS response in the order source, target 1, target 2,
// object1 before object2 in each pair. Quotes around keys and values are optional.
Outcome<ObjectList> parse_rmts_features(std::string_view text);

// Parses `text` into the answer kind a trial expects. `rmts_features` selects the six-object
// RMTS format for ObjectList answers.
Outcome<Answer> parse_answer(std::string_view text, AnswerKind kind, bool rmts_features = false);

// The answer written the way the prompts request it.
std::string format_answer(const Answer& answer);

}  // namespace bindbench
