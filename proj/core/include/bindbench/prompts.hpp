#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bindbench/domain.hpp"

namespace bindbench {

// Template families mirror the appendix subsections; variants name the stimulus/model type.
struct PromptTemplate {
  std::string_view family;   // numerical_estimation, visual_search, scene_description, rmts
  std::string_view variant;  // e.g. 2d_vlm, t2i, 2d_conjunctive, relation_unified
  std::string_view text;
};

using Bindings = std::map<std::string, std::string, std::less<>>;

const std::vector<PromptTemplate>& prompt_templates();
const PromptTemplate& prompt_template(std::string_view family, std::string_view variant);

// The substitutable names. Any other brace group (JSON examples) is literal text.
const std::vector<std::string_view>& placeholder_names();

// Placeholders used by `text`, in first-appearance order.
std::vector<std::string> template_placeholders(std::string_view text);

// Substitutes every placeholder; throws MissingBinding when one is unbound.
std::string build_prompt(std::string_view family, std::string_view variant, const Bindings& bindings);
std::string substitute(std::string_view text, const Bindings& bindings);

// "a brown cube, two green donuts, and a cyan ball": groups equal objects in first-appearance order.
std::string objects_string(const ObjectList& objects);

std::string number_word(int n);

}  // namespace bindbench
