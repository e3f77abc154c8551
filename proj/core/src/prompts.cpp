#include "bindbench/prompts.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "bindbench/catalog.hpp"
#include "bindbench/error.hpp"

namespace bindbench {

const std::vector<PromptTemplate>& prompt_templates() {
  static const std::vector<PromptTemplate> templates{
      {"numerical_estimation", "2d_vlm",
       R"prompt(You are presented with an image containing several objects. Your task is to accurately count the number of objects in the image. Follow these instructions carefully:
1. Begin by describing each object in the image.
2. Conclude your response by providing the total count of objects as an integer, enclosed in square brackets. Only the number should be enclosed in square brackets.)prompt"},
      {"numerical_estimation", "3d_vlm",
       R"prompt(You are presented with an image containing several shapes. Your task is to accurately count the number of shapes in the image. Follow these instructions carefully:
1. Begin by describing each shape in the image.
2. Conclude your response by providing the total count of shapes as an integer, enclosed in square brackets. Only the number should be enclosed in square brackets.)prompt"},
      {"numerical_estimation", "t2i",
       R"prompt(Render an image with exactly {n} {object_name}, each distinctly separated and easily countable, arranged against a uniform background in photorealistic style.)prompt"},
      {"visual_search", "2d_disjunctive",
       R"prompt(You are presented with an image containing several shapes. Your task is to determine if there are any green shapes in the image. Follow these steps carefully:
1. Describe each shape in the image, noting their color.
2. Conclude your response by stating [True] if there are any green shapes, or [False] if there are none. Enclose your final answer in square brackets, as shown.)prompt"},
      {"visual_search", "2d_disjunctive_variable_color",
       R"prompt(You are presented with an image containing several shapes. Your task is to determine if all the shapes are the same color. Follow these steps carefully:
1. Describe each shape in the image, noting their color.
2. Conclude your response by stating [True] if all shapes are the same color, or [False] if there is an "oddball" shape that is a different color. Enclose your final answer in square brackets, as shown.)prompt"},
      {"visual_search", "2d_conjunctive",
       R"prompt(You are presented with an image containing a set of letters, specifically the letters 'L' and 'T'. These letters will appear in either red or green.
Your task is to determine if there are any green 'L's in the image. Follow these steps carefully:
1. Describe each shape in the image, noting their color.
2. Conclude your response by stating [True] if the letter 'L' appears in green, or [False] if there are no green 'L's. Enclose your final answer in square brackets, as shown.)prompt"},
      {"visual_search", "3d_disjunctive",
       R"prompt(You are presented with an image containing several objects. Your task is to determine if there are any red objects in the image. Follow these steps carefully:
1. Describe each object in the image, noting their color.
2. Conclude your response by stating [True] if there are any red objects, or [False] if there are none. Enclose your final answer in square brackets, as shown.)prompt"},
      {"visual_search", "3d_conjunctive",
       R"prompt(You are presented with an image containing a set of objects, specifically spheres and cubes. These objects will appear in either red or green.
Your task is to determine if there are any red spheres in the image. Follow these steps carefully:
1. Describe each object in the image, noting their color.
2. Conclude your response by stating [True] if a red sphere is present, or [False] if there are none. Enclose your final answer in square brackets, as shown.)prompt"},
      {"scene_description", "2d_vlm",
       R"prompt(The following image contains multiple simple, colored objects.
The possible shapes that may be present in the image are: <airplane, triangle, cloud, X-shape, umbrella, pentagon, heart, star, circle, square, spade, scissors, infinity, check mark, right-arrow>.
The possible colors that may be present in the image are: <red, magenta, salmon, green, lime, olive, blue, teal, yellow, purple, brown, gray, black, cyan, orange>.
Describe each object in the image in the form of a JSON object detailing the color and shape of each item.
You must answer only with the json array of objects, without any additional information or text.
For example, if the image contains a purple check mark, two green scissors, one orange right-arrow, and a teal infinity sign you would write:

[
    {"shape": "check mark", "color": "purple"},
    {"shape": "scissors", "color": "green"},
    {"shape": "scissors", "color": "green"},
    {"shape": "right-arrow", "color": "orange"},
    {"shape": "infinity", "color": "teal"}
]
)prompt"},
      {"scene_description", "3d_vlm",
       R"prompt(The following image contains multiple simple, colored objects.
The possible shapes that may be present in the image are: <cone, cylinder, bowl, donut, sphere, cube, droplet, bowling-pin, coil, crown, snowman, spikey-ball>.
The set of colors that may be present in the image are: <red, green, blue, yellow, purple, light green, gray, black, light blue, pink, teal, brown>.
Describe each object in the image in the form of a JSON object, detailing the color and shape of each item.
You must answer only with the json array of objects, without any additional information or text.
For example, if the image contains a brown cube, two green donuts, and a cyan spikey-ball, you would write:

[
    {"shape": "cube", "color": "brown"},
    {"shape": "donut", "color": "green"},
    {"shape": "donut", "color": "green"},
    {"shape": "spikey-ball", "color": "cyan"}
])prompt"},
      {"scene_description", "t2i",
       R"prompt(Render an image in photorealistic style with exactly {objects_string} arranged against a uniform background, each distinctly separated. Include only these objects in the image and nothing else.)prompt"},
      {"rmts", "full_unified",
       R"prompt(The following image depicts a trial of a relational match to sample task with two features: shape and color.
There are three pairs of objects relevant to your task: the source pair (the top pair of objects), target pair #1 (the pair of objects on bottom left), and target pair  (the pair of objects on the bottom right).
Now, given the source pair and the two target pairs, identify the matching target pair. To accomplish this task, you can use the following steps:
1. Identify the features of the objects in each pair (i.e. shape and color).
2. Identify the relations over the features of each pair.
3. Determine which target pair shares the same relations with the source pair -- exactly one target pair will share the same relations with the source.
4. Conclude with the integer of the correct target pair wrapped in square brackets. For example, if target pair #1 matches the source pair, return [1].)prompt"},
      {"rmts", "full_decomposed",
       R"prompt(The following images depict a trial of a relational match to sample task with two features: shape and color.
There are three pairs of objects relevant to your task: the source pair, target pair #1, and target pair #2.
Now, given the source pair and the two target pairs, identify the matching target pair. To accomplish this task, you can use the following steps:
1. Identify the features of the objects in each pair (i.e. shape and color).
2. Identify the relations over the features of each pair.
3. Determine which target pair shares the same relations with the source pair -- exactly one target pair will share the same relations with the source.
4. Conclude with the integer of the correct target pair wrapped in square brackets. For example, if target pair #1 matches the source pair, return [1].)prompt"},
      {"rmts", "relation_unified",
       R"prompt(Are the two objects in the {pair} pair (the {pair_loc} pair) the same {relation}?
Your answer should be [True] if the objects have the same {relation} and [False] if they have a different {relation}.
Ensure that your final answer is wrapped in square brackets.)prompt"},
      {"rmts", "relation_decomposed",
       R"prompt(Are the two objects in the {pair} pair (the {pair_loc} pair) the same {relation}?
Your answer should be [True] if the objects have the same {relation} and [False] if they have a different {relation}.
Ensure that your final answer is wrapped in square brackets.)prompt"},
      {"rmts", "single_feature_unified",
       R"prompt(What is the {feature} of the {object_loc} ({object_ind}) object in the {pair} pair? Only provide the {feature}.
Your response should be a single word answer wrapped in square brackets.
For instance, if I ask for the color of a red object, you should return [red] and nothing else. If I ask for the shape of an object that is a circle, you should return [circle].
- Valid shapes include: triangle, cloud, cross, heart, circle, square.
- Valid colors include: red, green, blue, darkorange, purple, and gray.)prompt"},
      {"rmts", "single_feature_decomposed",
       R"prompt(What is the {feature} of the {object_loc} ({object_ind}) object in the {pair} pair? Only provide the {feature}.
Your response should be a single word answer wrapped in square brackets.
For instance, if I ask for the color of a red object, you should return [red] and nothing else. If I ask for the shape of an object that is a circle, you should return [circle].
- Valid shapes include: triangle, cloud, cross, heart, circle, square.
- Valid colors include: red, green, blue, darkorange, purple, and gray.)prompt"},
      {"rmts", "all_feature_unified",
       R"prompt(Examine the image provided, which depicts six basic, colored shapes arranged into three distinct pairs of objects: the source pair at the top, target pair #1 on the bottom left, and target pair #2 on the bottom right.
For each pair, identify the shapes as follows: "object1" refers to the left-most object in the pair, and the "object2" to the right-most object in the pair.
Return the color and shape of each object in the trial in the json format described below.
- Valid shapes: triangle, cloud, cross, heart, circle, square.
- Valid colors: red, green, blue, darkorange, purple, and gray.

Your response should be in the following format:
{
    source: {
      source_object1: {shape: circle, color: purple},
      source_object2: {shape: circle, color: purple}
    },
    target1: {
      target1_object1: {shape: triangle, color: brown},
      target1_object2: {shape: triangle, color: brown}
    },
    {
      target2_object1: {shape: square, color: green},
      target2_object2: {shape: square, color: black}
    }
}

Response:)prompt"},
      {"rmts", "all_feature_decomposed",
       R"prompt(Examine the three images provided, which depict six basic, colored shapes arranged into three distinct pairs of objects: the source pair, target pair #1, and target pair #2.
For each pair, identify the shapes as follows: "object1" refers to the left-most object in the pair, and the "object2" to the right-most object in the pair.
Return the color and shape of each object in the trial in the json format described below.
- Valid shapes: triangle, cloud, cross, heart, circle, square.
- Valid colors: red, green, blue, darkorange, purple, and gray.

Your response should be in the following format:
{
    source: {
      source_object1: {shape: circle, color: purple},
      source_object2: {shape: circle, color: purple}
    },
    target1: {
      target1_object1: {shape: triangle, color: brown},
      target1_object2: {shape: triangle, color: brown}
    },
    {
      target2_object1: {shape: square, color: green},
      target2_object2: {shape: square, color: black}
    }
}

Response: )prompt"},
  };
  return templates;
}

const PromptTemplate& prompt_template(std::string_view family, std::string_view variant) {
  for (const auto& t : prompt_templates()) {
    if (t.family == family && t.variant == variant) return t;
  }
  throw Error(ErrorCode::UnknownIdentifier, "prompt " + std::string(family) + "/" + std::string(variant));
}

const std::vector<std::string_view>& placeholder_names() {
  static const std::vector<std::string_view> names{"n",        "object_name", "objects_string", "pair",      "pair_loc",
                                                   "relation", "feature",     "object_loc",     "object_ind"};
  return names;
}

namespace {

// Yields (offset, length, name) for each recognized placeholder.
template <class F>
void scan_placeholders(std::string_view text, F&& on_match) {
  const auto& names = placeholder_names();
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    std::size_t close = text.find('}', i + 1);
    if (close == std::string_view::npos) return;
    std::string_view name = text.substr(i + 1, close - i - 1);
    if (std::find(names.begin(), names.end(), name) != names.end()) {
      on_match(i, close - i + 1, name);
      i = close;
    }
  }
}

}  // namespace

std::vector<std::string> template_placeholders(std::string_view text) {
  std::vector<std::string> out;
  scan_placeholders(text, [&](std::size_t, std::size_t, std::string_view name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.emplace_back(name);
  });
  return out;
}

std::string substitute(std::string_view text, const Bindings& bindings) {
  std::string out;
  std::size_t last = 0;
  scan_placeholders(text, [&](std::size_t at, std::size_t len, std::string_view name) {
    auto it = bindings.find(name);
    if (it == bindings.end()) throw Error(ErrorCode::MissingBinding, "no value for {" + std::string(name) + "}");
    out.append(text.substr(last, at - last));
    out += it->second;
    last = at + len;
  });
  out.append(text.substr(last));
  return out;
}

std::string build_prompt(std::string_view family, std::string_view variant, const Bindings& bindings) {
  return substitute(prompt_template(family, variant).text, bindings);
}

std::string number_word(int n) {
  static constexpr std::array<std::string_view, 21> kWords{
      "zero",    "one",     "two",       "three",    "four",     "five",    "six",
      "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
      "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen", "twenty"};
  if (n >= 0 && n < static_cast<int>(kWords.size())) return std::string(kWords[n]);
  return std::to_string(n);
}

std::string objects_string(const ObjectList& objects) {
  std::vector<std::pair<ObjectDesc, int>> groups;
  for (const auto& o : objects) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == o; });
    if (it == groups.end()) {
      groups.emplace_back(o, 1);
    } else {
      ++it->second;
    }
  }
  std::vector<std::string> phrases;
  for (const auto& [o, count] : groups) {
    if (count == 1) {
      bool vowel = !o.color.empty() && std::string_view("aeiou").find(o.color[0]) != std::string_view::npos;
      phrases.push_back(std::string(vowel ? "an " : "a ") + o.color + " " + o.shape);
    } else {
      phrases.push_back(number_word(count) + " " + o.color + " " + catalog::pluralize(o.shape));
    }
  }
  std::string out;
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    if (i > 0) out += phrases.size() == 2 ? " and " : (i + 1 == phrases.size() ? ", and " : ", ");
    out += phrases[i];
  }
  return out;
}

}  // namespace bindbench
