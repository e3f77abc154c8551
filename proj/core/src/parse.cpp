#include "bindbench/parse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <nlohmann/json.hpp>
#include <regex>

#include "bindbench/catalog.hpp"
#include "bindbench/embedded_data.hpp"

namespace bindbench {
namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string clean_token(std::string_view raw) {
  std::string s = lowercase(trim(raw));
  while (!s.empty() && (s.front() == '"' || s.front() == '\'' || s.front() == '`')) s.erase(s.begin());
  while (!s.empty() && (s.back() == '"' || s.back() == '\'' || s.back() == '`' || s.back() == '.')) s.pop_back();
  std::string collapsed;
  bool space = false;
  for (char c : trim(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !collapsed.empty()) collapsed.push_back(' ');
    space = false;
    collapsed.push_back(c);
  }
  return collapsed;
}

const std::string* canonical_match(const std::vector<std::string>& ids, std::string_view key) {
  for (const auto& id : ids) {
    if (lowercase(id) == key) return &id;
  }
  return nullptr;
}

const std::string* resolve(std::string_view key, FeatureDim dim, const SynonymTable& synonyms) {
  const auto& ids = dim == FeatureDim::Color ? catalog::all_colors() : catalog::all_shapes();
  if (const auto* c = canonical_match(ids, key)) return c;
  return synonyms.lookup(dim, key);
}

std::optional<long long> parse_int(std::string_view s) {
  std::string t = trim(s);
  if (!t.empty() && t[0] == '+') t.erase(t.begin());
  if (t.empty()) return std::nullopt;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

std::optional<Answer> read_token(std::string_view token, AnswerKind kind) {
  switch (kind) {
    case AnswerKind::Bool: {
      std::string t = lowercase(trim(token));
      if (t == "true") return BoolAnswer{true};
      if (t == "false") return BoolAnswer{false};
      return std::nullopt;
    }
    case AnswerKind::Int: {
      auto v = parse_int(token);
      if (!v) return std::nullopt;
      return IntAnswer{*v};
    }
    case AnswerKind::Choice: {
      std::string t = trim(token);
      if (!t.empty() && t[0] == '#') t.erase(t.begin());
      if (t == "1") return ChoiceAnswer{1};
      if (t == "2") return ChoiceAnswer{2};
      return std::nullopt;
    }
    case AnswerKind::Color:
    case AnswerKind::Shape: {
      FeatureDim dim = kind == AnswerKind::Color ? FeatureDim::Color : FeatureDim::Shape;
      auto v = normalize_feature(token, dim);
      if (!v) return std::nullopt;
      return FeatureAnswer{dim, v.value()};
    }
    case AnswerKind::ObjectList: return std::nullopt;
  }
  return std::nullopt;
}

// End of the balanced bracket group opened at `open`, skipping JSON strings; npos if unbalanced.
std::size_t matching_bracket(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']' && --depth == 0) {
      return i;
    }
  }
  return std::string_view::npos;
}

bool is_object_array(const nlohmann::json& j) {
  if (!j.is_array()) return false;
  return std::all_of(j.begin(), j.end(), [](const nlohmann::json& o) {
    return o.is_object() && o.contains("shape") && o.contains("color") && o["shape"].is_string() &&
           o["color"].is_string();
  });
}

Failure unknown(std::string_view raw) { return {ErrorCode::UnknownFeatureValue, std::string(raw)}; }

}  // namespace

SynonymTable SynonymTable::from_json(std::string_view text) {
  SynonymTable t;
  try {
    auto doc = nlohmann::json::parse(text);
    t.version_ = doc.value("version", 0);
    for (const auto& [k, v] : doc.at("color").items()) t.color_.emplace(lowercase(k), v.get<std::string>());
    for (const auto& [k, v] : doc.at("shape").items()) t.shape_.emplace(lowercase(k), v.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("synonyms: ") + e.what());
  }
  return t;
}

const SynonymTable& SynonymTable::builtin() {
  static const SynonymTable table = from_json(embedded::synonyms_json());
  return table;
}

const std::string* SynonymTable::lookup(FeatureDim dim, std::string_view key) const {
  const auto& m = dim == FeatureDim::Color ? color_ : shape_;
  auto it = m.find(key);
  return it == m.end() ? nullptr : &it->second;
}

Outcome<std::string> normalize_feature(std::string_view raw, FeatureDim dim, const SynonymTable& synonyms) {
  std::string key = clean_token(raw);
  if (key.empty()) return unknown(raw);
  if (const auto* c = resolve(key, dim, synonyms)) return *c;
  if (dim == FeatureDim::Shape && key.size() > 1 && key.back() == 's') {
    std::string singular = key.substr(0, key.size() - 1);
    if (const auto* c = resolve(singular, dim, synonyms)) return *c;
    if (singular.size() > 1 && singular.back() == 'e') {
      if (const auto* c = resolve(singular.substr(0, singular.size() - 1), dim, synonyms)) return *c;
    }
  }
  return unknown(raw);
}

Outcome<Answer> parse_bracketed(std::string_view text, AnswerKind kind) {
  try {
    std::optional<Answer> last;
    std::size_t i = 0;
    while ((i = text.find('[', i)) != std::string_view::npos) {
      std::size_t close = text.find_first_of("[]", i + 1);
      if (close == std::string_view::npos) break;
      if (text[close] == '[') {
        i = close;
        continue;
      }
      if (auto a = read_token(text.substr(i + 1, close - i - 1), kind)) last = std::move(a);
      i = close + 1;
    }
    if (last) return *last;
    return Failure{ErrorCode::NoAnswerFound, "no bracketed " + std::string(to_string(kind)) + " answer"};
  } catch (const std::exception& e) {
    return Failure{ErrorCode::NoAnswerFound, e.what()};
  }
}

Outcome<ObjectList> parse_object_json(std::string_view text) {
  try {
    for (std::size_t i = text.find('['); i != std::string_view::npos; i = text.find('[', i + 1)) {
      std::size_t close = matching_bracket(text, i);
      if (close == std::string_view::npos) continue;
      auto j = nlohmann::json::parse(text.substr(i, close - i + 1), nullptr, false);
      if (j.is_discarded() || !is_object_array(j)) continue;
      ObjectList out;
      for (const auto& o : j) {
        auto shape = normalize_feature(o["shape"].get<std::string>(), FeatureDim::Shape);
        if (!shape) return shape.failure();
        auto color = normalize_feature(o["color"].get<std::string>(), FeatureDim::Color);
        if (!color) return color.failure();
        out.push_back({shape.value(), color.value()});
      }
      return out;
    }
    return Failure{ErrorCode::MalformedJSON, "no JSON array of {shape, color} objects"};
  } catch (const std::exception& e) {
    return Failure{ErrorCode::MalformedJSON, e.what()};
  }
}

Outcome<ObjectList> parse_rmts_features(std::string_view text) {
  try {
    static const std::regex entry(R"re(["']?(source|target1|target2)_object([12])["']?\s*:\s*\{([^{}]*)\})re",
                                  std::regex::icase);
    static const std::regex shape_re(R"re(["']?shape["']?\s*:\s*["']?([^,"'}]+))re", std::regex::icase);
    static const std::regex color_re(R"re(["']?color["']?\s*:\s*["']?([^,"'}]+))re", std::regex::icase);
    std::array<std::optional<ObjectDesc>, 6> slots;
    std::string s(text);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), entry); it != std::sregex_iterator(); ++it) {
      std::string pair = lowercase((*it)[1].str());
      int pair_index = pair == "source" ? 0 : (pair == "target1" ? 1 : 2);
      int slot = pair_index * 2 + ((*it)[2].str() == "2" ? 1 : 0);
      std::string body = (*it)[3].str();
      std::smatch sm, cm;
      if (!std::regex_search(body, sm, shape_re) || !std::regex_search(body, cm, color_re)) {
        return Failure{ErrorCode::MalformedJSON, "object without shape and color"};
      }
      auto shape = normalize_feature(sm[1].str(), FeatureDim::Shape);
      if (!shape) return shape.failure();
      auto color = normalize_feature(cm[1].str(), FeatureDim::Color);
      if (!color) return color.failure();
      slots[slot] = ObjectDesc{shape.value(), color.value()};
    }
    ObjectList out;
    for (const auto& slot : slots) {
      if (!slot) return Failure{ErrorCode::MalformedJSON, "response does not describe all six objects"};
      out.push_back(*slot);
    }
    return out;
  } catch (const std::exception& e) {
    return Failure{ErrorCode::MalformedJSON, e.what()};
  }
}

Outcome<Answer> parse_answer(std::string_view text, AnswerKind kind, bool rmts_features) {
  if (kind != AnswerKind::ObjectList) return parse_bracketed(text, kind);
  auto objects = rmts_features ? parse_rmts_features(text) : parse_object_json(text);
  if (!objects) return objects.failure();
  return Answer{ObjectListAnswer{objects.value()}};
}

std::string format_answer(const Answer& answer) {
  struct Visitor {
    std::string operator()(const BoolAnswer& a) const { return a.value ? "[True]" : "[False]"; }
    std::string operator()(const IntAnswer& a) const { return "[" + std::to_string(a.value) + "]"; }
    std::string operator()(const ChoiceAnswer& a) const { return "[" + std::to_string(a.index) + "]"; }
    std::string operator()(const FeatureAnswer& a) const { return "[" + a.value + "]"; }
    std::string operator()(const ObjectListAnswer& a) const {
      if (a.objects.empty()) return "[]";
      std::string out = "[\n";
      for (std::size_t i = 0; i < a.objects.size(); ++i) {
        nlohmann::ordered_json o{{"shape", a.objects[i].shape}, {"color", a.objects[i].color}};
        out += "    " + o.dump(-1, ' ', false) + (i + 1 < a.objects.size() ? ",\n" : "\n");
      }
      return out + "]";
    }
  };
  return std::visit(Visitor{}, answer);
}

}  // namespace bindbench
