#include "bindbench/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <toml.hpp>

#include "bindbench/adapters.hpp"
#include "bindbench/catalog.hpp"

namespace bindbench {
namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigError, where.empty() ? what : where + ": " + what);
}

// A TOML table with typed accessors that remember which keys were read.
class Section {
 public:
  Section(const toml::table& table, std::string path) : table_(table), path_(std::move(path)) {}

  bool has(std::string_view key) const { return table_.contains(key); }

  template <class T>
  std::optional<T> opt(std::string_view key) {
    used_.insert(std::string(key));
    const toml::node* node = table_.get(key);
    if (node == nullptr) return std::nullopt;
    return convert<T>(*node, where(key));
  }

  template <class T>
  T get(std::string_view key, T fallback) {
    auto v = opt<T>(key);
    return v ? *v : fallback;
  }

  template <class T>
  T require(std::string_view key) {
    auto v = opt<T>(key);
    if (!v) fail(path_, fmt::format("missing required key '{}'", key));
    return *v;
  }

  template <class T>
  std::optional<std::vector<T>> opt_list(std::string_view key) {
    used_.insert(std::string(key));
    const toml::node* node = table_.get(key);
    if (node == nullptr) return std::nullopt;
    const toml::array* arr = node->as_array();
    if (arr == nullptr) fail(where(key), "expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < arr->size(); ++i) out.push_back(convert<T>(*arr->get(i), fmt::format("{}[{}]", where(key), i)));
    return out;
  }

  std::optional<Section> sub(std::string_view key) {
    used_.insert(std::string(key));
    const toml::node* node = table_.get(key);
    if (node == nullptr) return std::nullopt;
    const toml::table* t = node->as_table();
    if (t == nullptr) fail(where(key), "expected a table");
    return Section(*t, where(key));
  }

  const toml::node* raw(std::string_view key) {
    used_.insert(std::string(key));
    return table_.get(key);
  }

  void reject_unknown() const {
    for (const auto& [k, v] : table_) {
      if (!used_.count(std::string(k.str()))) fail(path_, fmt::format("unknown key '{}'", k.str()));
    }
  }

  const std::string& path() const { return path_; }
  std::string where(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }

 private:
  template <class T>
  static T convert(const toml::node& node, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (auto v = node.value_exact<bool>()) return *v;
      fail(where, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      auto v = node.value_exact<std::int64_t>();
      if (!v) fail(where, "expected an integer");
      if (std::is_unsigned_v<T> && *v < 0) fail(where, "expected a non-negative integer");
      return static_cast<T>(*v);
    } else if constexpr (std::is_floating_point_v<T>) {
      if (auto v = node.value<double>()) return *v;
      fail(where, "expected a number");
    } else {
      if (auto v = node.value_exact<std::string>()) return *v;
      fail(where, "expected a string");
    }
  }

  const toml::table& table_;
  std::string path_;
  std::set<std::string> used_;
};

nlohmann::json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
    return j;
  }
  if (const auto* a = node.as_array()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& v : *a) j.push_back(toml_to_json(v));
    return j;
  }
  if (auto v = node.value_exact<std::string>()) return *v;
  if (auto v = node.value_exact<std::int64_t>()) return *v;
  if (auto v = node.value_exact<double>()) return *v;
  if (auto v = node.value_exact<bool>()) return *v;
  fail("", "dates and times are not accepted in model options");
}

template <class E, class F>
std::vector<E> enum_list(const std::vector<std::string>& names, F&& parse, const std::string& where) {
  std::vector<E> out;
  for (const auto& n : names) {
    try {
      out.push_back(parse(n));
    } catch (const Error&) {
      fail(where, "unknown value '" + n + "'");
    }
  }
  return out;
}

void read_search(Section s, RunConfig& cfg) {
  SearchTaskConfig c;
  if (auto v = s.opt_list<std::string>("conditions"))
    c.conditions = enum_list<SearchCondition>(*v, search_condition_from_string, s.where("conditions"));
  if (auto v = s.opt_list<int>("distractors")) c.distractors = *v;
  c.trials_per_cell = s.get("trials_per_cell", c.trials_per_cell);
  s.reject_unknown();
  cfg.search = c;
}

void read_count(Section s, RunConfig& cfg) {
  CountTaskConfig c;
  if (auto v = s.opt_list<std::string>("conditions"))
    c.conditions = enum_list<EntropyCondition>(*v, entropy_condition_from_string, s.where("conditions"));
  c.n_min = s.get("n_min", c.n_min);
  c.n_max = s.get("n_max", c.n_max);
  c.trials_per_cell = s.get("trials_per_cell", c.trials_per_cell);
  s.reject_unknown();
  cfg.count = c;
}

void read_describe(Section s, RunConfig& cfg) {
  DescribeTaskConfig c;
  if (auto v = s.opt_list<TripletCount>("triplet_targets")) c.triplet_targets = *v;
  c.n_min = s.get("n_min", c.n_min);
  c.n_max = s.get("n_max", c.n_max);
  c.trials_per_target = s.get("trials_per_target", c.trials_per_target);
  c.attempt_budget = s.get("attempt_budget", c.attempt_budget);
  s.reject_unknown();
  cfg.describe = c;
}

void read_rmts(Section s, RunConfig& cfg) {
  RmtsTaskConfig c;
  c.trials = s.get("trials", c.trials);
  if (auto v = s.opt_list<std::string>("modes")) c.modes = enum_list<RmtsMode>(*v, rmts_mode_from_string, s.where("modes"));
  s.reject_unknown();
  cfg.rmts = c;
}

void read_t2i_count(Section s, RunConfig& cfg) {
  T2ICountTaskConfig c;
  if (auto v = s.opt_list<std::string>("categories")) c.categories = *v;
  c.n_min = s.get("n_min", c.n_min);
  c.n_max = s.get("n_max", c.n_max);
  c.trials_per_cell = s.get("trials_per_cell", c.trials_per_cell);
  s.reject_unknown();
  cfg.t2i_count = c;
}

void read_t2i_describe(Section s, RunConfig& cfg) {
  T2IDescribeTaskConfig c;
  if (auto v = s.opt_list<TripletCount>("triplet_targets")) c.triplet_targets = *v;
  c.n_min = s.get("n_min", c.n_min);
  c.n_max = s.get("n_max", c.n_max);
  c.trials_per_target = s.get("trials_per_target", c.trials_per_target);
  c.attempt_budget = s.get("attempt_budget", c.attempt_budget);
  s.reject_unknown();
  cfg.t2i_describe = c;
}

ObserverParams read_observer(std::optional<Section> s) {
  ObserverParams p;
  if (!s) return p;
  p.p_bind = s->get("p_bind", p.p_bind);
  p.k = s->get("k", p.k);
  p.w = s->get("w", p.w);
  p.p_merge = s->get("p_merge", p.p_merge);
  p.eps_conj = s->get("eps_conj", p.eps_conj);
  p.e_unified = s->get("e_unified", p.e_unified);
  p.e_decomposed = s->get("e_decomposed", p.e_decomposed);
  s->reject_unknown();
  return p;
}

ModelConfig read_model(Section s) {
  ModelConfig m;
  m.id = s.require<std::string>("id");
  try {
    m.kind = model_kind_from_string(s.require<std::string>("kind"));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConfigError) throw;
    fail(s.where("kind"), e.what());
  }
  if (m.kind == ModelKind::Synthetic) {
    m.observer = read_observer(s.sub("observer"));
  } else {
    EndpointConfig& ep = m.endpoint;
    ep.model_id = m.id;
    ep.url = s.require<std::string>("endpoint");
    ep.provider = provider_from_string(s.get<std::string>("provider", "generic"));
    ep.auth_env = s.get<std::string>("auth_env", "");
    ep.max_retries = s.get("max_retries", ep.max_retries);
    ep.backoff_ms = s.get("backoff_ms", ep.backoff_ms);
    ep.rate_per_minute = s.get("rate_per_minute", ep.rate_per_minute);
    ep.timeout_s = s.get("timeout_s", ep.timeout_s);
    ep.response_pointer = s.get<std::string>("response_pointer", "");
    if (const toml::node* opts = s.raw("options")) {
      if (!opts->is_table()) fail(s.where("options"), "expected a table");
      ep.options = toml_to_json(*opts);
    }
    if (auto name = s.opt<std::string>("remote_model")) ep.options["model"] = *name;
  }
  s.reject_unknown();
  return m;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Synthetic: return "synthetic";
    case ModelKind::Remote: return "remote";
    case ModelKind::RemoteImage: return "remote-image";
  }
  return "synthetic";
}

ModelKind model_kind_from_string(std::string_view text) {
  for (auto k : {ModelKind::Synthetic, ModelKind::Remote, ModelKind::RemoteImage}) {
    if (to_string(k) == text) return k;
  }
  throw Error(ErrorCode::ConfigError, "unknown model kind '" + std::string(text) + "'");
}

bool ModelConfig::accepts(TaskKind task) const {
  bool t2i = task == TaskKind::T2ICount || task == TaskKind::T2IDescribe;
  return kind == ModelKind::RemoteImage ? t2i : !t2i;
}

void RunConfig::validate() const {
  if (workers < 1) fail("workers", "must be >= 1");
  if (models.empty()) fail("models", "at least one model is required");
  std::set<std::string> ids;
  for (const auto& m : models) {
    if (m.id.empty()) fail("models", "model id is empty");
    if (m.id.find_first_of("/\\ ") != std::string::npos || m.id == "." || m.id == "..") {
      fail("models", "model id '" + m.id + "' must not contain path separators or spaces");
    }
    if (!ids.insert(m.id).second) fail("models", "duplicate model id '" + m.id + "'");
    if (m.kind == ModelKind::Synthetic) {
      m.observer.validate();
    } else {
      m.endpoint.validate();
    }
  }
  if (!search && !count && !describe && !rmts && !t2i_count && !t2i_describe) fail("tasks", "no task configured");
  if (search) {
    if (search->conditions.empty() || search->distractors.empty()) fail("tasks.search", "empty condition list");
    for (int d : search->distractors) {
      if (d < kMinDistractors || d > kMaxDistractors)
        fail("tasks.search.distractors", fmt::format("{} outside [{}, {}]", d, kMinDistractors, kMaxDistractors));
    }
    if (search->trials_per_cell < 1) fail("tasks.search.trials_per_cell", "must be >= 1");
  }
  if (count) {
    if (count->conditions.empty()) fail("tasks.count", "empty condition list");
    if (count->n_min < kMinNumerosity || count->n_max > kMaxNumerosity || count->n_min > count->n_max)
      fail("tasks.count", fmt::format("object range must lie within [{}, {}]", kMinNumerosity, kMaxNumerosity));
    if (count->trials_per_cell < 1) fail("tasks.count.trials_per_cell", "must be >= 1");
  }
  if (describe) {
    if (describe->triplet_targets.empty()) fail("tasks.describe", "empty triplet target list");
    if (describe->n_min < kMinDescriptionObjects || describe->n_max > kMaxDescriptionObjects ||
        describe->n_min > describe->n_max)
      fail("tasks.describe", fmt::format("object range must lie within [{}, {}]", kMinDescriptionObjects,
                                         kMaxDescriptionObjects));
    if (describe->trials_per_target < 1) fail("tasks.describe.trials_per_target", "must be >= 1");
    if (describe->attempt_budget < 1) fail("tasks.describe.attempt_budget", "must be >= 1");
  }
  if (rmts) {
    if (rmts->trials < 1) fail("tasks.rmts.trials", "must be >= 1");
    if (rmts->modes.empty()) fail("tasks.rmts.modes", "empty mode list");
  }
  if (t2i_count) {
    if (t2i_count->n_min < 1 || t2i_count->n_min > t2i_count->n_max) fail("tasks.t2i_count", "bad object range");
    if (t2i_count->trials_per_cell < 1) fail("tasks.t2i_count.trials_per_cell", "must be >= 1");
    for (const auto& c : t2i_count->categories) {
      const auto& all = catalog::t2i_count_categories();
      if (std::none_of(all.begin(), all.end(), [&](const auto& k) { return k.plural == c; }))
        fail("tasks.t2i_count.categories", "unknown category '" + c + "'");
    }
  }
  if (t2i_describe) {
    if (t2i_describe->n_min < 3 || t2i_describe->n_min > t2i_describe->n_max)
      fail("tasks.t2i_describe", "object range must start at 3 or more");
    if (t2i_describe->triplet_targets.empty()) fail("tasks.t2i_describe", "empty triplet target list");
    if (t2i_describe->trials_per_target < 1) fail("tasks.t2i_describe.trials_per_target", "must be >= 1");
  }
  if (annotation.annotators_per_image < 1) fail("annotation.annotators_per_image", "must be >= 1");
}

RunConfig parse_run_config(std::string_view toml_text, std::string_view source_name) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source_name);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " at " << e.source().begin;
    fail(std::string(source_name), msg.str());
  }
  RunConfig cfg;
  cfg.source_text = std::string(toml_text);
  Section top(root, "");
  auto seed = top.opt<std::int64_t>("seed");
  if (!seed) fail(std::string(source_name), "missing required key 'seed'");
  if (*seed < 0) fail("seed", "must be non-negative");
  cfg.seed = static_cast<std::uint64_t>(*seed);
  cfg.workers = top.get("workers", cfg.workers);
  cfg.out = top.get<std::string>("out", cfg.out.string());
  cfg.render_images = top.get("render_images", cfg.render_images);

  if (auto tasks = top.sub("tasks")) {
    if (auto s = tasks->sub("search")) read_search(*s, cfg);
    if (auto s = tasks->sub("count")) read_count(*s, cfg);
    if (auto s = tasks->sub("describe")) read_describe(*s, cfg);
    if (auto s = tasks->sub("rmts")) read_rmts(*s, cfg);
    if (auto s = tasks->sub("t2i_count")) read_t2i_count(*s, cfg);
    if (auto s = tasks->sub("t2i_describe")) read_t2i_describe(*s, cfg);
    tasks->reject_unknown();
  }

  if (const toml::node* models = top.raw("models")) {
    const toml::array* arr = models->as_array();
    if (arr == nullptr) fail("models", "expected an array of tables ([[models]])");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const toml::table* t = arr->get(i)->as_table();
      if (t == nullptr) fail(fmt::format("models[{}]", i), "expected a table");
      cfg.models.push_back(read_model(Section(*t, fmt::format("models[{}]", i))));
    }
  }

  if (auto f = top.sub("filters")) {
    cfg.filters.min_trials_per_triplet_group = f->get("min_trials_per_triplet", cfg.filters.min_trials_per_triplet_group);
    cfg.filters.max_t2i_inserts = f->get("max_t2i_inserts", cfg.filters.max_t2i_inserts);
    f->reject_unknown();
  }
  if (auto a = top.sub("annotation")) {
    cfg.annotation.annotators_per_image = a->get("annotators_per_image", cfg.annotation.annotators_per_image);
    cfg.annotation.instructions = a->get("instructions", cfg.annotation.instructions);
    a->reject_unknown();
  }
  top.reject_unknown();
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
  }
  return parse_run_config(text, path.string());
}

}  // namespace bindbench
