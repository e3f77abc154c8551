#include "bindbench/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "bindbench/adapters.hpp"
#include "bindbench/config.hpp"
#include "bindbench/json_io.hpp"
#include "bindbench/svg.hpp"

namespace bindbench {
namespace fs = std::filesystem;

namespace {

struct TableSpec {
  const char* file;
  TaskKind task;
  std::vector<std::string> keys;
};

const std::vector<TableSpec>& table_specs() {
  static const std::vector<TableSpec> specs{
      {"search.csv", TaskKind::Search, {"model", "condition", "distractors"}},
      {"count.csv", TaskKind::Count, {"model", "condition", "n"}},
      {"describe_triplets.csv", TaskKind::Describe, {"model", "triplets"}},
      {"describe_objects.csv", TaskKind::Describe, {"model", "n_objects"}},
      {"rmts.csv", TaskKind::Rmts, {"model", "mode", "probe"}},
      {"t2i_count.csv", TaskKind::T2ICount, {"model", "kind", "n"}},
      {"t2i_describe_triplets.csv", TaskKind::T2IDescribe, {"model", "triplets"}},
      {"t2i_describe_objects.csv", TaskKind::T2IDescribe, {"model", "n_objects"}},
  };
  return specs;
}

struct PlotSpec {
  const char* file;
  const char* table;
  const char* metric;
  const char* title;
  const char* x_label;
  const char* y_label;
  bool unit_interval;
};

const std::vector<PlotSpec>& plot_specs() {
  static const std::vector<PlotSpec> specs{
      {"search_accuracy_vs_distractors.svg", "search.csv", metric::kCorrect, "Visual search",
       "number of distractors", "accuracy", true},
      {"count_accuracy_vs_objects.svg", "count.csv", metric::kCorrect, "Numerical estimation", "number of objects",
       "accuracy", true},
      {"describe_edit_distance_vs_triplets.svg", "describe_triplets.csv", metric::kEditDistance, "Scene description",
       "number of feature triplets", "edit distance", false},
      {"describe_edit_distance_vs_objects.svg", "describe_objects.csv", metric::kEditDistance, "Scene description",
       "number of objects", "edit distance", false},
      {"t2i_count_accuracy_vs_objects.svg", "t2i_count.csv", metric::kCorrect, "Text-to-image counting",
       "number of objects", "accuracy", true},
      {"t2i_describe_edit_distance_vs_triplets.svg", "t2i_describe_triplets.csv", metric::kEditDistance,
       "Text-to-image scene description", "number of feature triplets", "edit distance", false},
  };
  return specs;
}

std::vector<ScoreRecord> read_scores(const fs::path& path) {
  std::vector<ScoreRecord> out;
  std::error_code ec;
  if (!fs::exists(path, ec)) return out;
  for (const auto& j : parse_jsonl(read_file(path))) out.push_back(j.get<ScoreRecord>());
  return out;
}

std::string key_value(const ScoreRecord& r, const char* key) {
  auto it = r.keys.find(key);
  return it == r.keys.end() ? std::string() : it->second;
}

std::optional<double> as_number(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

// The last group key is the x axis; the others name the series.
std::vector<ChartSeries> to_series(const std::vector<AggregateRow>& rows, const std::string& metric_name) {
  std::map<std::string, ChartSeries> by_name;
  std::vector<std::string> order;
  for (const auto& row : rows) {
    if (row.metric != metric_name || row.group.empty()) continue;
    auto x = as_number(row.group.back());
    if (!x) continue;
    std::string name;
    for (std::size_t i = 0; i + 1 < row.group.size(); ++i) name += (i ? " / " : "") + row.group[i];
    auto [it, fresh] = by_name.try_emplace(name);
    if (fresh) {
      it->second.name = name;
      order.push_back(name);
    }
    it->second.points.push_back({*x, row.mean, row.ci_lo, row.ci_hi});
  }
  std::vector<ChartSeries> out;
  for (const auto& name : order) out.push_back(std::move(by_name[name]));
  return out;
}

}  // namespace

std::string rmts_table_csv(const std::vector<ScoreRecord>& records) {
  static const std::pair<const char*, const char*> rows[] = {{"analogy", "Analogy"},
                                                             {"relation", "Relation decoding"},
                                                             {"full_feature", "Full feature decoding"},
                                                             {"single_feature", "Single feature decoding"}};
  static const char* modes[] = {"unified", "decomposed"};
  // (model, probe, mode) -> (successes, trials)
  std::map<std::tuple<std::string, std::string, std::string>, std::pair<long long, long long>> tally;
  std::set<std::string> models;
  for (const auto& r : records) {
    if (r.metric != metric::kCorrect || key_value(r, "task") != to_string(TaskKind::Rmts)) continue;
    auto& cell = tally[{key_value(r, "model"), key_value(r, "probe"), key_value(r, "mode")}];
    cell.first += r.value > 0.5;
    cell.second += 1;
    models.insert(key_value(r, "model"));
  }
  std::string out =
      "model,task,unified_accuracy,unified_ci_lo,unified_ci_hi,unified_n,"
      "decomposed_accuracy,decomposed_ci_lo,decomposed_ci_hi,decomposed_n\n";
  for (const auto& model : models) {
    for (const auto& [probe, label] : rows) {
      out += model + "," + label;
      for (const char* mode : modes) {
        auto it = tally.find({model, probe, mode});
        if (it == tally.end() || it->second.second == 0) {
          out += ",,,,0";
          continue;
        }
        auto [k, n] = it->second;
        Interval ci = wilson_interval(k, n);
        out += fmt::format(",{:.6f},{:.6f},{:.6f},{}", static_cast<double>(k) / static_cast<double>(n), ci.lo, ci.hi, n);
      }
      out += "\n";
    }
  }
  return out;
}

ReportFiles write_report(const fs::path& run_dir, const AggregateFilters& filters) {
  std::vector<ScoreRecord> records = read_scores(run_dir / "scores.jsonl");
  auto t2i = read_scores(run_dir / "t2i_scores.jsonl");
  records.insert(records.end(), t2i.begin(), t2i.end());
  if (records.empty()) throw Error(ErrorCode::EmptyRun, "no scores under " + run_dir.string());

  std::map<std::string, std::vector<ScoreRecord>> by_task;
  for (const auto& r : records) by_task[key_value(r, "task")].push_back(r);

  ReportFiles files;
  std::map<std::string, std::vector<AggregateRow>> tables;
  for (const auto& spec : table_specs()) {
    auto it = by_task.find(std::string(to_string(spec.task)));
    if (it == by_task.end()) continue;
    auto rows = aggregate(it->second, spec.keys, filters);
    std::string rel = std::string("aggregates/") + spec.file;
    write_file_atomic(run_dir / rel, aggregate_csv(rows, spec.keys));
    files.tables.push_back(rel);
    tables[spec.file] = std::move(rows);
  }
  if (by_task.count(std::string(to_string(TaskKind::Rmts)))) {
    write_file_atomic(run_dir / "aggregates/rmts_probe_accuracy.csv", rmts_table_csv(by_task["rmts"]));
    files.tables.push_back("aggregates/rmts_probe_accuracy.csv");
  }

  for (const auto& plot : plot_specs()) {
    auto it = tables.find(plot.table);
    if (it == tables.end()) continue;
    auto series = to_series(it->second, plot.metric);
    if (series.empty()) continue;
    ChartSpec chart;
    chart.title = plot.title;
    chart.x_label = plot.x_label;
    chart.y_label = plot.y_label;
    if (plot.unit_interval) {
      chart.y_min = 0.0;
      chart.y_max = 1.0;
    }
    std::string rel = std::string("plots/") + plot.file;
    write_file_atomic(run_dir / rel, line_chart_svg(chart, series));
    files.plots.push_back(rel);
  }
  return files;
}

ReportFiles write_report(const fs::path& run_dir) {
  AggregateFilters filters;
  std::error_code ec;
  if (fs::exists(run_dir / "config.toml", ec)) filters = load_run_config(run_dir / "config.toml").filters;
  return write_report(run_dir, filters);
}

}  // namespace bindbench
