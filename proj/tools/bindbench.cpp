#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "bindbench/annotation.hpp"
#include "bindbench/config.hpp"
#include "bindbench/glyphs.hpp"
#include "bindbench/harness.hpp"
#include "bindbench/report.hpp"

namespace fs = std::filesystem;
using namespace bindbench;

namespace {

AnnotationServer* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

RunConfig load(const std::string& config, const std::string& out, int workers) {
  RunConfig cfg = load_run_config(config);
  if (!out.empty()) cfg.out = out;
  if (workers > 0) cfg.workers = workers;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bindbench: binding-stress stimuli, model queries, scoring and reports"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

  std::string config, out, task, ui, host = "127.0.0.1";
  int workers = 0, port = 8080;

  auto* gen = app.add_subcommand("generate", "Write trials.jsonl and trial images");
  gen->add_option("--config", config, "run configuration (TOML)")->required()->check(CLI::ExistingFile);
  gen->add_option("--task", task, "search, count, describe, rmts, t2i-count or t2i-describe (default: all configured)");
  gen->add_option("--out", out, "output directory (default: the config's out)");

  auto* run_cmd = app.add_subcommand("run", "Generate, query models, score and report");
  run_cmd->add_option("--config", config, "run configuration (TOML)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out, "run directory (default: the config's out)");
  run_cmd->add_option("--workers", workers, "worker threads (default: the config's workers)");

  auto* report_cmd = app.add_subcommand("report", "Aggregate scores into CSV tables and SVG plots");
  report_cmd->add_option("--out", out, "run directory");
  report_cmd->add_option("--config", config, "run configuration, to locate the run directory");

  auto* serve = app.add_subcommand("serve-annotation", "Serve text-to-image images to human annotators");
  serve->add_option("--out", out, "run directory");
  serve->add_option("--config", config, "run configuration, to locate the run directory");
  serve->add_option("--port", port, "port (0 picks a free one)")->capture_default_str();
  serve->add_option("--host", host, "bind address")->capture_default_str();
  serve->add_option("--ui", ui, "directory with the annotation client to serve at /")->check(CLI::ExistingDirectory);

  auto* score_cmd = app.add_subcommand("score-annotations", "Score text-to-image trials from annotations.jsonl");
  score_cmd->add_option("--out", out, "run directory");
  score_cmd->add_option("--config", config, "run configuration, to locate the run directory");

  auto* glyphs = app.add_subcommand("dump-glyphs", "Write the glyph outline catalog as JSON");
  std::string glyph_out;
  glyphs->add_option("path", glyph_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  auto run_dir = [&]() -> fs::path {
    if (!out.empty()) return out;
    if (!config.empty()) return load_run_config(config).out;
    throw Error(ErrorCode::ConfigError, "pass --out or --config");
  };

  try {
    if (*gen) {
      RunConfig cfg = load(config, out, workers);
      std::optional<TaskKind> only;
      if (!task.empty()) only = task_kind_from_string(task);
      std::size_t n = generate(cfg, only, cfg.out);
      spdlog::info("wrote {} trials to {}", n, cfg.out.string());
    } else if (*run_cmd) {
      RunConfig cfg = load(config, out, workers);
      RunSummary s = run(cfg);
      std::cout << s.dir.string() << "\n";
      return s.failures == 0 ? 0 : 3;
    } else if (*report_cmd) {
      ReportFiles files = write_report(run_dir());
      for (const auto& f : files.tables) std::cout << f << "\n";
      for (const auto& f : files.plots) std::cout << f << "\n";
    } else if (*score_cmd) {
      fs::path dir = run_dir();
      std::size_t n = score_t2i_annotations(dir);
      write_report(dir);
      spdlog::info("wrote {} text-to-image score records", n);
    } else if (*serve) {
      fs::path dir = run_dir();
      AnnotationServerOptions opts;
      if (fs::exists(dir / "config.toml")) {
        RunConfig cfg = load_run_config(dir / "config.toml");
        opts.annotators_per_image = cfg.annotation.annotators_per_image;
        opts.instructions = cfg.annotation.instructions;
      }
      if (!ui.empty()) opts.ui_dir = ui;
      AnnotationServer server(dir, opts);
      int bound = server.bind(host, port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on http://" << host << ":" << bound << std::endl;
      server.listen();
      g_server = nullptr;
    } else if (*glyphs) {
      std::string text = glyph_catalog_json();
      if (glyph_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(glyph_out, std::ios::binary) << text;
      }
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return e.code() == ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
