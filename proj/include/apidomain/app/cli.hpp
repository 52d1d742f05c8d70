#pragma once

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "apidomain/app/commands.hpp"
#include "apidomain/common/parallel.hpp"

namespace apidomain::cli {

struct Streams {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
  std::istream& in = std::cin;
};

/// Whole front end; returns the process exit code. `factory` replaces the
/// GitHub client (tests point it at a local server).
inline int run(const std::vector<std::string>& args, Streams io = {},
               decltype(Context::tracker_factory) factory = {}) {
  CLI::App app{"API-domain labeling of issue trackers", "apidomain"};
  app.require_subcommand(1);
  std::string config_path = "apidomain.ini";
  unsigned jobs = 0;
  std::string log_level = "warn";
  app.add_option("-c,--config", config_path, "experiment configuration (INI)");
  app.add_option("-j,--jobs", jobs, "worker threads (0 = hardware concurrency)");
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  std::vector<std::string> projects;
  auto add_projects = [&](CLI::App* c) {
    c->add_option("-p,--project", projects, "restrict to these projects (repeatable)");
  };

  MineOptions mine_o;
  auto* c_mine = app.add_subcommand("mine", "fetch closed issues and merged changes, link them");
  add_projects(c_mine);
  std::string since;
  c_mine->add_option("--since", since, "only issues updated at or after this ISO-8601 time");

  auto* c_parse = app.add_subcommand("parse", "index the source checkout and its imports");
  add_projects(c_parse);

  ClassifyOptions cls_o;
  auto* c_cls = app.add_subcommand("classify-apis", "review namespace tokens into API domains");
  add_projects(c_cls);
  c_cls->add_option("--decisions", cls_o.decisions, "scripted decisions CSV (position,token,decision)");
  c_cls->add_flag("--interactive", cls_o.interactive, "prompt on the terminal even if decisions are configured");

  auto* c_build = app.add_subcommand("build-dataset", "clean text, label issues, vectorize");
  add_projects(c_build);

  TrainOptions tr_o;
  auto* c_train = app.add_subcommand("train", "train a multi-label model on a dataset");
  c_train->add_option("--dataset", tr_o.dataset, "dataset directory")->required();
  c_train->add_option("-o,--out", tr_o.out, "model file")->required();

  EvaluateOptions ev_o;
  std::string mode;
  auto* c_eval = app.add_subcommand("evaluate", "run the configured experiment, or score a model");
  c_eval->add_option("--model", ev_o.model, "trained model file");
  c_eval->add_option("--dataset", ev_o.dataset, "dataset directory (with --model)");
  c_eval->add_option("--mode", mode, "per_project|merged|transfer (default from config)");
  c_eval->add_option("-o,--out", ev_o.out, "report directory");

  std::filesystem::path transfer_out;
  auto* c_transfer = app.add_subcommand("transfer", "train on some projects, test on another");
  c_transfer->add_option("-o,--out", transfer_out, "report directory");

  PredictOptions pr_o;
  auto* c_pred = app.add_subcommand("predict", "predict domains for open issues");
  c_pred->add_option("--model", pr_o.model, "trained model file")->required();
  c_pred->add_option("-p,--project", pr_o.project, "project")->required();
  c_pred->add_option("-o,--out", pr_o.out, "predictions JSONL")->required();

  ApplyCliOptions ap_o;
  auto* c_apply = app.add_subcommand("apply-labels", "write predicted domains back as labels");
  c_apply->add_option("--predictions", ap_o.predictions, "predictions JSONL")->required();
  c_apply->add_option("-p,--project", ap_o.project, "project")->required();
  c_apply->add_flag("--live", ap_o.live, "perform writes (default is a dry run)");
  c_apply->add_option("-o,--out", ap_o.out, "write an apply report JSON");

  ReportOptions rp_o;
  auto* c_report = app.add_subcommand("report", "aggregate and compare evaluation reports");
  c_report->add_option("--reports", rp_o.reports, "directory of report JSON files");
  c_report->add_option("--compare", rp_o.compare, "second directory; runs a Mann-Whitney U test");
  c_report->add_option("--metric", rp_o.metric, "metric to compare (default micro_f)");
  c_report->add_option("--dataset", rp_o.dataset, "export this dataset's label co-occurrence");
  c_report->add_option("-o,--out", rp_o.out, "output file");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, io.out, io.err);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::user_error);
  }

  try {
    spdlog::set_level(spdlog::level::from_str(log_level));
    Context ctx;
    ctx.jobs = jobs == 0 ? static_cast<unsigned>(default_jobs()) : jobs;
    ctx.out = &io.out;
    ctx.tracker_factory = std::move(factory);
    ctx.cfg = load_config(config_path);
    ctx.cfg.validate();

    if (c_mine->parsed()) {
      mine_o.projects = projects;
      if (!since.empty()) mine_o.since = since;
      mine(ctx, mine_o);
    } else if (c_parse->parsed()) {
      parse(ctx, projects);
    } else if (c_cls->parsed()) {
      cls_o.projects = projects;
      classify_apis(ctx, cls_o, io.in);
    } else if (c_build->parsed()) {
      build_dataset(ctx, {projects});
    } else if (c_train->parsed()) {
      train(ctx, tr_o);
    } else if (c_eval->parsed()) {
      if (!mode.empty()) ev_o.mode = parse_mode(mode);
      if (ev_o.mode == ExperimentMode::transfer) ctx.cfg.validate_transfer();
      evaluate(ctx, ev_o);
    } else if (c_transfer->parsed()) {
      transfer(ctx, transfer_out);
    } else if (c_pred->parsed()) {
      predict(ctx, pr_o);
    } else if (c_apply->parsed()) {
      apply(ctx, ap_o);
    } else if (c_report->parsed()) {
      report(ctx, rp_o);
    }
    return 0;
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const nlohmann::json::exception& e) {
    io.err << "error: malformed JSON input: " << e.what() << "\n";
    return static_cast<int>(ExitCode::data_error);
  } catch (const std::filesystem::filesystem_error& e) {
    io.err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::user_error);
  }
}

}  // namespace apidomain::cli
