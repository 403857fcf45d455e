// Copyright 2026 The stlnpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// stlnpc command-line tool: train, eval, monitor, ablate, backup-eval.
//
// stdout carries artifact paths (and the monitor table); progress goes to
// stderr. Exit codes: 0 success, 1 runtime or I/O failure, 2 bad usage or
// configuration or input, 3 numeric failure (a training abort, for example).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stlnpc/bench/registry.hpp"
#include "stlnpc/deploy/evaluate.hpp"
#include "stlnpc/io/config.hpp"
#include "stlnpc/io/report.hpp"
#include "stlnpc/stl/parser.hpp"
#include "stlnpc/stl/trace_io.hpp"
#include "stlnpc/train/ablation.hpp"
#include "stlnpc/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace stlnpc;

namespace {

class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string config_path;
  std::string benchmark;
  std::optional<long long> seed;
  std::optional<int> threads;
  std::string out = "stlnpc_out";
  std::vector<std::string> sets;
  // eval / backup-eval
  std::string policy;
  std::string planner;
  std::string backup;
  std::optional<int> episodes;
  std::optional<int> len;
  // monitor
  std::string trace = "-";
  std::string formula;
  std::string formula_file;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "key = value config file");
  cmd->add_option("--benchmark", o.benchmark, "benchmark id");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--threads", o.threads, "worker threads (default: $STLNPC_THREADS, else 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--set", o.sets, "extra config entry KEY=VALUE (repeatable)");
}

/// Config file, then --set entries, then explicit flags.
io::Config load_config(const Options& o) {
  io::Config c;
  if (!o.config_path.empty()) c = io::Config::from_file(o.config_path);
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects KEY=VALUE, got '" + s + "'");
    c.set(io::trim(s.substr(0, eq)), io::trim(s.substr(eq + 1)));
  }
  if (o.seed) c.set("seed", std::to_string(*o.seed));
  int threads = 0;
  if (o.threads) {
    threads = *o.threads;
  } else if (const char* env = std::getenv("STLNPC_THREADS"); env != nullptr && *env != '\0') {
    try {
      threads = static_cast<int>(parse_double(env));
    } catch (const ConfigError&) {
      throw UsageError(std::string("STLNPC_THREADS must be a positive integer, got '") + env + "'");
    }
    if (threads < 1) throw UsageError("STLNPC_THREADS must be a positive integer");
  }
  if (threads > 0) c.set("threads", std::to_string(threads));
  if (!o.benchmark.empty()) c.set("benchmark", o.benchmark);
  return c;
}

bench::Benchmark load_benchmark(const io::Config& c) {
  const std::string id = c.get_string("benchmark", "");
  if (id.empty()) throw UsageError("no benchmark given; valid ids: " + bench::valid_ids());
  return bench::make_benchmark(id, c, static_cast<std::uint64_t>(c.get_int("benchmark_seed", 0)));
}

fs::path out_dir(const Options& o) {
  fs::path p(o.out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory '" + o.out + "': " + ec.message());
  return p;
}

template <class F>
void write_file(const fs::path& path, F&& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  body(os);
  os.flush();
  if (!os) throw IoError("failed writing '" + path.string() + "'");
  std::cout << path.string() << "\n";
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, [&](std::ostream& os) { os << text; });
}

std::uint64_t seed_of(const io::Config& c) { return static_cast<std::uint64_t>(c.get_int("seed", 0)); }

int cmd_train(const Options& o) {
  const io::Config c = load_config(o);
  const auto b = load_benchmark(c);
  const auto cfg = train::TrainConfig::from_config(c);
  const auto dir = out_dir(o);
  std::cerr << "training " << b.id << ": " << cfg.steps << " steps, N=" << cfg.n_train
            << ", net " << train::hidden_name(cfg.hidden) << ", seed " << cfg.seed << "\n";
  const auto res = train::train(b, cfg, [](const train::MetricRow& r) {
    std::cerr << "step " << r.step << " loss " << format_double(r.loss) << " train_acc "
              << format_double(r.train_acc) << " val_acc " << format_double(r.val_acc) << "\n";
  });
  write_file(dir / "policy.ckpt", [&](std::ostream& os) { res.best.save(os); });
  write_file(dir / "policy_last.ckpt", [&](std::ostream& os) { res.last.save(os); });
  write_file(dir / "metrics.csv", [&](std::ostream& os) { train::write_metrics_csv(os, res.metrics); });
  write_text(dir / "loss.svg", io::training_plot(res.metrics, b.id + " training"));
  std::cerr << "best val_acc " << format_double(res.best_val) << " at step " << res.best_step << "\n";
  return 0;
}

std::shared_ptr<const policy::PolicyNet> load_policy(const std::string& path, const bench::Benchmark& b) {
  if (!fs::exists(path)) throw IoError("checkpoint '" + path + "' does not exist");
  auto net = std::make_shared<const policy::PolicyNet>(policy::PolicyNet::load_file(path));
  if (net->input_dim() != b.system->state_dim() || net->control_dim() != b.system->control_dim() ||
      static_cast<int>(net->horizon()) != b.horizon()) {
    throw UsageError("checkpoint '" + path + "' does not match benchmark " + b.id);
  }
  return net;
}

deploy::EvalConfig eval_config(const Options& o, const io::Config& c) {
  deploy::EvalConfig e;
  e.episodes = o.episodes ? *o.episodes : static_cast<int>(c.get_int("episodes", 20));
  e.length = o.len ? *o.len : static_cast<int>(c.get_int("len", 0));
  e.seed = seed_of(c);
  if (e.episodes < 0) throw UsageError("--episodes must be non-negative");
  if (e.length < 0) throw UsageError("--len must be non-negative");
  return e;
}

void report_files(const fs::path& dir, const std::string& suffix, const deploy::EvalReport& rep,
                  const std::string& title) {
  write_file(dir / ("episodes" + suffix + ".jsonl"),
             [&](std::ostream& os) { io::write_episodes_jsonl(os, rep); });
  write_text(dir / ("trajectories" + suffix + ".svg"), io::trajectory_plot(rep, title));
}

void log_report(const std::string& label, const deploy::EvalReport& rep) {
  std::cerr << label << ": stl_accuracy " << format_double(rep.stl_accuracy) << " safety_rate "
            << format_double(rep.safety_rate) << " ms_per_step " << format_double(rep.ms_per_step)
            << (rep.no_data ? " (no data)" : "") << "\n";
}

int cmd_eval(const Options& o) {
  const io::Config c = load_config(o);
  const auto b = load_benchmark(c);
  if (o.policy.empty() == o.planner.empty()) throw UsageError("eval needs exactly one of --policy or --planner");
  const auto ecfg = eval_config(o, c);
  deploy::Controller ctl;
  std::string label;
  bool backup = false;
  if (!o.policy.empty()) {
    const auto net = load_policy(o.policy, b);
    backup = o.backup.empty() ? c.get_bool("backup", true) : o.backup == "on";
    std::shared_ptr<const deploy::BackupConfig> bc;
    if (backup) bc = std::make_shared<const deploy::BackupConfig>(deploy::backup_for(b, c));
    ctl = deploy::policy_controller(net, b, bc);
    label = "policy";
  } else {
    if (o.backup == "on") throw UsageError("--backup on needs --policy");
    label = o.planner;
    if (o.planner == "cem") {
      auto cc = deploy::CemConfig::from_config(c);
      cc.seed = seed_of(c);
      ctl = deploy::cem_controller(b, cc);
    } else if (o.planner == "shoot") {
      ctl = deploy::shoot_controller(b, static_cast<int>(c.get_int("shoot_population", 64)), seed_of(c));
    } else {
      ctl = deploy::grad_controller(b, deploy::GradPlanConfig::from_config(c));
    }
  }
  const auto rep = deploy::evaluate(b, ctl, ecfg);
  const auto dir = out_dir(o);
  report_files(dir, "", rep, b.id + " " + label);
  write_file(dir / "summary.csv", [&](std::ostream& os) {
    io::write_summary_header(os);
    io::write_summary_row(os, b.id, label, backup, rep);
  });
  log_report(label, rep);
  return 0;
}

int cmd_backup_eval(const Options& o) {
  const io::Config c = load_config(o);
  const auto b = load_benchmark(c);
  if (o.policy.empty()) throw UsageError("backup-eval needs --policy");
  const auto ecfg = eval_config(o, c);
  const auto net = load_policy(o.policy, b);
  const auto bc = std::make_shared<const deploy::BackupConfig>(deploy::backup_for(b, c));
  const auto off = deploy::evaluate(b, deploy::policy_controller(net, b), ecfg);
  const auto on = deploy::evaluate(b, deploy::policy_controller(net, b, bc), ecfg);
  const auto dir = out_dir(o);
  report_files(dir, "_backup_off", off, b.id + " without backup");
  report_files(dir, "_backup_on", on, b.id + " with backup");
  write_file(dir / "summary.csv", [&](std::ostream& os) {
    io::write_summary_header(os);
    io::write_summary_row(os, b.id, "policy", false, off);
    io::write_summary_row(os, b.id, "policy", true, on);
  });
  log_report("backup off", off);
  log_report("backup on", on);
  return 0;
}

std::string read_all(std::istream& is) {
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int cmd_monitor(const Options& o) {
  const io::Config c = load_config(o);
  stl::Trace trace;
  if (o.trace == "-") {
    trace = stl::read_trace(std::cin, "stdin");
  } else {
    if (!fs::exists(o.trace)) throw IoError("trace file '" + o.trace + "' does not exist");
    trace = stl::read_trace_file(o.trace);
  }
  std::string text = o.formula;
  if (!o.formula_file.empty()) {
    if (!text.empty()) throw UsageError("give either --formula or --formula-file, not both");
    std::ifstream is(o.formula_file);
    if (!is) throw IoError("cannot open formula file '" + o.formula_file + "'");
    text = read_all(is);
  }
  if (text.empty() && c.has("benchmark")) text = load_benchmark(c).phi_text;
  if (text.empty()) throw UsageError("monitor needs --formula, --formula-file or --benchmark");
  const auto phi = stl::parse_formula(text, trace.schema());
  const auto rows = io::monitor(trace, phi);
  std::ostringstream table;
  io::write_monitor_csv(table, rows);
  std::cout << table.str();
  if (!o.out.empty()) write_text(out_dir(o) / "monitor.csv", table.str());
  return 0;
}

int cmd_ablate(const Options& o) {
  const io::Config c = load_config(o);
  const auto b = load_benchmark(c);
  const auto base = train::TrainConfig::from_config(c);
  const auto spec = train::AblationSpec::from_config(c);
  const auto dir = out_dir(o);
  const auto rows = train::run_ablation(b, base, spec, [](const train::AblationRow& r) {
    std::cerr << r.factor << "=" << r.value << ": train_acc " << format_double(r.train_acc)
              << " val_acc " << format_double(r.val_acc) << " best_val " << format_double(r.best_val)
              << "\n";
  });
  write_file(dir / "ablation.csv", [&](std::ostream& os) { train::write_ablation_csv(os, rows); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stlnpc: neural controllers for signal temporal logic formulas"};
  app.require_subcommand(1);
  Options o;

  auto* train_cmd = app.add_subcommand("train", "train a policy; writes checkpoint, metrics CSV and loss plot");
  add_common(train_cmd, o);

  auto* eval_cmd = app.add_subcommand("eval", "closed-loop evaluation of a policy or a planning baseline");
  add_common(eval_cmd, o);
  auto add_eval = [&](CLI::App* cmd) {
    cmd->add_option("--policy", o.policy, "policy checkpoint");
    cmd->add_option("--episodes", o.episodes, "number of episodes");
    cmd->add_option("--len", o.len, "steps per episode (0: benchmark default)");
  };
  add_eval(eval_cmd);
  eval_cmd->add_option("--planner", o.planner, "planning baseline instead of a policy")
      ->check(CLI::IsMember({"cem", "shoot", "grad"}));
  eval_cmd->add_option("--backup", o.backup, "backup search for the policy (default on)")
      ->check(CLI::IsMember({"on", "off"}));

  auto* backup_cmd = app.add_subcommand("backup-eval", "evaluate a policy with and without the backup search");
  add_common(backup_cmd, o);
  add_eval(backup_cmd);

  auto* monitor_cmd = app.add_subcommand("monitor", "robustness and verdict of a formula along a trace");
  add_common(monitor_cmd, o);
  monitor_cmd->add_option("trace", o.trace, "trace file, or - for stdin");
  monitor_cmd->add_option("--formula", o.formula, "formula text");
  monitor_cmd->add_option("--formula-file", o.formula_file, "file holding the formula");

  auto* ablate_cmd = app.add_subcommand("ablate", "one-factor sweeps over gamma, k, network size and N");
  add_common(ablate_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (monitor_cmd->parsed() && monitor_cmd->count("--out") == 0) o.out.clear();

  try {
    if (train_cmd->parsed()) return cmd_train(o);
    if (eval_cmd->parsed()) return cmd_eval(o);
    if (backup_cmd->parsed()) return cmd_backup_eval(o);
    if (monitor_cmd->parsed()) return cmd_monitor(o);
    if (ablate_cmd->parsed()) return cmd_ablate(o);
  } catch (const NumericError& e) {
    std::cerr << "error: numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const HorizonError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
