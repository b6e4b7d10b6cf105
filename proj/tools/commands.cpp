#include "commands.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>

#include "cdcv/error.hpp"

namespace cdcv::cli {
namespace fs = std::filesystem;

namespace {

std::string number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Json envelope(const char* command, const RunConfig& c) {
  return Json{{"schema_version", kSchemaVersion}, {"command", command}, {"config", to_json(c)}};
}

fs::path output(const RunConfig& c, const std::string& name) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw InputError("cannot create output directory '" + c.out + "': " + ec.message());
  return fs::path(c.out) / name;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

ReturnPanel load_data(const RunConfig& c) {
  if (c.data.empty()) throw InputError("no data path given (--data)");
  return load_panel(c.data);
}

// Resolves name-keyed market caps into panel column order.
CdcvConfig model_config(const RunConfig& c, const ReturnPanel& panel) {
  CdcvConfig m = c.model;
  if (!c.market_caps.empty()) {
    m.index.market_caps.clear();
    for (const auto& a : panel.assets) {
      auto it = c.market_caps.find(a);
      if (it == c.market_caps.end()) throw InputError("market_caps has no entry for asset '" + a + "'");
      m.index.market_caps.push_back(it->second);
    }
  }
  m.validate();
  return m;
}

Json window_json(const ReturnPanel& panel, std::size_t start, std::size_t length) {
  return Json{{"start", start},
              {"length", length},
              {"first_date", format_date(panel.dates[start])},
              {"last_date", format_date(panel.dates[start + length - 1])}};
}

Json selection_json(std::span<const CdcvModel> models) {
  Json rows = Json::array();
  for (const auto& r : selection_summary(models)) rows.push_back(r);
  return rows;
}

Json clusters_json(const CdcvModel& m) {
  Json out = Json::array();
  for (const auto& c : m.partition.clusters) {
    Json ids = Json::array();
    for (auto i : c) ids.push_back(m.assets[i]);
    out.push_back(ids);
  }
  return out;
}

}  // namespace

void cmd_generate(const RunConfig& c, std::ostream& log) {
  const auto sp = generate_factor_panel(c.generator);
  const auto csv = output(c, "panel.csv");
  save_panel(csv, sp.panel);
  Json doc = envelope("generate", c);
  Json sectors = Json::object();
  for (std::size_t i = 0; i < sp.panel.assets.size(); ++i) sectors[sp.panel.assets[i]] = "S" + std::to_string(sp.sector[i] + 1);
  doc["panel"] = csv.filename().string();
  doc["rows"] = sp.panel.rows();
  doc["assets"] = sp.panel.assets;
  doc["sectors"] = sectors;
  write_json(output(c, "generate.json"), doc);
  log << "wrote " << csv.string() << " (" << sp.panel.rows() << " rows, " << sp.panel.cols() << " assets)\n";
}

void cmd_fit(const RunConfig& c, std::ostream& log) {
  const auto panel = load_data(c);
  if (c.window > panel.rows()) {
    throw InputError("window " + std::to_string(c.window) + " exceeds the panel's " + std::to_string(panel.rows()) +
                     " rows");
  }
  const std::size_t start = c.start.value_or(panel.rows() - c.window);
  const auto window = panel.window({start, c.window});
  const auto model = fit_cdcv(window, model_config(c, panel), start);

  Json m = model;
  m["run_config"] = to_json(c);
  write_json(output(c, "model.json"), m);

  Json doc = envelope("fit", c);
  doc["window"] = window_json(panel, start, c.window);
  doc["clusters"] = clusters_json(model);
  doc["stalled"] = model.partition.stalled;
  doc["parameter_count"] = parameter_count(model);
  Json stages = Json::array();
  for (const auto& d : conditioning_diagnostics(model, window.returns)) stages.push_back(d);
  doc["stages"] = stages;
  doc["selection"] = selection_json(std::span<const CdcvModel>(&model, 1));
  write_json(output(c, "diagnostics.json"), doc);
  log << "fitted " << model.asset_count() << " assets in " << model.clusters.size() << " clusters on rows [" << start
      << ", " << start + c.window << ")\n";
}

void cmd_simulate(const RunConfig& c, std::ostream& log) {
  if (c.model_path.empty()) throw InputError("no model path given (--model)");
  if (c.samples < 1) throw InputError("samples must be >= 1");
  const auto model = model_from_json(read_json(c.model_path));
  const auto sims = simulate_cdcv(model, c.samples, c.model.seed);
  const auto csv = output(c, "simulated.csv");
  auto out = open_out(csv);
  out << "sample";
  for (const auto& a : model.assets) out << ',' << a;
  out << '\n';
  for (Eigen::Index r = 0; r < sims.rows(); ++r) {
    out << r;
    for (Eigen::Index j = 0; j < sims.cols(); ++j) out << ',' << number(sims(r, j));
    out << '\n';
  }
  if (!out) throw InputError("write failed for '" + csv.string() + "'");
  Json doc = envelope("simulate", c);
  doc["samples"] = c.samples;
  doc["assets"] = model.assets;
  doc["output"] = csv.filename().string();
  write_json(output(c, "simulate.json"), doc);
  log << "wrote " << c.samples << " samples of " << model.asset_count() << " assets to " << csv.string() << '\n';
}

void cmd_backtest(const RunConfig& c, std::ostream& log) {
  const auto panel = load_data(c);
  BacktestConfig bc;
  bc.window = c.window;
  bc.model = model_config(c, panel);
  bc.alphas = c.alphas;
  bc.modes = c.modes;
  bc.n_sims = c.n_sims;
  bc.max_steps = c.max_steps;
  bc.workers = c.workers;
  const auto result = rolling_backtest(panel, bc);

  for (const auto& f : result.failures) {
    log << "warning: step " << f.t << " (" << format_date(panel.dates[f.t]) << ") skipped: " << f.message << '\n';
  }
  Json doc = envelope("backtest", c);
  doc["steps_attempted"] = result.steps.size() + result.failures.size();
  doc["steps_counted"] = result.steps.size();
  Json failures = Json::array();
  for (const auto& f : result.failures) {
    failures.push_back({{"t", f.t}, {"date", format_date(panel.dates[f.t])}, {"message", f.message}});
  }
  doc["failures"] = failures;
  Json reports = Json::array();
  for (const auto& r : result.reports) reports.push_back(r);
  doc["reports"] = reports;
  Json steps = Json::array();
  for (const auto& s : result.steps) {
    steps.push_back({{"t", s.t},
                     {"date", format_date(panel.dates[s.t])},
                     {"var", s.var},
                     {"realized_within", s.realized_within},
                     {"realized_out", s.realized_out}});
  }
  doc["steps"] = steps;
  write_json(output(c, "backtest.json"), doc);
  const auto table = format_report_table(result.reports);
  auto txt = open_out(output(c, "backtest.txt"));
  txt << table;
  log << table;
}

void cmd_sweep(const RunConfig& c, std::ostream& log) {
  const auto panel = load_data(c);
  const auto base = model_config(c, panel);
  const auto values = c.sweep_values();
  const auto starts = window_starts(panel.rows(), c.window, c.windows);
  const auto rows = sweep(panel, base, c.axis, values, c.window, starts);

  auto csv = open_out(output(c, "sweep.csv"));
  csv << "value,windows,mean_clusters,mean,std,q1,q25,q50,q75,q99,abs_mean,abs_std,abs_q1,abs_q25,abs_q50,abs_q75,"
         "abs_q99\n";
  Json jr = Json::array();
  for (const auto& r : rows) {
    const auto& s = r.fully_conditioned;
    const auto& a = r.fully_conditioned_abs;
    csv << number(r.value) << ',' << r.windows << ',' << number(r.mean_clusters);
    for (double v : {s.mean, s.std, s.q1, s.q25, s.q50, s.q75, s.q99, a.mean, a.std, a.q1, a.q25, a.q50, a.q75, a.q99}) {
      csv << ',' << number(v);
    }
    csv << '\n';
    jr.push_back({{"value", r.value},
                  {"windows", r.windows},
                  {"mean_clusters", r.mean_clusters},
                  {"fully_conditioned", s},
                  {"fully_conditioned_abs", a}});
  }
  Json doc = envelope("sweep", c);
  doc["starts"] = starts;
  doc["rows"] = jr;
  write_json(output(c, "sweep.json"), doc);
  log << "swept " << to_string(c.axis) << " over " << values.size() << " settings x " << starts.size()
      << " windows\n";
}

void cmd_diagnostics(const RunConfig& c, std::ostream& log) {
  const auto panel = load_data(c);
  const auto starts = window_starts(panel.rows(), c.window, c.windows);
  const auto diags = rolling_diagnostics(panel, model_config(c, panel), c.window, starts);

  Json windows = Json::array();
  std::vector<CdcvModel> models;
  double params = 0.0;
  for (const auto& d : diags) {
    Json stages = Json::array();
    for (const auto& s : d.stages) stages.push_back(s);
    windows.push_back({{"window", window_json(panel, d.start, c.window)},
                       {"clusters", d.clusters},
                       {"parameter_count", d.parameters},
                       {"stages", stages}});
    params += d.parameters;
    models.push_back(d.model);
  }
  Json doc = envelope("diagnostics", c);
  doc["windows"] = windows;
  doc["mean_parameter_count"] = diags.empty() ? 0.0 : params / static_cast<double>(diags.size());
  doc["selection"] = selection_json(models);
  write_json(output(c, "rolling_diagnostics.json"), doc);
  log << "diagnosed " << diags.size() << " windows\n";
}

namespace {

struct Overrides {
  std::vector<std::function<void(Json&)>> patches;
  std::string config_path;
};

template <class T>
void flag(CLI::App* app, Overrides& o, const std::string& name, const std::string& key, const std::string& help) {
  auto value = std::make_shared<T>();
  auto* opt = app->add_option(name, *value, help);
  o.patches.push_back([opt, value, key](Json& patch) {
    if (opt->count() == 0) return;
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      patch[key] = *value;
    } else {
      patch[key.substr(0, dot)][key.substr(dot + 1)] = *value;
    }
  });
}

void model_flags(CLI::App* app, Overrides& o) {
  flag<std::string>(app, o, "--metric", "metric", "distance metric (default KendallTauBased)");
  flag<std::string>(app, o, "--linkage", "linkage", "linkage criterion (default AdaptedSingle)");
  flag<std::size_t>(app, o, "--a", "a", "maximum cluster size");
  flag<std::size_t>(app, o, "--b", "b", "number of clusters (default 15)");
  flag<double>(app, o, "--threshold", "threshold", "stop merging above this distance");
  flag<std::string>(app, o, "--index-rule", "index_rule", "index construction (default VolatilityWeighted)");
  flag<double>(app, o, "--upsilon", "upsilon", "index noise parameter, 0 disables noise (default 11)");
  flag<std::string>(app, o, "--market-source", "market_source", "FromAssets or FromClusterIndexes");
  flag<double>(app, o, "--severity", "severity", "Kendall-tau weighting severity");
  flag<std::vector<std::string>>(app, o, "--families", "families", "pair-copula families (G ST C F)");
  flag<std::string>(app, o, "--sampling", "sampling", "index sampling for simulation: Historical or Model");
  flag<bool>(app, o, "--joint-student", "joint_student", "allow a Student-t joint copula");
}

void data_flags(CLI::App* app, Overrides& o) {
  flag<std::string>(app, o, "--data", "data", "returns CSV (date,<asset>,...)");
  flag<std::size_t>(app, o, "--window", "window", "learning period in rows (default 150)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cluster-derived canonical vine copula toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cdcv 0.1.0");
  Overrides o;
  std::map<CLI::App*, std::function<void(const RunConfig&, std::ostream&)>> commands;

  auto add = [&](const char* name, const char* help, auto fn) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config_path, "JSON config file; flags override it");
    flag<std::string>(sub, o, "--out", "out", "output directory (default .)");
    flag<std::uint64_t>(sub, o, "--seed", "seed", "random seed");
    commands[sub] = fn;
    return sub;
  };

  auto* gen = add("generate", "write a synthetic two-level factor panel", cmd_generate);
  flag<std::size_t>(gen, o, "--sectors", "generator.sectors", "number of sectors");
  flag<std::size_t>(gen, o, "--assets-per-sector", "generator.assets_per_sector", "assets per sector");
  flag<std::size_t>(gen, o, "--rows", "generator.rows", "number of dates");
  flag<double>(gen, o, "--vol", "generator.vol", "return volatility");
  flag<std::string>(gen, o, "--innovation", "generator.innovation", "Gaussian or StudentT");
  flag<double>(gen, o, "--nu", "generator.nu", "Student-t degrees of freedom");
  flag<std::uint64_t>(gen, o, "--generator-seed", "generator.seed", "generator seed");

  auto* fit = add("fit", "fit one window and write the model and its diagnostics", cmd_fit);
  data_flags(fit, o);
  model_flags(fit, o);
  flag<std::size_t>(fit, o, "--start", "start", "first row of the window (default: most recent window)");

  auto* sim = add("simulate", "simulate returns from a fitted model", cmd_simulate);
  flag<std::string>(sim, o, "--model", "model", "model JSON written by fit");
  flag<std::size_t>(sim, o, "--samples", "samples", "number of samples (default 1000)");

  auto* bt = add("backtest", "rolling VaR backtest with the Kupiec test", cmd_backtest);
  data_flags(bt, o);
  model_flags(bt, o);
  flag<std::vector<double>>(bt, o, "--alphas", "alphas", "VaR levels in percent (default 95 99)");
  flag<std::vector<std::string>>(bt, o, "--modes", "modes", "WithinSample and/or OutOfSample");
  flag<std::size_t>(bt, o, "--n-sims", "n_sims", "Monte Carlo draws per step (default 10000)");
  flag<std::size_t>(bt, o, "--max-steps", "max_steps", "limit on the number of steps, 0 for all");
  flag<unsigned>(bt, o, "--workers", "workers", "worker threads, 0 for all cores");

  auto* sw = add("sweep", "residual correlation summary over cluster counts or noise levels", cmd_sweep);
  data_flags(sw, o);
  model_flags(sw, o);
  flag<std::string>(sw, o, "--axis", "axis", "clusters (b) or upsilon");
  flag<std::vector<double>>(sw, o, "--values", "values", "settings (default 3..18 or 6..15)");
  flag<std::size_t>(sw, o, "--windows", "windows", "number of sampled windows (default 50)");

  auto* dg = add("diagnostics", "conditioning and selection diagnostics over rolling windows", cmd_diagnostics);
  data_flags(dg, o);
  model_flags(dg, o);
  flag<std::size_t>(dg, o, "--windows", "windows", "number of sampled windows (default 50)");

  auto error = [&err](int code, const char* kind, const std::string& message) {
    err << Json{{"schema_version", kSchemaVersion}, {"error", {{"code", code}, {"kind", kind}, {"message", message}}}}
               .dump()
        << '\n';
    return code;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    return error(2, "UsageError", e.what());
  }

  try {
    RunConfig config;
    if (!o.config_path.empty()) apply_json(config, read_json(o.config_path));
    Json patch = Json::object();
    for (const auto& p : o.patches) p(patch);
    apply_json(config, patch);
    for (auto* sub : app.get_subcommands()) commands.at(sub)(config, out);
    return 0;
  } catch (const InputError& e) {
    return error(2, "InputError", e.what());
  } catch (const NumericalError& e) {
    return error(1, "NumericalError", e.what());
  } catch (const std::exception& e) {
    return error(1, "InternalError", e.what());
  }
}

}  // namespace cdcv::cli
