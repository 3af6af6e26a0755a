#include "cli.hpp"

#include "dynex/csv.hpp"
#include "dynex/dsl.hpp"
#include "dynex/exploitation.hpp"
#include "dynex/graph.hpp"
#include "dynex/loops.hpp"
#include "dynex/scenario.hpp"
#include "dynex/steady_state.hpp"
#include "dynex/validate.hpp"
#include "dynex/willingness.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace dynex::cli {

namespace {

// Bad invocation: exit 2.
struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Already reported on the error stream: exit 1.
struct Reported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Usage("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos)
    return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"')
      q += '"';
    q += c;
  }
  return q + '"';
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i)
      out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty())
      out.push_back(cur);
  return out;
}

struct Context {
  std::ostream& out;
  std::ostream& err;

  void report(const std::string& path, const ValidationReport& r) const {
    for (const auto& f : r.findings)
      err << path << ": " << (f.severity == Severity::error ? "error" : "warning") << ": " << f.location
          << ": " << f.message << '\n';
  }

  ModelSpec load_model(const std::string& path) const {
    const std::string text = read_file(path);
    try {
      return parse_model(text);
    } catch (const ParseError& e) {
      err << path << ":" << e.what() << '\n';
      throw Reported("parse error");
    } catch (const ValidationErrors& e) {
      report(path, e.report());
      throw Reported("invalid model");
    }
  }

  template <class F>
  auto parse_file(const std::string& path, F parse) const {
    const std::string text = read_file(path);
    try {
      return parse(text);
    } catch (const ParseError& e) {
      err << path << ":" << e.what() << '\n';
      throw Reported("parse error");
    }
  }
};

struct RunFlags {
  double t_start = 0.0;
  double t_end = 0.0;
  double dt = 0.125;
  std::string integrator = "rk4";
  long save_every = 1;

  void add(CLI::App* app, double default_end, bool require_end) {
    t_end = default_end;
    auto* end = app->add_option("--t-end", t_end, "End time");
    if (require_end)
      end->required();
    else
      end->capture_default_str();
    app->add_option("--t-start", t_start, "Start time")->capture_default_str();
    app->add_option("--dt", dt, "Step size")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--integrator", integrator, "euler or rk4")
        ->capture_default_str()
        ->check(CLI::IsMember({"euler", "rk4"}));
    app->add_option("--save-every", save_every, "Keep every K-th step")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  }

  RunConfig config() const {
    RunConfig cfg;
    cfg.t_start = t_start;
    cfg.t_end = t_end;
    cfg.dt = dt;
    cfg.integrator = integrator == "euler" ? IntegratorKind::euler : IntegratorKind::rk4;
    cfg.save_every = save_every;
    return cfg;
  }
};

struct SteadyFlags {
  double tol = 1e-6;
  double window = 50.0;
  bool cold = false;

  void add(CLI::App* app) {
    app->add_option("--tol", tol, "Steady-state tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--window", window, "Trailing window checked for steady state")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_flag("--cold", cold, "Start from the model's own initial values instead of its steady state");
  }

  SteadyOptions options() const { return {tol, window}; }
};

// Writes through `out`, or to a file.
template <class F>
void emit(const Context& ctx, const std::string& target, F write) {
  if (target == "-") {
    write(ctx.out);
    ctx.out.flush();
    return;
  }
  std::ofstream file(target, std::ios::binary);
  if (!file)
    throw Usage("cannot write '" + target + "'");
  write(file);
  file.flush();
  if (!file)
    throw SinkError("write to '" + target + "' failed");
}

int cmd_validate(const Context& ctx, const std::string& path) {
  const std::string text = read_file(path);
  ModelSpec spec;
  try {
    spec = parse_model_unchecked(text);
  } catch (const ParseError& e) {
    ctx.err << path << ":" << e.what() << '\n';
    return kFailure;
  }
  const auto report = validate_model(spec);
  ctx.report(path, report);
  const std::size_t errors = report.error_count();
  ctx.err << path << ": " << errors << " error(s), " << report.findings.size() - errors << " warning(s)\n";
  return report.ok() ? kOk : kFailure;
}

int cmd_simulate(const Context& ctx, const std::string& path, const RunFlags& run, const std::string& target,
                 const std::string& vars) {
  const ModelSpec spec = ctx.load_model(path);
  std::vector<std::string> columns = split(vars, ',');
  if (vars.empty()) {
    for (const auto& s : spec.stocks)
      columns.push_back(s.id);
    for (const auto& a : spec.auxes)
      columns.push_back(a.id);
  }
  for (const auto& c : columns)
    if (!spec.kind_of(c))
      throw Usage("unknown variable '" + c + "' in --vars");
  const Trajectory traj = simulate(spec, run.config());
  emit(ctx, target, [&](std::ostream& os) { write_csv(traj, columns, os); });
  return kOk;
}

int cmd_loops(const Context& ctx, const std::string& path, std::size_t max_len, const std::string& expect,
              std::optional<double> at, double dt) {
  const ModelSpec spec = ctx.load_model(path);
  ValueMap point;
  double time = 0.0;
  if (at) {
    RunConfig cfg;
    cfg.t_start = 0.0;
    cfg.t_end = *at;
    cfg.dt = dt;
    point = simulate(spec, cfg).final_values();
    time = *at;
  } else {
    point = baseline_operating_point(spec);
  }
  const auto report = enumerate_cycles(signed_graph(spec, point, time), max_len);
  if (report.truncated)
    ctx.err << "warning: cycles longer than " << max_len << " exist and were not listed\n";

  if (expect.empty()) {
    ctx.out << "loop,polarity,length,nodes\n";
    for (std::size_t i = 0; i < report.loops.size(); ++i) {
      const auto& l = report.loops[i];
      ctx.out << i + 1 << ',' << polarity_name(l.polarity) << ',' << l.cycle.nodes.size() << ','
              << join(l.cycle.nodes, ";") << '\n';
    }
    return kOk;
  }

  const auto named = fig2_loops();
  const auto matches = match_named_loops(report, named);
  ctx.out << "label,expected,status,nodes\n";
  for (const auto& m : matches.matches) {
    ctx.out << m.label << ',' << polarity_name(m.expected) << ',' << match_status_name(m.status) << ',';
    if (m.loop)
      ctx.out << join(report.loops[*m.loop].cycle.nodes, ";");
    ctx.out << '\n';
  }
  if (!matches.all_found()) {
    ctx.err << "not every expected loop was found\n";
    return kFailure;
  }
  return kOk;
}

int cmd_probes(const Context& ctx, const std::string& path, const std::vector<std::string>& names) {
  const ModelSpec spec = ctx.load_model(path);
  std::vector<Probe> probes;
  for (const auto& n : names) {
    const auto p = probe_from_name(n);
    if (!p)
      throw Usage("unknown probe '" + n + "'");
    probes.push_back(*p);
  }
  if (probes.empty())
    probes.assign(std::begin(kAllProbes), std::end(kAllProbes));

  bool ok = true;
  ctx.out << "probe,status,time,detail\n";
  for (Probe p : probes) {
    try {
      const auto r = loop_probe(spec, p);
      ctx.out << probe_name(p) << ",pass,," << csv_field(r.detail) << '\n';
    } catch (const PatternViolation& v) {
      ok = false;
      ctx.out << probe_name(p) << ",fail," << format_shortest(v.time()) << ',' << csv_field(v.what()) << '\n';
    }
  }
  return ok ? kOk : kFailure;
}

ModelSpec starting_point(const Context& ctx, const ModelSpec& spec, const RunConfig& cfg,
                         const SteadyFlags& steady) {
  if (steady.cold)
    return spec;
  try {
    return warm_start(spec, cfg, steady.tol, steady.window);
  } catch (const NotConverged& e) {
    ctx.err << "baseline did not settle: " << e.what() << " (try --cold or a longer --t-end)\n";
    throw Reported("baseline did not settle");
  }
}

MetricMap model_metrics(const ModelSpec& spec) {
  auto metrics = metrics_for(spec);
  if (metrics.empty())
    throw Usage("model has none of the variables read by the metrics");
  return metrics;
}

int cmd_scenario(const Context& ctx, const std::string& path, const std::string& scenario_path,
                 const RunFlags& run, const SteadyFlags& steady) {
  const ModelSpec spec = ctx.load_model(path);
  const auto scenarios = ctx.parse_file(scenario_path, parse_scenarios);
  if (scenarios.empty())
    throw Usage("'" + scenario_path + "' declares no scenarios");
  const RunConfig cfg = run.config();
  const auto metrics = model_metrics(spec);
  const ModelSpec start = starting_point(ctx, spec, cfg, steady);

  const auto baseline = run_scenario(start, Composite{}, cfg, "baseline", steady.options(), metrics);
  std::vector<ScenarioResult> results;
  for (const auto& s : scenarios)
    results.push_back(run_scenario(start, s.policy, cfg, s.name, steady.options(), metrics));
  const auto table = compare(results, baseline);

  ctx.out << "scenario,metric,baseline,value,abs_diff,pct_diff\n";
  for (const auto& r : table.rows)
    ctx.out << csv_field(r.scenario) << ',' << r.metric << ',' << format_shortest(r.baseline) << ','
            << format_shortest(r.value) << ',' << format_shortest(r.abs_diff) << ','
            << format_shortest(r.pct_diff) << '\n';
  return kOk;
}

int cmd_sweep(const Context& ctx, const std::string& path, const std::string& plan_path, const RunFlags& run,
              const SteadyFlags& steady, unsigned threads) {
  const ModelSpec spec = ctx.load_model(path);
  SweepPlan plan = ctx.parse_file(plan_path, parse_sweep_plan);
  plan.run = run.config();
  const auto metrics = model_metrics(spec);
  std::vector<std::string> ids;
  for (const auto& a : plan.grid)
    ids.push_back(a.id);
  for (const auto& r : plan.ranges)
    ids.push_back(r.id);
  for (const auto& id : ids)
    if (!spec.find_param(id))
      throw Usage("'" + id + "' in '" + plan_path + "' is not a parameter of the model");

  const ModelSpec start = starting_point(ctx, spec, plan.run, steady);
  const auto outcomes = sweep(start, plan, steady.options(), metrics, threads);

  ctx.out << "point";
  for (const auto& id : ids)
    ctx.out << ',' << id;
  for (const auto& m : metrics)
    ctx.out << ',' << m.first;
  ctx.out << ",status\n";
  bool ok = true;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    ctx.out << i;
    for (const auto& [id, value] : o.point)
      ctx.out << ',' << format_shortest(value);
    for (const auto& m : metrics) {
      ctx.out << ',';
      if (o.result)
        ctx.out << format_shortest(o.result->metrics.at(m.first));
    }
    ctx.out << (o.result ? ",ok\n" : ",failed\n");
    if (!o.result) {
      ok = false;
      ctx.err << "point " << i << ": " << o.failure << '\n';
    }
  }
  return ok ? kOk : kFailure;
}

CurveAnchor parse_anchor(const std::string& text) {
  const auto comma = text.find(',');
  CurveAnchor a{};
  auto number = [&](std::string_view s, double& v) {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
  };
  const std::string_view sv = text;
  if (comma == std::string::npos || !number(sv.substr(0, comma), a.ratio) ||
      !number(sv.substr(comma + 1), a.fraction))
    throw Usage("--anchor expects RATIO,FRACTION, got '" + text + "'");
  return a;
}

int cmd_calibrate(const Context& ctx, const std::string& kind, const std::vector<std::string>& anchor_text) {
  std::vector<CurveAnchor> anchors;
  for (const auto& t : anchor_text)
    anchors.push_back(parse_anchor(t));
  const CurveKind k = kind == "normal"      ? CurveKind::normal
                      : kind == "lognormal" ? CurveKind::lognormal
                                            : CurveKind::piecewise;
  const auto curve = calibrate(k, anchors);
  ctx.out << "kind=" << kind << '\n';
  if (const auto* n = std::get_if<NormalCdf>(&curve)) {
    ctx.out << "mu=" << format_shortest(n->mu) << "\nsigma=" << format_shortest(n->sigma) << '\n';
  } else if (const auto* l = std::get_if<LogNormalCdf>(&curve)) {
    ctx.out << "log_median=" << format_shortest(l->log_median) << "\nlog_sigma=" << format_shortest(l->log_sigma)
            << '\n';
  } else {
    for (const auto& p : std::get<PiecewiseCumulative>(curve).points)
      ctx.out << "point=" << format_shortest(p.ratio) << ',' << format_shortest(p.fraction) << '\n';
  }
  for (const auto& a : anchors)
    ctx.err << "F(" << format_shortest(a.ratio) << ") = " << format_shortest(fraction_willing(curve, a.ratio))
            << " (target " << format_shortest(a.fraction) << ")\n";
  return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Context ctx{out, err};
  CLI::App app{"System dynamics models of labor exploitation", "dynex"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  std::function<int()> action;

  std::string model, second, target = "-", vars, expect, kind;
  std::vector<std::string> anchors, probe_names;
  RunFlags run_flags;
  SteadyFlags steady_flags;
  std::size_t max_len = 12;
  std::optional<double> at;
  unsigned threads = 0;

  auto* validate = app.add_subcommand("validate", "Check a model file; findings go to standard error");
  validate->add_option("model", model, "Model file")->required();
  validate->callback([&] { action = [&] { return cmd_validate(ctx, model); }; });

  auto* simulate_cmd = app.add_subcommand("simulate", "Run a model and write its trajectory as CSV");
  simulate_cmd->add_option("model", model, "Model file")->required();
  run_flags.add(simulate_cmd, 0.0, true);
  simulate_cmd->add_option("--out", target, "Output file, - for standard output")->capture_default_str();
  simulate_cmd->add_option("--vars", vars, "Comma-separated columns (default: stocks and auxiliaries)");
  simulate_cmd->callback([&] { action = [&] { return cmd_simulate(ctx, model, run_flags, target, vars); }; });

  auto* loops = app.add_subcommand("loops", "List feedback loops at an operating point");
  loops->add_option("model", model, "Model file")->required();
  loops->add_option("--max-len", max_len, "Longest loop listed")->capture_default_str()->check(CLI::PositiveNumber);
  loops->add_option("--expect", expect, "Named loop set to match")->check(CLI::IsMember({"fig2"}));
  loops->add_option("--at", at, "Linearize at this time of a run from t=0 instead of at steady state")
      ->check(CLI::NonNegativeNumber);
  loops->add_option("--dt", run_flags.dt, "Step size for --at")->capture_default_str()->check(CLI::PositiveNumber);
  loops->callback([&] { action = [&] { return cmd_loops(ctx, model, max_len, expect, at, run_flags.dt); }; });

  auto* probes = app.add_subcommand("probes", "Check the qualitative signature of each named loop");
  probes->add_option("model", model, "Model file")->required();
  probes->add_option("--probe", probe_names, "Probe to run (repeatable; default: all)");
  probes->callback([&] { action = [&] { return cmd_probes(ctx, model, probe_names); }; });

  auto* scenario = app.add_subcommand("scenario", "Compare policy scenarios against the baseline");
  scenario->add_option("model", model, "Model file")->required();
  scenario->add_option("scenarios", second, "Scenario file")->required();
  run_flags.add(scenario, 2000.0, false);
  steady_flags.add(scenario);
  scenario->callback([&] { action = [&] { return cmd_scenario(ctx, model, second, run_flags, steady_flags); }; });

  auto* sweep_cmd = app.add_subcommand("sweep", "Run every point of a parameter plan");
  sweep_cmd->add_option("model", model, "Model file")->required();
  sweep_cmd->add_option("plan", second, "Plan file")->required();
  run_flags.add(sweep_cmd, 2000.0, false);
  steady_flags.add(sweep_cmd);
  sweep_cmd->add_option("--threads", threads, "Worker threads (0: one per core)")->capture_default_str();
  sweep_cmd->callback(
      [&] { action = [&] { return cmd_sweep(ctx, model, second, run_flags, steady_flags, threads); }; });

  auto* calibrate_cmd = app.add_subcommand("calibrate", "Fit a willingness curve through anchors");
  calibrate_cmd->add_option("--kind", kind, "normal, lognormal or piecewise")
      ->required()
      ->check(CLI::IsMember({"normal", "lognormal", "piecewise"}));
  calibrate_cmd->add_option("--anchor", anchors, "RATIO,FRACTION (repeatable)")->required()->allow_extra_args(false);
  calibrate_cmd->callback([&] { action = [&] { return cmd_calibrate(ctx, kind, anchors); }; });

  auto* flagship = app.add_subcommand("flagship", "Print the default exploitation model as a model file");
  flagship->add_option("--out", target, "Output file, - for standard output")->capture_default_str();
  flagship->callback([&] {
    action = [&] {
      emit(ctx, target, [&](std::ostream& os) { os << serialize_model(build_exploitation_model()); });
      return kOk;
    };
  });

  std::vector<const char*> argv;
  for (const auto& a : args)
    argv.push_back(a.c_str());
  if (argv.empty())
    argv.push_back("dynex");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const Usage& e) {
    err << "dynex: " << e.what() << '\n';
    return kUsage;
  } catch (const Reported&) {
    return kFailure;
  } catch (const ConfigError& e) {
    err << "dynex: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationErrors& e) {
    ctx.report(model, e.report());
    return kFailure;
  } catch (const std::exception& e) {
    err << "dynex: " << e.what() << '\n';
    return kFailure;
  }
}

} // namespace dynex::cli
