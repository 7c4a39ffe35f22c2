#include "cornerlab/characteristics_solver.hpp"
#include "cornerlab/compatibility.hpp"
#include "cornerlab/config.hpp"
#include "cornerlab/errors.hpp"
#include "cornerlab/estimates_harness.hpp"
#include "cornerlab/expr.hpp"
#include "cornerlab/io.hpp"
#include "cornerlab/lifting_ops.hpp"
#include "cornerlab/sobolev_norms.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace cornerlab;
using json = nlohmann::json;

namespace {

struct Context {
  ExperimentConfig cfg;
  fs::path out;
  bool verbose = false;
};

std::string now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void log(const Context& c, const std::string& msg) {
  if (c.verbose) std::cerr << msg << "\n";
}

void require_triples(const Context& c) {
  if (c.cfg.triples.empty()) throw ConfigError("triples", "no data triples configured");
}

int cmd_check_compat(Context& c) {
  require_triples(c);
  json all = json::array();
  for (const auto& t : c.cfg.triples) {
    const CompatReport r = compat_report(t.spec, t.data, c.cfg.compat_s_max);
    all.push_back(json::parse(io::compat_json(t.name, r)));
    log(c, t.name + ": verified order " + io::num(r.verified_order));
  }
  const std::string text = all.dump(2) + "\n";
  io::write_text(c.out / "compat.json", text);
  std::cout << text;
  return 0;
}

int cmd_solve(Context& c) {
  require_triples(c);
  for (const auto& t : c.cfg.triples) {
    const Field2D u = solve_exact(t.spec, t.data, c.cfg.solve);
    io::dump_field(c.out, "field_" + t.name, u);
    const auto [init, bnd] = extract_traces(u);
    std::vector<std::string> head{"x"}, headt{"t"};
    for (int q = 0; q < u.q(); ++q) {
      head.push_back("u" + std::to_string(q));
      headt.push_back("u" + std::to_string(q));
    }
    io::CsvWriter ci(head), cb(headt);
    for (int i = 0; i <= init.N(); ++i) {
      std::vector<std::string> row{io::num(i * init.h)};
      for (int q = 0; q < init.q(); ++q) row.push_back(io::num(init.samples(i, q)));
      ci.row(row);
    }
    for (int j = 0; j <= bnd.M(); ++j) {
      std::vector<std::string> row{io::num(j * bnd.k)};
      for (int q = 0; q < bnd.b(); ++q) row.push_back(io::num(bnd.samples(j, q)));
      cb.row(row);
    }
    ci.save(c.out / ("trace_initial_" + t.name + ".csv"));
    cb.save(c.out / ("trace_boundary_" + t.name + ".csv"));
    log(c, t.name + ": solved on " + std::to_string(u.N()) + "x" + std::to_string(u.M()));
  }
  return 0;
}

int cmd_sweep(Context& c) {
  require_triples(c);
  std::vector<std::string> head{"triple", "s", "compat_order"};
  for (int l = 0; l <= c.cfg.levels; ++l) head.push_back("proxy_L" + std::to_string(l));
  for (const char* h : {"slope", "classification", "predicted", "match"}) head.push_back(h);
  io::CsvWriter csv(head);
  json summary = json::array();
  int matched = 0, cells = 0;
  for (const auto& t : c.cfg.triples) {
    const SweepResult r = regularity_sweep(t.spec, t.data, c.cfg.s_grid, c.cfg.levels, c.cfg.sweep);
    for (std::size_t i = 0; i < r.s.size(); ++i) {
      std::vector<std::string> row{t.name, io::num(r.s[i]), io::num(r.compat_order)};
      for (int l = 0; l <= c.cfg.levels; ++l) row.push_back(io::num(r.norm_table(i, l)));
      row.push_back(io::num(r.slopes[i]));
      row.push_back(r.classification[i]);
      row.push_back(r.predicted_bounded[i] ? "bounded" : "divergent");
      row.push_back(r.matches(i) ? "yes" : (r.classification[i] == "inconclusive" ? "flagged" : "no"));
      csv.row(row);
      matched += r.matches(i);
      ++cells;
      io::CsvWriter plot({"level", "proxy"});
      for (int l = 0; l <= c.cfg.levels; ++l) plot.row({std::to_string(l), io::num(r.norm_table(i, l))});
      plot.save(c.out / ("plot_" + t.name + "_s" + io::num(r.s[i]) + ".csv"));
    }
    summary.push_back({{"triple", t.name}, {"compat_order", io::num(r.compat_order)}, {"limited_by", r.report.limited_by}});
    log(c, t.name + ": done");
  }
  csv.save(c.out / "sweep.csv");
  json j{{"cells", cells}, {"matched", matched}, {"triples", summary}};
  io::write_text(c.out / "sweep_summary.json", j.dump(2) + "\n");
  std::cout << "sweep: " << matched << "/" << cells << " cells match the prediction\n";
  return 0;
}

int cmd_estimate(Context& c) {
  require_triples(c);
  io::CsvWriter csv({"triple", "kind", "s", "gamma", "lhs", "rhs", "ratio", "anomaly"});
  for (const auto& t : c.cfg.triples) {
    const Field2D u = solve_exact(t.spec, t.data, c.cfg.solve);
    for (const auto& kname : c.cfg.estimate_kinds) {
      const EstimateKind kind = parse_estimate_kind(kname);
      const int s = kind == EstimateKind::weighted_resolvent ? c.cfg.estimate_s : 0;
      for (const auto& e : gamma_sweep(u, t.data, c.cfg.gammas, s, kind))
        csv.row({t.name, kname, std::to_string(s), io::num(e.gamma), io::num(e.lhs), io::num(e.rhs),
                 io::num(e.ratio), e.anomaly ? "1" : "0"});
    }
  }
  csv.save(c.out / "estimates.csv");
  std::cout << csv.str();
  return 0;
}

int cmd_norms(Context& c) {
  require_triples(c);
  io::CsvWriter csv({"triple", "trace", "quantity", "theta", "value", "verdict", "slope"});
  for (const auto& t : c.cfg.triples) {
    auto report = [&](const std::string& which, const LineSamples& v) {
      csv.row({t.name, which, "l2", "", io::num(l2_norm(v)), "finite", ""});
      const NormResult h = hardy_integral(v);
      csv.row({t.name, which, "hardy", "", io::num(h.value), to_string(h.verdict), io::num(h.slope)});
      for (double th : c.cfg.norm_thetas) {
        if (!(th > 0.0 && th < 1.0)) continue;
        const NormResult g = gagliardo_seminorm(v, th);
        csv.row({t.name, which, "gagliardo", io::num(th), io::num(g.value), to_string(g.verdict), io::num(g.slope)});
      }
    };
    for (int q = 0; q < t.data.u0.q(); ++q) report("u0_" + std::to_string(q), t.data.u0.component(q));
    for (int q = 0; q < t.data.g.b(); ++q) report("g_" + std::to_string(q), t.data.g.component(q));
  }
  csv.save(c.out / "norms.csv");
  std::cout << csv.str();
  return 0;
}

int cmd_lift(Context& c) {
  const LiftParams& p = c.cfg.lift;
  const ScalarFn g = parse_function(p.g, "x");
  const int n = static_cast<int>(std::llround(2.0 * p.half_width / p.h));
  LineSamples samples{Eigen::VectorXd(n + 1), p.h, -p.half_width};
  for (int i = 0; i <= n; ++i) samples.values(i) = g->value(-p.half_width + i * p.h);
  const double gmax = std::max(samples.values.cwiseAbs().maxCoeff(), 1e-300);
  io::CsvWriter csv({"lambda", "m", "trace_error", "max_zero_jet", "norm_lift", "bound_ratio"});
  for (double lambda : p.lambdas) {
    const PlaneFn R = lift_rm(samples, p.m, lambda, p.s);
    const Eigen::MatrixXd jets = time_jets_at_zero(R, p.m + 1, p.m + 3);
    double trace_err = (jets.col(p.m) - samples.values).cwiseAbs().maxCoeff() / gmax, zero = 0.0;
    for (int d = 0; d <= p.m + 1; ++d)
      if (d != p.m) zero = std::max(zero, jets.col(d).cwiseAbs().maxCoeff() / gmax);
    csv.row({io::num(lambda), std::to_string(p.m), io::num(trace_err), io::num(zero),
             io::num(R.diagnostics.at("norm_lift")), io::num(R.diagnostics.at("bound_ratio"))});
    io::dump_plane(c.out, "lift_m" + std::to_string(p.m) + "_lambda" + io::num(lambda), R);
  }
  csv.save(c.out / "lift.csv");
  std::cout << csv.str();
  return 0;
}

int cmd_synthesize(Context& c) {
  require_triples(c);
  const SynthesizeParams& p = c.cfg.synthesize;
  io::CsvWriter csv({"triple", "k", "m", "lambda", "correction_norm", "verified_order_before", "verified_order_after"});
  for (const auto& t : c.cfg.triples) {
    const double before = compat_report(t.spec, t.data, p.m).verified_order;
    for (double lambda : p.lambdas) {
      const SynthesisResult r = synthesize_compatible_data(t.spec, t.data, p.k, p.m, lambda);
      const double after = compat_report(t.spec, r.data, p.m).verified_order;
      csv.row({t.name, std::to_string(p.k), std::to_string(p.m), io::num(lambda), io::num(r.correction_norm),
               io::num(before), io::num(after)});
    }
  }
  csv.save(c.out / "synthesize.csv");
  std::cout << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cornerlab: compatibility, lifting and regularity experiments for hyperbolic IBVPs"};
  std::string config_path, out_dir = "out", command;
  std::uint64_t seed = 0;
  int levels = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "Experiment configuration (JSON)")->required();
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--cmd", command, "Command to run")
      ->required()
      ->check(CLI::IsMember({"check-compat", "solve", "sweep", "lift", "synthesize", "norms", "estimate"}));
  auto* seed_opt = app.add_option("--seed", seed, "Seed recorded in the manifest (overrides the config)");
  app.add_option("--levels", levels, "Refinement levels for sweep (overrides the config)");
  app.add_flag("--verbose", verbose, "Progress on stderr");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  Context ctx;
  ctx.verbose = verbose;
  io::RunManifest manifest;
  manifest.started = now_utc();
  manifest.command = command;
  try {
    ctx.cfg = load_config(config_path);
    if (*seed_opt) ctx.cfg.seed = seed;
    if (levels > 0) {
      if (levels < 3) throw ConfigError("--levels", "must be >= 3");
      ctx.cfg.levels = levels;
    }
    ctx.out = out_dir;
    fs::create_directories(ctx.out);
    manifest.config_hash = io::fnv1a_hex(ctx.cfg.canonical);
    manifest.seed = ctx.cfg.seed;
    manifest.tolerances = io::active_tolerances();

    int rc = 0;
    if (command == "check-compat") rc = cmd_check_compat(ctx);
    else if (command == "solve") rc = cmd_solve(ctx);
    else if (command == "sweep") rc = cmd_sweep(ctx);
    else if (command == "estimate") rc = cmd_estimate(ctx);
    else if (command == "norms") rc = cmd_norms(ctx);
    else if (command == "lift") rc = cmd_lift(ctx);
    else if (command == "synthesize") rc = cmd_synthesize(ctx);
    manifest.finished = now_utc();
    io::write_manifest(ctx.out, manifest);
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const AdmissibilityError& e) {
    std::cerr << "admissibility error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalGuardError& e) {
    std::cerr << "numerical guard: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
