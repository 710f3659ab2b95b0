// vatgame: command-line front end for the VAT-fraud evolutionary game engine.
//
// Exit status: 0 on success, 1 on data/parameter errors, 2 on usage errors.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vatgame/config.hpp"
#include "vatgame/game.hpp"
#include "vatgame/ingest.hpp"
#include "vatgame/network.hpp"
#include "vatgame/powerlaw.hpp"
#include "vatgame/sim.hpp"

namespace {

using namespace vatgame;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Options shared by every command that builds a SimConfig. Precedence:
// compiled-in defaults < --config file < --set < named flags.
struct ConfigOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool paper_scale = false;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;

  void attach(CLI::App* cmd, bool simulation) {
    cmd->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--set", sets, "extra key=value override (repeatable)");
    add(cmd, "--alpha", "alpha", "undeclared fraction of the tax debt");
    add(cmd, "--reward", "reward", "reward R for cooperators");
    add(cmd, "--fine", "fine", "fine multiplier phi");
    add(cmd, "--gamma-cost", "inspection_cost", "inspection cost Gamma");
    add(cmd, "--theta-low", "theta_low", "audit anchor at the low debt");
    add(cmd, "--theta-high", "theta_high", "audit anchor at the high debt");
    add(cmd, "--d-low", "d_low", "low tax debt");
    add(cmd, "--d-high", "d_high", "high tax debt");
    add(cmd, "--prob-high", "prob_high", "probability of a high-debt edge");
    add(cmd, "--beta", "beta", "selection intensity");
    add(cmd, "--mu", "mu", "mutation probability");
    add(cmd, "--topology", "topology", "well_mixed | ba | xbs | powerlaw | file");
    add(cmd, "--m", "m", "BA attachment count");
    add(cmd, "--ba-links", "ba_links", "uniform (1..m per node) | fixed (m per node)");
    add(cmd, "--rewire-p", "rewire_p", "XBS rewiring bias");
    add(cmd, "--rewire-mode", "rewire_mode", "assortative | disassortative");
    add(cmd, "--powerlaw-exponent", "powerlaw_exponent", "configuration-model exponent");
    add(cmd, "--k-min", "k_min", "configuration-model minimum degree");
    add(cmd, "--k-max", "k_max", "configuration-model maximum degree (0 = Z-1)");
    add(cmd, "--edge-file", "edge_file", "edge list for topology=file");
    add(cmd, "-Z,--population", "population", "population size");
    if (simulation) {
      cmd->add_flag("--paper-scale", paper_scale, "Z = 10000 and 50 runs");
      add(cmd, "--steps", "steps", "time steps per run");
      add(cmd, "--runs", "runs", "Monte Carlo runs");
      add(cmd, "--init-coop", "init_coop_freq", "initial cooperator fraction");
      add(cmd, "--measure-fraction", "measure_fraction", "trailing fraction averaged");
      add(cmd, "--sigma", "diversity_sigma", "std-dev of per-agent audit anchors");
      add(cmd, "--n-partners", "n_partners", "well-mixed partners per step");
    }
  }

  SimConfig build() const {
    SimConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    if (paper_scale) cfg.use_paper_scale();
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError(fmt::format("--set expects key=value, got '{}'", kv));
      set_from_command_line(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [key, value] : flags) set_from_command_line(cfg, key, value);
    if (seed) cfg.master_seed = *seed;
    return cfg;
  }

 private:
  // A malformed value typed on the command line is a usage error.
  static void set_from_command_line(SimConfig& cfg, const std::string& key,
                                    const std::string& value) {
    try {
      set_parameter(cfg, key, value);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ParseError) throw;
      throw UsageError(e.what());
    }
  }

  void add(CLI::App* cmd, const std::string& flag, const std::string& key,
           const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { flags[key] = v; }, help);
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", path));
  return out;
}

template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
  } else {
    auto out = open_out(path);
    fn(out);
  }
}

ProgressFn stderr_progress(bool quiet) {
  if (quiet) return {};
  return [last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
    const std::size_t pct = done * 100 / total;
    if (pct != last || done == total) {
      last = pct;
      fmt::print(stderr, "\r{}/{} runs ({}%)", done, total, pct);
      if (done == total) fmt::print(stderr, "\n");
    }
  };
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
  ConfigOptions cfg;
  std::string out;
  std::string degrees_out;
  bool print_metrics = false;
  unsigned jobs = 1;
};

int run_generate(const GenerateOptions& o) {
  SimConfig cfg = o.cfg.build();
  cfg.validate();
  if (cfg.topology.kind == TopologyKind::WellMixed) {
    throw UsageError("generate needs a network topology (ba, xbs, powerlaw or file)");
  }
  const WeightedNetwork net = build_network(cfg, run_seed(cfg.master_seed, 0));
  if (!o.out.empty()) with_output(o.out, [&](std::ostream& s) { write_edge_list(s, net); });
  if (!o.degrees_out.empty()) {
    with_output(o.degrees_out, [&](std::ostream& s) {
      for (std::size_t k : net.degrees()) s << k << '\n';
    });
  }
  fmt::print(stderr, "{} network: {} nodes, {} edges\n", to_string(cfg.topology.kind),
             net.node_count(), net.edge_count());
  if (o.print_metrics) {
    const NetworkMetrics m = metrics(net, o.jobs);
    fmt::print("nodes={}\nedges={}\naverage_degree={:.4f}\nclustering={:.4f}\ndiameter={}\n"
               "assortativity={:.4f}\nlargest_component={}\n",
               net.node_count(), net.edge_count(), m.average_degree, m.clustering, m.diameter,
               m.assortativity, m.largest_component);
  }
  return 0;
}

// --------------------------------------------------------------------- fit

struct FitOptions {
  std::string input;
  std::string edges;
  std::optional<std::int64_t> x_min;
};

int run_fit(const FitOptions& o) {
  std::vector<std::int64_t> samples;
  if (!o.edges.empty()) {
    const WeightedNetwork net = read_edge_list(o.edges);
    for (std::size_t k : net.degrees()) {
      if (k > 0) samples.push_back(static_cast<std::int64_t>(k));
    }
  } else if (!o.input.empty()) {
    samples = read_samples(o.input);
  } else {
    throw UsageError("fit needs --input or --edges");
  }
  PowerLawFit fit;
  if (o.x_min) {
    std::sort(samples.begin(), samples.end());
    fit = fit_powerlaw(samples, std::vector<std::int64_t>{*o.x_min});
  } else {
    fit = fit_powerlaw(samples);
  }
  fmt::print("gamma={:.4f}\nx_min={}\nks_statistic={:.6f}\nn_tail={}\nn={}\n", fit.gamma,
             fit.x_min, fit.ks_statistic, fit.n_tail, samples.size());
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  ConfigOptions cfg;
  std::string trajectory;
  std::string runs_out;
  std::string dump_config;
  unsigned jobs = 1;
};

int run_simulate(const SimulateOptions& o) {
  const SimConfig cfg = o.cfg.build();
  cfg.validate();
  if (!o.dump_config.empty()) with_output(o.dump_config, [&](std::ostream& s) { write_config(s, cfg); });
  const MonteCarloResult mc = monte_carlo_with_trajectories(cfg, o.jobs);
  const std::size_t len = mc.trajectories.front().size();

  if (!o.trajectory.empty()) {
    const TrajectoryBand band = trajectory_band(mc.trajectories);
    with_output(o.trajectory, [&](std::ostream& s) { write_band_csv(s, band); });
  }
  if (!o.runs_out.empty()) {
    with_output(o.runs_out, [&](std::ostream& s) {
      s << "run,step,coop_freq\n";
      for (std::size_t r = 0; r < mc.trajectories.size(); ++r) {
        for (std::size_t t = 0; t < len; ++t) {
          fmt::print(s, "{},{},{:.6f}\n", r, t, mc.trajectories[r][t]);
        }
      }
    });
  }
  fmt::print("mean_coop={:.6f} min_coop={:.6f} max_coop={:.6f} runs={}\n", mc.stats.mean_coop,
             mc.stats.min_coop, mc.stats.max_coop, mc.stats.per_run.size());
  return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepOptions {
  ConfigOptions cfg;
  std::string axes;
  std::string out;
  std::string trajectories;
  unsigned jobs = 1;
  bool quiet = false;
  bool policy = false;
  std::string rewards = "1..2:6";
  std::string fines = "1..2:6";
  std::string alphas = "0.1..1:10";
  std::string scenarios;
};

std::vector<AuditScenario> parse_scenarios(const std::string& spec) {
  if (spec.empty()) return default_policy_scenarios();
  std::vector<AuditScenario> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto comma = spec.find(',', start);
    if (comma == std::string::npos) comma = spec.size();
    const std::string item = spec.substr(start, comma - start);
    const auto slash = item.find('/');
    if (slash == std::string::npos) {
      throw UsageError(fmt::format("scenario '{}' must be theta_low/theta_high", item));
    }
    const auto low = parse_values(item.substr(0, slash));
    const auto high = parse_values(item.substr(slash + 1));
    if (low.size() != 1 || high.size() != 1) {
      throw UsageError(fmt::format("scenario '{}' must be theta_low/theta_high", item));
    }
    out.push_back({low[0], high[0]});
    start = comma + 1;
  }
  return out;
}

int run_sweep(const SweepOptions& o) {
  const SimConfig cfg = o.cfg.build();
  const ProgressFn progress = stderr_progress(o.quiet);
  if (o.policy) {
    if (o.out.empty() || o.out == "-") {
      throw UsageError("--policy writes one CSV per scenario and needs --out PREFIX");
    }
    const auto scenarios = parse_scenarios(o.scenarios);
    const auto results = policy_experiment(cfg, parse_values(o.rewards), parse_values(o.fines),
                                           scenarios, parse_values(o.alphas), o.jobs, progress);
    for (const auto& r : results) {
      const std::string path = fmt::format("{}_L{}_H{}.csv", o.out, r.scenario.theta_low,
                                           r.scenario.theta_high);
      with_output(path, [&](std::ostream& s) { write_sweep_csv(s, r.result); });
      fmt::print("wrote {} ({} cells)\n", path, r.result.cells.size());
    }
    return 0;
  }
  if (o.axes.empty()) throw UsageError("sweep needs --axes (or --policy)");
  const auto axes = parse_axes(o.axes);
  if (axes.empty() || axes.size() > 3) throw UsageError("sweep takes one to three axes");
  const SweepResult result = sweep(cfg, axes, o.jobs, progress, !o.trajectories.empty());
  with_output(o.out, [&](std::ostream& s) { write_sweep_csv(s, result); });
  if (!o.trajectories.empty()) {
    with_output(o.trajectories, [&](std::ostream& s) { write_sweep_trajectories_csv(s, result); });
  }
  if (!o.out.empty() && o.out != "-") {
    fmt::print("wrote {} ({} cells)\n", o.out, result.cells.size());
  }
  return 0;
}

// ---------------------------------------------------------------- classify

struct ClassifyOptions {
  ConfigOptions cfg;
  std::optional<double> d;
  std::string grid_alphas;
  std::string grid_ds;
  std::string out;
};

std::string describe(const PayoffQuad& q) {
  try {
    return std::string(to_string(classify_game(q).label));
  } catch (const AmbiguousGame& e) {
    std::string ties;
    for (Comparison c : e.ties()) {
      if (!ties.empty()) ties += ' ';
      ties += to_string(c);
    }
    return "AMBIGUOUS(" + ties + ")";
  } catch (const Error& e) {
    if (e.code() == ErrorCode::OutsideTaxonomy) return "OUTSIDE_TAXONOMY";
    throw;
  }
}

int run_classify(const ClassifyOptions& o) {
  const SimConfig cfg = o.cfg.build();
  const GameParams& p = cfg.params;
  p.validate();
  if (!o.grid_alphas.empty() || !o.grid_ds.empty()) {
    const auto alphas = o.grid_alphas.empty() ? std::vector<double>{p.alpha} : parse_values(o.grid_alphas);
    const auto ds = o.grid_ds.empty() ? std::vector<double>{p.d_low} : parse_values(o.grid_ds);
    with_output(o.out, [&](std::ostream& s) {
      s << "alpha,d,R,S,T,P,label\n";
      for (double a : alphas) {
        GameParams q = p;
        q.alpha = a;
        for (double d : ds) {
          std::string label;
          PayoffQuad quad{};
          try {
            quad = payoff_quad(d, q);
            label = describe(quad);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateAnchors) throw;
            label = "DEGENERATE_ANCHORS";
          }
          fmt::print(s, "{},{},{:.9g},{:.9g},{:.9g},{:.9g},{}\n", a, d, quad.r, quad.s, quad.t,
                     quad.p, label);
        }
      }
    });
    return 0;
  }
  const double d = o.d.value_or(p.d_low);
  const PayoffQuad q = payoff_quad(d, p);
  fmt::print("R={:.6g} S={:.6g} T={:.6g} P={:.6g}\n", q.r, q.s, q.t, q.p);
  try {
    const GameClass c = classify_game(q);
    fmt::print("game={} R>P={} D1={} D2={} D3={}\n", to_string(c.label), c.dilemma_possible,
               c.d1, c.d2, c.d3);
  } catch (const AmbiguousGame& e) {
    std::string ties;
    for (Comparison c : e.ties()) {
      if (!ties.empty()) ties += ", ";
      ties += to_string(c);
    }
    fmt::print("game=AMBIGUOUS ties: {}\n", ties);
  }
  return 0;
}

// ------------------------------------------------------------------ ingest

struct IngestOptions {
  std::string sales;
  std::string purchases;
  bool drop_exact = false;
  double high_quantile = 0.98;
  std::string matched_out;
  std::string summary_out;
  std::string cdf_out;
  std::string edges_out;
};

int run_ingest(const IngestOptions& o) {
  const auto sales = read_declarations(o.sales, Side::Sale);
  const auto purchases = read_declarations(o.purchases, Side::Purchase);
  const auto matched = merge_declarations(sales, purchases, o.drop_exact);
  if (!o.matched_out.empty()) with_output(o.matched_out, [&](std::ostream& s) { write_matched(s, matched); });
  const CalibrationSummary summary = calibration_summary(matched, o.high_quantile);
  if (!o.cdf_out.empty()) {
    with_output(o.cdf_out, [&](std::ostream& s) { write_alpha_cdf(s, summary.alpha_cdf); });
  }
  if (!o.edges_out.empty()) {
    const WeightedNetwork net = matched_network(matched);
    with_output(o.edges_out, [&](std::ostream& s) { write_edge_list(s, net); });
  }
  with_output(o.summary_out, [&](std::ostream& s) { write_summary(s, summary); });
  fmt::print(stderr, "{} sale rows, {} purchase rows, {} matched pairs\n", sales.size(),
             purchases.size(), matched.size());
  return 0;
}

// ---------------------------------------------------------------- fixtures

struct FixtureOptions {
  std::string out_dir = ".";
  std::size_t pairs = 10000;
  std::size_t samples = 10000;
  std::uint64_t seed = kDefaultSeed;
};

int run_fixtures(const FixtureOptions& o) {
  namespace fs = std::filesystem;
  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  const DeclarationFixture fx = synthetic_declarations(o.pairs, o.seed);
  with_output((dir / "sales.csv").string(), [&](std::ostream& s) { write_declarations(s, fx.sales); });
  with_output((dir / "purchases.csv").string(),
              [&](std::ostream& s) { write_declarations(s, fx.purchases); });
  struct Spec {
    const char* name;
    double gamma;
    std::uint64_t x_min;
    double body;
  };
  // The first mimics a degree sample whose power-law behaviour starts at 88.
  for (const Spec& spec : {Spec{"powerlaw_3.04_xmin88.txt", 3.04, 88, 0.2},
                           Spec{"powerlaw_2.5_xmin1.txt", 2.5, 1, 0.0}}) {
    const auto xs = sample_powerlaw_with_body(spec.gamma, spec.x_min, 1000000, o.samples,
                                              spec.body, o.seed);
    with_output((dir / spec.name).string(), [&](std::ostream& s) {
      for (auto x : xs) s << x << '\n';
    });
  }
  fmt::print("wrote sales.csv, purchases.csv, powerlaw_3.04_xmin88.txt, powerlaw_2.5_xmin1.txt to {}\n",
             o.out_dir);
  return 0;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownKey:
    case ErrorCode::UnknownAxis:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolutionary VAT-fraud game: networks, simulations, sweeps and calibration"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "build a weighted network and write its edge list");
  gen.cfg.attach(generate, false);
  generate->add_option("-o,--out", gen.out, "edge-list CSV (src,dst,weight)");
  generate->add_option("--degrees", gen.degrees_out, "degree sequence, one per line");
  generate->add_flag("--metrics", gen.print_metrics, "print degree, clustering, diameter, assortativity");
  generate->add_option("--jobs", gen.jobs, "threads for the diameter search")->check(CLI::Range(1u, 1024u));

  FitOptions fit;
  auto* fitcmd = app.add_subcommand("fit", "fit a discrete power law to integer samples");
  auto* fit_in = fitcmd->add_option("-i,--input", fit.input, "samples, one positive integer per line");
  auto* fit_edges = fitcmd->add_option("--edges", fit.edges, "fit the degree sequence of an edge list");
  fit_in->excludes(fit_edges);
  fitcmd->add_option("--x-min", fit.x_min, "fixed cutoff instead of the KS search");

  SimulateOptions simo;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo runs of one configuration");
  simo.cfg.attach(simulate, true);
  simulate->add_option("-o,--trajectory", simo.trajectory,
                       "mean trajectory CSV (step,coop_freq,min_coop,max_coop)");
  simulate->add_option("--runs-out", simo.runs_out, "per-run trajectories (run,step,coop_freq)");
  simulate->add_option("--dump-config", simo.dump_config, "write the effective config");
  simulate->add_option("--jobs", simo.jobs, "parallel runs")->check(CLI::Range(1u, 1024u));

  SweepOptions swo;
  auto* sweepcmd = app.add_subcommand("sweep", "grid of Monte Carlo cells");
  swo.cfg.attach(sweepcmd, true);
  sweepcmd->add_option("--axes", swo.axes, "name:lo..hi:count or name:v1|v2, comma separated");
  sweepcmd->add_option("-o,--out", swo.out, "CSV path (or prefix with --policy)");
  sweepcmd->add_option("--trajectories", swo.trajectories,
                       "per-cell mean trajectory CSV (axes,step,coop_freq,min_coop,max_coop)");
  sweepcmd->add_option("--jobs", swo.jobs, "parallel runs")->check(CLI::Range(1u, 1024u));
  sweepcmd->add_flag("-q,--quiet", swo.quiet, "no progress on stderr");
  sweepcmd->add_flag("--policy", swo.policy, "reward x fine x alpha grid per audit scenario");
  sweepcmd->add_option("--rewards", swo.rewards, "policy reward values")->capture_default_str();
  sweepcmd->add_option("--fines", swo.fines, "policy fine values")->capture_default_str();
  sweepcmd->add_option("--alphas", swo.alphas, "policy alpha values")->capture_default_str();
  sweepcmd->add_option("--scenarios", swo.scenarios,
                       "theta_low/theta_high pairs, comma separated (default 0.8/0.2,0.5/0.5,0.2/0.8)");

  ClassifyOptions clo;
  auto* classify = app.add_subcommand("classify", "payoff quad and game type");
  clo.cfg.attach(classify, false);
  classify->add_option("--d", clo.d, "tax debt of the transaction (default d_low)");
  classify->add_option("--grid-alphas", clo.grid_alphas, "alpha values for a CSV game map");
  classify->add_option("--grid-ds", clo.grid_ds, "debt values for a CSV game map");
  classify->add_option("-o,--out", clo.out, "game-map CSV path (default stdout)");

  IngestOptions ing;
  auto* ingest = app.add_subcommand("ingest", "match declarations and derive calibration values");
  ingest->add_option("--sales", ing.sales, "seller-side CSV")->required()->check(CLI::ExistingFile);
  ingest->add_option("--purchases", ing.purchases, "buyer-side CSV")->required()->check(CLI::ExistingFile);
  ingest->add_flag("--drop-exact", ing.drop_exact, "remove pairs that declare identically");
  ingest->add_option("--high-quantile", ing.high_quantile, "volume quantile splitting d_low/d_high")
      ->check(CLI::Range(0.0, 1.0));
  ingest->add_option("--matched", ing.matched_out, "matched pairs CSV");
  ingest->add_option("--summary", ing.summary_out, "key=value report (default stdout)");
  ingest->add_option("--cdf", ing.cdf_out, "mismatch-ratio CDF CSV");
  ingest->add_option("--edges", ing.edges_out, "firm network edge list");

  FixtureOptions fxo;
  auto* fixtures = app.add_subcommand("fixtures", "write synthetic declaration and power-law fixtures");
  fixtures->add_option("--out-dir", fxo.out_dir, "output directory")->capture_default_str();
  fixtures->add_option("--pairs", fxo.pairs, "matched declaration pairs")->capture_default_str();
  fixtures->add_option("--samples", fxo.samples, "power-law samples per file")->capture_default_str();
  fixtures->add_option("--seed", fxo.seed, "seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*fitcmd) return run_fit(fit);
    if (*simulate) return run_simulate(simo);
    if (*sweepcmd) return run_sweep(swo);
    if (*classify) return run_classify(clo);
    if (*ingest) return run_ingest(ing);
    if (*fixtures) return run_fixtures(fxo);
  } catch (const UsageError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  } catch (const Error& e) {
    fmt::print(stderr, "error [{}]: {}\n", to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 2;
}
