// Command-line front end: simulate / compare / weakmap / consolidate / verify.
// Exit codes: 0 success, 1 numerical failure, 2 usage or config error.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "scg/config.hpp"
#include "scg/consolidate.hpp"
#include "scg/csv.hpp"
#include "scg/experiments.hpp"
#include "scg/parser.hpp"
#include "scg/simulate.hpp"
#include "scg/svg.hpp"
#include "scg/verify.hpp"
#include "scg/weakmap.hpp"

namespace fs = std::filesystem;
using namespace scg;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  long long paths = -1;
  int threads = 1;
  bool plot = false;
  bool quick = false;
};

Config load_config(const CommonFlags& f, const std::set<std::string>& allowed) {
  Config cfg = f.config_path.empty() ? Config() : Config::parse_file(f.config_path);
  cfg.check_keys(allowed);
  if (f.seed >= 0) cfg.set("seed", std::to_string(f.seed));
  if (f.paths >= 0) cfg.set("paths", std::to_string(f.paths));
  if (!f.out_dir.empty()) cfg.set("output", f.out_dir);
  return cfg;
}

std::string out_path(const Config& cfg, const std::string& file) {
  const std::string dir = cfg.get_str("output", "out");
  fs::create_directories(dir);
  return dir + "/" + file;
}

std::vector<double> initial_field(const Config& cfg, int n, double L) {
  const std::string kind = cfg.get_str("u0", "sin");
  std::vector<double> u(n);
  if (kind == "sin") {
    for (int i = 0; i < n; ++i)
      u[i] = std::sin(2 * std::numbers::pi * i / static_cast<double>(n)) *
             cfg.get_num("u0_amp", 1.0);
  } else if (kind == "const") {
    for (int i = 0; i < n; ++i) u[i] = cfg.get_num("u0_amp", 1.0);
  } else {
    throw ConfigError("config key 'u0': expected sin or const, got " + kind);
  }
  (void)L;
  return u;
}

void maybe_plot(const Config& cfg, bool plot, const Trajectory& tr,
                const std::string& file, const std::string& title) {
  if (!plot && !cfg.get_bool("plot", false)) return;
  const int n = tr.states.empty() ? 0 : static_cast<int>(tr.states.front().size());
  std::vector<std::pair<std::string, std::vector<double>>> series;
  for (int i = 0; i < n && static_cast<int>(series.size()) < 6; i += std::max(1, n / 6)) {
    std::vector<double> col;
    for (const auto& s : tr.states) col.push_back(s[i]);
    series.push_back({"u_" + std::to_string(i), std::move(col)});
  }
  write_svg_lines(out_path(cfg, file), tr.times, series, title);
}

int cmd_simulate(const CommonFlags& flags) {
  const std::set<std::string> allowed = {
      "model", "m", "h", "x0", "sigma", "gamma", "alpha", "T", "dt", "seed",
      "paths", "output", "noise", "modes", "fine_n", "sample_every", "u0",
      "u0_amp", "export_noise", "export_chains", "plot"};
  Config cfg = load_config(flags, allowed);
  const std::string model = cfg.require_str("model");
  const Pars pars{cfg.get_num("sigma", 0.0), cfg.get_num("gamma", 1.0),
                  cfg.get_num("alpha", 0.0)};
  const double T = cfg.get_num("T", 1.0);
  const double dt = cfg.get_num("dt", 1e-3);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  const int n_paths = static_cast<int>(cfg.get_int("paths", 1));
  const int sample_every = static_cast<int>(cfg.get_int("sample_every", 10));

  for (int p = 0; p < n_paths; ++p) {
    NoiseBank bank(path_seed(seed, p), dt);
    RecordingView recorder(bank);
    Trajectory tr;
    if (model == "burgers") {
      const int n = static_cast<int>(cfg.get_int("fine_n", 32));
      const int m = static_cast<int>(cfg.get_int("m", 4));
      const double h = cfg.get_num("h", 2 * std::numbers::pi / m);
      Grid grid{m, h, cfg.get_num("x0", h / 2), std::max(1, n / m)};
      FineNoiseSpec spec;
      const std::string noise = cfg.get_str("noise", "point");
      if (noise == "point") spec.kind = FineNoiseSpec::Kind::PointWhite;
      else if (noise == "odd") spec.kind = FineNoiseSpec::Kind::OddShared;
      else if (noise == "modes") spec.kind = FineNoiseSpec::Kind::ElementModes;
      else if (noise == "none") spec.kind = FineNoiseSpec::Kind::None;
      else throw ConfigError("config key 'noise': unknown kind " + noise);
      spec.grid = grid;
      spec.n_modes = static_cast<int>(cfg.get_int("modes", 3));
      const double L = grid.length();
      tr = simulate_fine_burgers(L, n, pars, spec, recorder,
                                 initial_field(cfg, n, L), T, dt, sample_every);
    } else if (model == "lattice") {
      const int m = static_cast<int>(cfg.get_int("m", 16));
      const double h = cfg.get_num("h", 0.5);
      tr = simulate_fine_lattice(m, h, pars, recorder,
                                 initial_field(cfg, 2 * m, m * h), T, dt,
                                 sample_every);
    } else {
      TermTable table = load_model(model);
      const int m = static_cast<int>(cfg.get_int("m", 8));
      const double h = cfg.get_num("h", 0.5);
      Grid grid{m, h, cfg.get_num("x0", 0.0), 2};
      CoarseSimulator sim(table, grid, pars, recorder);
      const bool log_chains = p == 0 && cfg.has("export_chains") && sim.conv_bank().size() > 0;
      std::vector<std::vector<double>> chain_rows;
      sim.set_state(initial_field(cfg, m, grid.length()));
      tr.model_id = table.meta.name;
      tr.pars = pars;
      tr.times.push_back(0.0);
      tr.states.push_back(sim.state());
      const auto n_steps = static_cast<std::int64_t>(std::llround(T / dt));
      for (std::int64_t s = 0; s < n_steps; ++s) {
        sim.advance(s);
        if ((s + 1) % sample_every == 0 || s + 1 == n_steps) {
          tr.times.push_back(sim.time());
          tr.states.push_back(sim.state());
          if (log_chains) {
            std::vector<double> row = {sim.time()};
            for (int ci = 0; ci < sim.conv_bank().size(); ++ci)
              row.push_back(sim.conv_bank().value(ci));
            chain_rows.push_back(std::move(row));
          }
        }
      }
      if (log_chains) {
        std::vector<std::string> header = {"time"};
        for (int ci = 0; ci < sim.conv_bank().size(); ++ci) {
          const ConvChain& ch = sim.conv_bank().chain(ci);
          std::string name = "Z";
          for (size_t k = 0; k < ch.indices().size(); ++k)
            name += (k ? "." : "") + std::to_string(ch.indices()[k]);
          header.push_back(name + "@" + ch.source().str());
        }
        write_csv(out_path(cfg, cfg.require_str("export_chains")), header, chain_rows);
      }
    }
    tr.seed = path_seed(seed, p);
    char name[64];
    std::snprintf(name, sizeof(name), n_paths > 1 ? "trajectory_%03d.csv" : "trajectory.csv", p);
    write_trajectory_csv(tr, out_path(cfg, name));
    if (p == 0) {
      maybe_plot(cfg, flags.plot, tr, "trajectory.svg", model);
      if (cfg.has("export_noise")) {
        const auto keys = recorder.keys();
        const auto steps = static_cast<std::int64_t>(std::llround(T / dt));
        export_noise_csv(bank, keys, steps, out_path(cfg, cfg.require_str("export_noise")));
      }
    }
  }
  std::printf("wrote %d trajectory file(s) under %s\n", n_paths,
              cfg.get_str("output", "out").c_str());
  return 0;
}

int cmd_compare(const CommonFlags& flags, const std::string& model_flag) {
  const std::set<std::string> allowed = {"model",  "T",   "dt",     "seed",
                                         "burn",   "fine_n", "output", "plot",
                                         "sigma",  "gamma", "alpha", "sample_every"};
  Config cfg = load_config(flags, allowed);
  if (!model_flag.empty()) cfg.set("model", model_flag);
  StrongTrackingSetup s;
  s.T = cfg.get_num("T", s.T);
  s.dt = cfg.get_num("dt", s.dt);
  s.burn = cfg.get_num("burn", s.burn);
  s.fine_n = static_cast<int>(cfg.get_int("fine_n", s.fine_n));
  s.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  s.sigma = cfg.get_num("sigma", s.sigma);
  s.gamma = cfg.get_num("gamma", s.gamma);
  s.alpha = cfg.get_num("alpha", s.alpha);
  s.sample_every = static_cast<int>(cfg.get_int("sample_every", s.sample_every));
  TermTable eq19 = load_model(cfg.get_str("model", "models/eq19.model"));
  StrongTrackingResult res = run_strong_tracking(eq19, s);

  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < res.times.size(); ++i)
    rows.push_back({res.times[i], res.u_fine[i], res.U2[i], res.w2[i]});
  const std::string csv = out_path(cfg, "compare.csv");
  write_csv(csv, {"time", "u_fine_X2", "U2", "w2_X2"}, rows);
  append_text_file(csv, "# summary rms_u_w=" + std::to_string(res.rms_u_w) +
                            " rms_u_U=" + std::to_string(res.rms_u_U) +
                            " corr_fluct=" + std::to_string(res.corr_fluct) + "\n");
  {
    std::ofstream st(out_path(cfg, "compare_stats.csv"));
    st << "observable,estimate,stderr,n_paths,window\n";
    st.precision(10);
    const double w0 = res.times.empty() ? 0.0 : res.times.front();
    const double w1 = res.times.empty() ? 0.0 : res.times.back();
    const double se = res.times.empty()
                          ? 0.0
                          : 1.0 / std::sqrt(static_cast<double>(res.times.size()));
    st << "corr_fluct," << res.corr_fluct << "," << se << ",1," << w0 << ".." << w1 << "\n";
    st << "rms_u_w," << res.rms_u_w << ",,1," << w0 << ".." << w1 << "\n";
    st << "rms_u_U," << res.rms_u_U << ",,1," << w0 << ".." << w1 << "\n";
  }
  if (flags.plot || cfg.get_bool("plot", false))
    write_svg_lines(out_path(cfg, "compare.svg"), res.times,
                    {{"u_fine(X2)", res.u_fine}, {"U2", res.U2}, {"w2(X2)", res.w2}},
                    "strong tracking at the grid point");
  std::printf("rms(u-w)=%.5f rms(u-U)=%.5f corr=%.3f -> %s\n", res.rms_u_w,
              res.rms_u_U, res.corr_fluct, csv.c_str());
  return 0;
}

int cmd_weakmap(const CommonFlags& flags, const std::string& model_path) {
  const std::set<std::string> allowed = {"model", "output"};
  Config cfg = load_config(flags, allowed);
  const std::string path = model_path.empty() ? cfg.require_str("model") : model_path;
  TermTable strong = load_model(path);
  WeakMapResult res = rewrite_strong_to_weak(strong);
  const std::string stem = fs::path(path).stem().string();
  save_model(res.table, out_path(cfg, stem + "-weak.model"));
  std::ofstream prov(out_path(cfg, stem + "-weak-provenance.csv"));
  prov << "source,output,coefficient\n";
  prov.precision(12);
  for (const auto& e : res.provenance)
    prov << "\"" << e.source << "\",\"" << e.output << "\"," << e.coefficient << "\n";
  std::printf("%zu strong terms -> %zu weak terms; wrote %s-weak.model\n",
              strong.terms.size(), res.table.terms.size(), stem.c_str());
  return 0;
}

int cmd_consolidate(const CommonFlags& flags, const std::string& model_path,
                    double tol) {
  const std::set<std::string> allowed = {"model", "output", "tol"};
  Config cfg = load_config(flags, allowed);
  const std::string path = model_path.empty() ? cfg.require_str("model") : model_path;
  TermTable weak = load_model(path);
  ConsolidationResult res = consolidate_noise_columns(weak, cfg.get_num("tol", tol));
  const double dev = covariance_check(res);
  const std::string stem = fs::path(path).stem().string();
  save_model(res.chi_table, out_path(cfg, stem + "-chi.model"));
  write_r_matrix_csv(res, out_path(cfg, stem + "-rmatrix.csv"));
  std::printf("%zu psi noises over %zu slots -> rank %d chi noises; covariance "
              "deviation %.2e\n",
              res.columns.size(), res.slots.size(), res.rank, dev);
  return 0;
}

int cmd_verify(const CommonFlags& flags, const std::string& models_dir,
               long long seed) {
  AcceptanceOptions opt;
  opt.models_dir = models_dir;
  opt.out_dir = flags.out_dir.empty() ? "out" : flags.out_dir;
  opt.quick = flags.quick;
  opt.threads = flags.threads;
  if (seed >= 0) opt.seed = static_cast<std::uint64_t>(seed);
  auto results = run_acceptance(opt);
  return all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic coarse-grid model toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string model_path, models_dir = "models";
  double tol = 1e-9;
  long long verify_seed = -1;

  auto add_common = [&](CLI::App* sub, bool with_paths = true) {
    sub->add_option("--config", flags.config_path, "key = value experiment config");
    sub->add_option("--out", flags.out_dir, "output directory");
    sub->add_option("--seed", flags.seed, "master seed");
    if (with_paths) sub->add_option("--paths", flags.paths, "ensemble path count");
    sub->add_option("--threads", flags.threads, "worker cap for path ensembles");
    sub->add_flag("--plot", flags.plot, "emit an SVG line plot");
  };

  CLI::App* sim = app.add_subcommand("simulate", "integrate one model, write trajectory CSV");
  add_common(sim);
  CLI::App* cmp = app.add_subcommand("compare", "strong-tracking comparison at a grid point");
  cmp->add_option("--model", model_path, "odd-noise strong model file");
  add_common(cmp, false);
  CLI::App* wm = app.add_subcommand("weakmap", "rewrite a strong table to its weak table");
  wm->add_option("--model", model_path, "strong model file");
  add_common(wm, false);
  CLI::App* cons = app.add_subcommand("consolidate", "replace psi noises by chi noises via QR");
  cons->add_option("--model", model_path, "weak model file");
  cons->add_option("--tol", tol, "relative rank threshold");
  add_common(cons, false);
  CLI::App* ver = app.add_subcommand("verify", "run the acceptance suite");
  ver->add_option("--models", models_dir, "directory with the shipped .model files");
  ver->add_option("--seed", verify_seed, "master seed");
  ver->add_option("--threads", flags.threads, "worker cap");
  ver->add_option("--out", flags.out_dir, "report directory");
  ver->add_flag("--quick", flags.quick, "reduced path counts, looser tolerances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(flags);
    if (cmp->parsed()) return cmd_compare(flags, model_path);
    if (wm->parsed()) return cmd_weakmap(flags, model_path);
    if (cons->parsed()) return cmd_consolidate(flags, model_path, tol);
    if (ver->parsed()) return cmd_verify(flags, models_dir, verify_seed);
  } catch (const BlowUpError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
