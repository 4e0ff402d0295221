#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fdbeam/harness.hpp"
#include "json.hpp"

namespace fdbeam::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  bool quiet = false;
};

ExperimentConfig load_or_default(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  if (c.seed) cfg.master_seed = *c.seed;
  cfg.validate();
  return cfg;
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw FormatError("--out is required");
  fs::create_directories(dir);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json db_json(double linear) { return linear > 0.0 ? json(pow_to_db(linear)) : json(nullptr); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void save_channel(const CMat& h, const fs::path& path) {
  json j;
  j["rows"] = h.rows();
  j["cols"] = h.cols();
  json re = json::array(), im = json::array();
  for (Eigen::Index c = 0; c < h.cols(); ++c)
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
      re.push_back(h(r, c).real());
      im.push_back(h(r, c).imag());
    }
  j["re"] = re;
  j["im"] = im;
  write_text(path, j.dump() + "\n");
}

CMat load_channel(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open channel " + path.string());
  try {
    const json j = json::parse(in);
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (rows < 1 || cols < 1 || re.size() != static_cast<std::size_t>(rows * cols) || im.size() != re.size()) {
      throw FormatError("channel: entry count does not match shape");
    }
    CMat h(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r, ++k) h(r, c) = cd(re[k].get<double>(), im[k].get<double>());
    return h;
  } catch (const json::exception& e) {
    throw FormatError(std::string("channel: ") + e.what());
  }
}

json coverage_json(const CoverageConstraintReport& r) {
  return {{"lhs", r.lhs}, {"bound", r.bound}, {"residual", r.residual()}};
}

AxisPoint pick_point(const ExperimentConfig& cfg, std::size_t index) {
  const auto points = axis_points(cfg.axes);
  if (index >= points.size()) throw FormatError("--axis index out of range (" + std::to_string(points.size()) + " points)");
  return points[index];
}

// Design axis index (eps_eval excluded) of a full axis index.
std::size_t design_index(const ExperimentConfig& cfg, std::size_t axis) { return axis / cfg.axes.eps_eval_db.size(); }

int cmd_design(const Common& c, std::size_t axis, int trial, std::ostream& out) {
  const ExperimentConfig cfg = load_or_default(c);
  ensure_dir(c.out);
  AxisPoint p = pick_point(cfg, axis);
  p.eps_eval_db.reset();
  const std::uint64_t seed = trial_seed(cfg, design_index(cfg, axis), trial);
  const CMat h = trial_channel(cfg, seed);
  const auto dirs_tx = coverage_grid(cfg.grid_tx);
  const auto dirs_rx = coverage_grid(cfg.grid_rx);
  const DesignResult r = design(h, cfg.geometry_tx, cfg.geometry_rx, dirs_tx, dirs_rx, design_params(cfg, p));
  const fs::path dir(c.out);
  save(r.tx_codebook, dir / "tx_codebook.json");
  save(r.rx_codebook, dir / "rx_codebook.json");
  save_channel(h, dir / "channel.json");
  json rep;
  rep["seed"] = seed;
  rep["axis"] = {{"delta_db", p.delta_db},
                 {"sigma_db", p.sigma_db},
                 {"b_phs", p.b_phs},
                 {"b_amp", p.b_amp},
                 {"eps_tilde_db", p.eps_tilde_db ? json(*p.eps_tilde_db) : json(nullptr)}};
  rep["model"] = model_name(cfg.si_model);
  rep["E_final"] = r.E_final;
  rep["E_final_db"] = db_json(r.E_final);
  rep["objective_trace_db"] = json::array();
  for (double e : r.objective_trace) rep["objective_trace_db"].push_back(db_json(e));
  rep["per_beam_gain_tx"] = std::vector<double>(r.per_beam_gain_tx.begin(), r.per_beam_gain_tx.end());
  rep["per_beam_gain_rx"] = std::vector<double>(r.per_beam_gain_rx.begin(), r.per_beam_gain_rx.end());
  rep["coverage"] = {{"tx", coverage_json(r.coverage_tx)},
                     {"rx", coverage_json(r.coverage_rx)},
                     {"tx_unquantized", coverage_json(r.coverage_tx_pre)},
                     {"rx_unquantized", coverage_json(r.coverage_rx_pre)}};
  rep["saturated_weights"] = {{"tx", r.tx_codebook.saturated_weights}, {"rx", r.rx_codebook.saturated_weights}};
  rep["solver_nonconverged"] = r.solver_nonconverged;
  rep["warnings"] = r.warnings;
  write_text(dir / "design_report.json", rep.dump(2) + "\n");
  if (!c.quiet) out << "E_final " << num(r.E_final) << " (" << (r.E_final > 0 ? num(pow_to_db(r.E_final)) : "-inf") << " dB)\n";
  return kOk;
}

int cmd_eval(const Common& c, const std::string& tx_path, const std::string& rx_path, const std::string& channel_path,
             int trial, std::ostream& out) {
  ensure_dir(c.out);
  const Codebook tx = load(tx_path);
  const Codebook rx = load(rx_path);
  ExperimentConfig cfg = load_or_default(c);
  CMat h;
  if (!channel_path.empty()) {
    h = load_channel(channel_path);
  } else {
    cfg.geometry_tx = tx.geometry;
    cfg.geometry_rx = rx.geometry;
    h = trial_channel(cfg, trial_seed(cfg, 0, trial));
  }
  const CouplingReport cr = average_coupling(rx, h, tx);
  const fs::path dir(c.out);
  {
    std::ostringstream s;
    s << "rx_beam,tx_beam,coupling,coupling_db\n";
    for (Eigen::Index j = 0; j < cr.pair_matrix.rows(); ++j)
      for (Eigen::Index i = 0; i < cr.pair_matrix.cols(); ++i) {
        const double v = cr.pair_matrix(j, i);
        s << j << ',' << i << ',' << num(v) << ',' << (v > 0 ? num(pow_to_db(v)) : "") << '\n';
      }
    write_text(dir / "coupling.csv", s.str());
  }
  auto cov = [&](const Codebook& cb, const DirectionGrid& region, const char* name) {
    const CoverageReport r = coverage(cb, dense_eval_grid(region, cfg.dense_n_az, cfg.dense_n_el));
    std::ostringstream s;
    s << "az_deg,el_deg,gain,gain_db\n";
    for (std::size_t k = 0; k < r.directions.size(); ++k) {
      const double g = r.gains[static_cast<Eigen::Index>(k)];
      s << num(rad2deg(r.directions[k].azimuth)) << ',' << num(rad2deg(r.directions[k].elevation)) << ',' << num(g)
        << ',' << (g > 0 ? num(pow_to_db(g)) : "") << '\n';
    }
    write_text(dir / (std::string("coverage_") + name + ".csv"), s.str());
    return r.median_db;
  };
  const double med_tx = cov(tx, cfg.grid_tx, "tx");
  const double med_rx = cov(rx, cfg.grid_rx, "rx");
  json rep;
  rep["E"] = cr.E;
  rep["E_db"] = db_json(cr.E);
  rep["median_gain_tx_db"] = med_tx;
  rep["median_gain_rx_db"] = med_rx;
  write_text(dir / "eval_report.json", rep.dump(2) + "\n");
  if (!c.quiet) out << "E " << num(cr.E) << "\n";
  return kOk;
}

SweepOptions sweep_options(const Common& c, bool fresh) {
  SweepOptions o;
  o.workers = c.workers;
  o.fresh = fresh;
  o.quiet = c.quiet;
  return o;
}

int cmd_sweep(const Common& c, bool fresh, std::ostream& out) {
  const ExperimentConfig cfg = load_or_default(c);
  ensure_dir(c.out);
  const SweepSummary s = sweep(cfg, fs::path(c.out) / "sweep.csv", sweep_options(c, fresh));
  if (!c.quiet) {
    out << "rows " << s.rows.size() << ", run " << s.completed << ", resumed " << s.resumed << ", failed " << s.failed
        << "\n";
  }
  return s.failed > 0 ? kFailed : kOk;
}

int cmd_bench(const Common& c, bool fresh, std::ostream& out) {
  ExperimentConfig cfg = load_or_default(c);
  cfg.axes.eps_eval_db = {std::nullopt};
  ensure_dir(c.out);
  const SweepSummary s = sweep(cfg, fs::path(c.out) / "bench_trials.csv", sweep_options(c, fresh));
  std::ostringstream t;
  t << "delta_db,sigma_db,b_phs,b_amp,eps_tilde_db,method,E_mean_db,design_gain_db,trials_ok\n";
  for (const auto& a : s.aggregates) {
    const std::string ok = a.status.substr(4);
    auto row = [&](const char* method, const std::optional<double>& e) {
      t << num(a.axis.delta_db) << ',' << num(a.axis.sigma_db) << ',' << a.axis.b_phs << ',' << a.axis.b_amp << ','
        << (a.axis.eps_tilde_db ? num(*a.axis.eps_tilde_db) : "") << ',' << method << ',' << (e ? num(*e) : "") << ',';
      if (e && a.E_design_db) t << num(*e - *a.E_design_db);
      t << ',' << ok << '\n';
    };
    row("design", a.E_design_db);
    row("cbf", a.E_cbf_db);
    row("cbf+tay20", a.E_tay20_db);
    row("cbf+tay40", a.E_tay40_db);
  }
  write_text(fs::path(c.out) / "bench.csv", t.str());
  if (!c.quiet) out << t.str();
  return s.failed > 0 ? kFailed : kOk;
}

int cmd_linksim(const Common& c, const std::string& tx_path, const std::string& rx_path,
                const std::string& channel_path, std::size_t axis, int trial, std::ostream& out) {
  ExperimentConfig cfg = load_or_default(c);
  ensure_dir(c.out);
  struct Method {
    std::string name;
    CMat f, w;
  };
  std::vector<Method> methods;
  CMat h;
  std::uint64_t seed = trial_seed(cfg, design_index(cfg, axis), trial);
  if (!tx_path.empty() || !rx_path.empty()) {
    if (tx_path.empty() || rx_path.empty() || channel_path.empty()) {
      throw FormatError("linksim needs --tx, --rx and --channel together");
    }
    const Codebook tx = load(tx_path);
    const Codebook rx = load(rx_path);
    cfg.geometry_tx = tx.geometry;
    cfg.geometry_rx = rx.geometry;
    h = load_channel(channel_path);
    methods.push_back({tx.label.empty() ? "codebook" : tx.label, to_matrix(tx), to_matrix(rx)});
  } else {
    AxisPoint p = pick_point(cfg, axis);
    TrialArtifacts art;
    const auto rec = run_trial_group(cfg, p, {std::nullopt}, seed, {}, &art);
    if (!art.design) throw InfeasibleError("linksim: design failed: " + rec.front().status);
    h = art.h;
    methods.push_back({"design", to_matrix(art.design->tx_codebook), to_matrix(art.design->rx_codebook)});
    methods.push_back({"cbf", to_matrix(art.cbf_tx), to_matrix(art.cbf_rx)});
    methods.push_back({"cbf+tay20", to_matrix(art.tay20_tx), to_matrix(art.tay20_rx)});
    methods.push_back({"cbf+tay40", to_matrix(art.tay40_tx), to_matrix(art.tay40_rx)});
  }
  std::ostringstream s;
  s << "method,snr_db,inr_db,r_tx,r_rx,sum,c_fd,c_hd\n";
  for (const auto& m : methods) {
    // Same user draws for every method.
    Rng rng(mix64(seed ^ 0x11CE));
    for (const auto& r : link_sweep(cfg, m.f, m.w, h, rng)) {
      s << m.name << ',' << num(r.snr_db) << ',' << num(r.inr_db) << ',' << num(r.r_tx) << ',' << num(r.r_rx) << ','
        << num(r.sum) << ',' << num(r.c_fd) << ',' << num(r.c_hd) << '\n';
    }
  }
  write_text(fs::path(c.out) / "rates.csv", s.str());
  if (!c.quiet) out << s.str();
  return kOk;
}

int cmd_cut(const std::string& codebook_path, std::size_t beam, const std::string& axis_name, double fixed_deg,
            double from_deg, double to_deg, int points, const std::string& out_path, bool quiet, std::ostream& out) {
  const Codebook cb = load(codebook_path);
  if (beam >= cb.size()) throw FormatError("--beam out of range (" + std::to_string(cb.size()) + " beams)");
  const CutAxis axis = axis_name == "az" ? CutAxis::azimuth : CutAxis::elevation;
  const PatternCut cut = pattern_cut(realize(cb.beams[beam]), cb.geometry, axis, deg2rad(fixed_deg), deg2rad(from_deg),
                                     deg2rad(to_deg), points);
  std::ostringstream s;
  s << "angle_deg,gain,gain_db\n";
  for (Eigen::Index k = 0; k < cut.angles.size(); ++k) {
    s << num(rad2deg(cut.angles[k])) << ',' << num(cut.gains[k]) << ','
      << (cut.gains[k] > 0 ? num(pow_to_db(cut.gains[k])) : "") << '\n';
  }
  if (out_path.empty() || out_path == "-") {
    out << s.str();
  } else {
    const fs::path p(out_path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_text(p, s.str());
    if (!quiet) out << "wrote " << out_path << "\n";
  }
  return kOk;
}

int cmd_info(const Common& c, std::ostream& out) {
  const ExperimentConfig cfg = load_or_default(c);
  out << build_id() << "\n";
  out << "tx directions " << coverage_grid(cfg.grid_tx).size() << ", rx directions " << coverage_grid(cfg.grid_rx).size()
      << ", axis points " << axis_points(cfg.axes).size() << ", trials " << cfg.trials << "\n";
  out << "config hash " << config_hash(cfg) << "\n";
  out << to_json_string(cfg) << "\n";
  return kOk;
}

void add_common(CLI::App* app, Common& c, bool needs_out) {
  app->add_option("--config", c.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  auto* o = app->add_option("--out", c.out, "Output directory");
  if (needs_out) o->required();
  app->add_option("--seed", c.seed, "Master seed override");
  app->add_option("--workers", c.workers, "Worker threads (overrides FDBEAM_WORKERS)")->check(CLI::PositiveNumber);
  app->add_flag("--quiet", c.quiet, "Suppress progress output");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Beam codebook design for full-duplex phased arrays", "fdbeam"};
  app.require_subcommand(1);
  app.set_version_flag("--version", build_id());

  Common c;
  std::size_t axis = 0;
  int trial = 0;
  bool fresh = false;
  std::string tx_path, rx_path, channel_path, codebook_path, cut_axis = "az", cut_out;
  std::size_t beam = 0;
  double fixed_deg = 0.0, from_deg = -90.0, to_deg = 90.0;
  int points = 361;

  auto* design_cmd = app.add_subcommand("design", "Design transmit and receive codebooks for one trial");
  add_common(design_cmd, c, true);
  design_cmd->add_option("--axis", axis, "Axis point index");
  design_cmd->add_option("--trial", trial, "Trial index")->check(CLI::NonNegativeNumber);

  auto* eval_cmd = app.add_subcommand("eval", "Coupling and coverage of saved codebooks");
  add_common(eval_cmd, c, true);
  eval_cmd->add_option("--tx", tx_path, "Transmit codebook")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--rx", rx_path, "Receive codebook")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--channel", channel_path, "Channel file; drawn from the config when omitted")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--trial", trial, "Trial index for a drawn channel")->check(CLI::NonNegativeNumber);

  auto* bench_cmd = app.add_subcommand("bench", "Design versus CBF, CBF+Tay-20 and CBF+Tay-40");
  add_common(bench_cmd, c, true);
  bench_cmd->add_flag("--fresh", fresh, "Discard existing results");

  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep over the configured axes");
  add_common(sweep_cmd, c, true);
  sweep_cmd->add_flag("--fresh", fresh, "Discard existing results instead of resuming");

  auto* link_cmd = app.add_subcommand("linksim", "Sum spectral efficiency versus SNR and INR");
  add_common(link_cmd, c, true);
  link_cmd->add_option("--tx", tx_path, "Transmit codebook")->check(CLI::ExistingFile);
  link_cmd->add_option("--rx", rx_path, "Receive codebook")->check(CLI::ExistingFile);
  link_cmd->add_option("--channel", channel_path, "Channel file")->check(CLI::ExistingFile);
  link_cmd->add_option("--axis", axis, "Axis point index when designing");
  link_cmd->add_option("--trial", trial, "Trial index when designing")->check(CLI::NonNegativeNumber);

  auto* cut_cmd = app.add_subcommand("cut", "Azimuth or elevation pattern cut of one beam");
  cut_cmd->add_option("--codebook", codebook_path, "Codebook file")->required()->check(CLI::ExistingFile);
  cut_cmd->add_option("--beam", beam, "Beam index");
  cut_cmd->add_option("--axis", cut_axis, "Cut axis")->check(CLI::IsMember({"az", "el"}));
  cut_cmd->add_option("--fixed-deg", fixed_deg, "The other angle, degrees");
  cut_cmd->add_option("--from-deg", from_deg, "Sweep start, degrees");
  cut_cmd->add_option("--to-deg", to_deg, "Sweep stop, degrees");
  cut_cmd->add_option("--points", points, "Number of samples")->check(CLI::Range(2, 1000000));
  cut_cmd->add_option("--out", cut_out, "Output CSV file ('-' for stdout)");
  cut_cmd->add_flag("--quiet", c.quiet, "Suppress progress output");

  auto* info_cmd = app.add_subcommand("info", "Build id and the effective configuration");
  add_common(info_cmd, c, false);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << build_id() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "fdbeam: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*design_cmd) return cmd_design(c, axis, trial, out);
    if (*eval_cmd) return cmd_eval(c, tx_path, rx_path, channel_path, trial, out);
    if (*bench_cmd) return cmd_bench(c, fresh, out);
    if (*sweep_cmd) return cmd_sweep(c, fresh, out);
    if (*link_cmd) return cmd_linksim(c, tx_path, rx_path, channel_path, axis, trial, out);
    if (*cut_cmd) return cmd_cut(codebook_path, beam, cut_axis, fixed_deg, from_deg, to_deg, points, cut_out, c.quiet, out);
    if (*info_cmd) return cmd_info(c, out);
  } catch (const InfeasibleError& e) {
    err << "fdbeam: " << e.what() << "\n";
    return kFailed;
  } catch (const std::exception& e) {
    err << "fdbeam: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace fdbeam::cli
