#include "fdbeam/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#ifndef FDBEAM_VERSION
#define FDBEAM_VERSION "dev"
#endif

namespace fdbeam {

using nlohmann::json;

std::vector<AxisPoint> axis_points(const SweepAxes& axes) {
  std::vector<AxisPoint> out;
  for (double d : axes.delta_db)
    for (double s : axes.sigma_db)
      for (int bp : axes.b_phs)
        for (int ba : axes.b_amp)
          for (const auto& et : axes.eps_tilde_db)
            for (const auto& ee : axes.eps_eval_db) out.push_back({d, s, bp, ba, et, ee});
  return out;
}

DesignParams design_params(const ExperimentConfig& config, const AxisPoint& point) {
  DesignParams p;
  p.delta_tx_sq = p.delta_rx_sq = db_to_pow(point.delta_db);
  p.sigma_tx_sq = p.sigma_rx_sq = db_to_pow(point.sigma_db);
  p.eps_tilde = point.eps_tilde_db ? db_to_amplitude(*point.eps_tilde_db) : 0.0;
  QuantizationSpec q;
  q.b_phs = point.b_phs;
  q.b_amp = point.b_amp;
  q.lsb_db = config.lsb_db;
  q.amp_mode = config.amp_mode;
  p.spec_tx = p.spec_rx = q;
  p.solver = config.solver;
  p.passes = config.passes;
  return p;
}

std::uint64_t trial_seed(const ExperimentConfig& config, std::size_t axis_index, int trial) {
  return stream_seed(config.master_seed, axis_index, static_cast<std::uint64_t>(trial));
}

CMat trial_channel(const ExperimentConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  return draw_channel(config.si_model, config.geometry_tx, config.geometry_rx, rng);
}

ErrorEvalReport evaluate_under_error(const CMat& f_mat, const CMat& w_mat, const CMat& h, double eps_eval, int n_draws,
                                     Rng& rng) {
  if (n_draws < 1) throw Error("evaluate_under_error: need at least one draw");
  ErrorEvalReport r;
  for (int k = 0; k < n_draws; ++k) {
    const CMat delta = draw_error(static_cast<int>(h.rows()), static_cast<int>(h.cols()), eps_eval, rng);
    r.draws.push_back(average_coupling(w_mat, perturb(h, delta), f_mat).E);
  }
  double sum = 0.0;
  for (double e : r.draws) sum += e;
  r.mean_E = sum / n_draws;
  double var = 0.0;
  for (double e : r.draws) var += (e - r.mean_E) * (e - r.mean_E);
  r.std_E = n_draws > 1 ? std::sqrt(var / (n_draws - 1)) : 0.0;
  return r;
}

namespace {

std::optional<double> db_or_null(double linear) {
  if (!(linear > 0.0)) return std::nullopt;
  return pow_to_db(linear);
}

double linear_of(const std::optional<double>& db) { return db ? db_to_pow(*db) : 0.0; }

// Error-draw stream: depends on the trial seed and the eps_eval value, not its position.
std::uint64_t error_seed(std::uint64_t seed, double eps_eval_db) {
  return mix64(seed ^ mix64(std::bit_cast<std::uint64_t>(eps_eval_db) + 0x5EED));
}

Codebook benchmark(const ArrayGeometry& g, const std::vector<Direction>& dirs, const QuantizationSpec& spec,
                   double amplitude, std::optional<double> sll_db, const BenchmarkSettings& b, const char* label) {
  RVec taper = RVec::Ones(g.size());
  if (sll_db) taper = array_window(g, WindowSpec{*sll_db, b.nbar, b.layout});
  return tapered_cbf(g, dirs, spec, taper * amplitude, label);
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  }
  return s;
}

}  // namespace

std::vector<TrialRecord> run_trial_group(const ExperimentConfig& config, AxisPoint point,
                                         const std::vector<std::optional<double>>& eps_eval_db, std::uint64_t seed,
                                         const TrialOptions& options, TrialArtifacts* artifacts) {
  const auto t0 = std::chrono::steady_clock::now();
  config.validate();
  const CMat h = options.channel_override ? *options.channel_override : trial_channel(config, seed);
  if (h.rows() != config.geometry_rx.size() || h.cols() != config.geometry_tx.size()) {
    throw Error("trial: channel shape does not match geometries");
  }
  const auto dirs_tx = coverage_grid(config.grid_tx);
  const auto dirs_rx = coverage_grid(config.grid_rx);
  point.eps_eval_db.reset();
  const DesignParams params = design_params(config, point);

  std::optional<DesignResult> design_result;
  std::string status = config.benchmark_only ? "benchmark" : "ok";
  if (!config.benchmark_only) {
    try {
      design_result = design(h, config.geometry_tx, config.geometry_rx, dirs_tx, dirs_rx, params);
    } catch (const Error& e) {
      status = "failed: " + sanitize(e.what());
    }
  }

  QuantizationSpec bench_spec = params.spec_tx;
  if (config.benchmark.b_phs) bench_spec.b_phs = *config.benchmark.b_phs;
  if (config.benchmark.b_amp) bench_spec.b_amp = *config.benchmark.b_amp;
  const double amp_tx = std::sqrt(params.delta_tx_sq);
  const double amp_rx = std::sqrt(params.delta_rx_sq);
  const auto& b = config.benchmark;
  const auto& gt = config.geometry_tx;
  const auto& gr = config.geometry_rx;
  struct Pair {
    CMat f, w;
  };
  const Codebook cbf_tx = benchmark(gt, dirs_tx, bench_spec, amp_tx, std::nullopt, b, "CBF");
  const Codebook cbf_rx = benchmark(gr, dirs_rx, bench_spec, amp_rx, std::nullopt, b, "CBF");
  const Codebook t20_tx = benchmark(gt, dirs_tx, bench_spec, amp_tx, 20.0, b, "CBF+Tay-20");
  const Codebook t20_rx = benchmark(gr, dirs_rx, bench_spec, amp_rx, 20.0, b, "CBF+Tay-20");
  const Codebook t40_tx = benchmark(gt, dirs_tx, bench_spec, amp_tx, 40.0, b, "CBF+Tay-40");
  const Codebook t40_rx = benchmark(gr, dirs_rx, bench_spec, amp_rx, 40.0, b, "CBF+Tay-40");
  const Pair cbf{to_matrix(cbf_tx), to_matrix(cbf_rx)};
  const Pair t20{to_matrix(t20_tx), to_matrix(t20_rx)};
  const Pair t40{to_matrix(t40_tx), to_matrix(t40_rx)};
  std::optional<Pair> des;
  if (design_result) des = Pair{to_matrix(design_result->tx_codebook), to_matrix(design_result->rx_codebook)};

  TrialRecord base;
  base.seed = seed;
  base.axis = point;
  base.model = model_name(config.si_model);
  base.status = status;
  if (design_result) {
    const auto dense_tx = dense_eval_grid(config.grid_tx, config.dense_n_az, config.dense_n_el);
    const auto dense_rx = dense_eval_grid(config.grid_rx, config.dense_n_az, config.dense_n_el);
    base.med_gtx_db = db_or_null(db_to_pow(coverage(des->f, gt, dense_tx).median_db));
    base.med_grx_db = db_or_null(db_to_pow(coverage(des->w, gr, dense_rx).median_db));
    base.cov_resid_tx = design_result->coverage_tx.residual();
    base.cov_resid_rx = design_result->coverage_rx.residual();
  }

  std::vector<TrialRecord> out;
  for (const auto& ee : eps_eval_db) {
    TrialRecord r = base;
    r.axis.eps_eval_db = ee;
    auto eval = [&](const Pair& p) -> std::optional<double> {
      if (!ee) return db_or_null(average_coupling(p.w, h, p.f).E);
      Rng rng(error_seed(seed, *ee));
      return db_or_null(evaluate_under_error(p.f, p.w, h, db_to_amplitude(*ee), config.eval.n_error_draws, rng).mean_E);
    };
    if (des) r.E_design_db = eval(*des);
    r.E_cbf_db = eval(cbf);
    r.E_tay20_db = eval(t20);
    r.E_tay40_db = eval(t40);
    out.push_back(std::move(r));
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  for (auto& r : out) r.ms = ms;

  if (artifacts) {
    artifacts->h = h;
    artifacts->design = std::move(design_result);
    artifacts->cbf_tx = cbf_tx;
    artifacts->cbf_rx = cbf_rx;
    artifacts->tay20_tx = t20_tx;
    artifacts->tay20_rx = t20_rx;
    artifacts->tay40_tx = t40_tx;
    artifacts->tay40_rx = t40_rx;
  }
  return out;
}

TrialRecord run_trial(const ExperimentConfig& config, const AxisPoint& point, std::uint64_t seed,
                      const TrialOptions& options) {
  return run_trial_group(config, point, {point.eps_eval_db}, seed, options).front();
}

std::vector<LinkRow> link_sweep(const ExperimentConfig& config, const CMat& f_mat, const CMat& w_mat, const CMat& h,
                                Rng& rng) {
  if (f_mat.rows() != config.geometry_tx.size() || w_mat.rows() != config.geometry_rx.size()) {
    throw Error("link_sweep: codebooks do not match the configured geometries");
  }
  struct Users {
    CVec h_tx, h_rx, f, w;
  };
  std::vector<Users> users;
  for (int u = 0; u < config.link.n_user_draws; ++u) {
    Users x;
    x.h_tx = draw_user_channel(config.geometry_tx, config.grid_tx, rng).entries;
    x.h_rx = draw_user_channel(config.geometry_rx, config.grid_rx, rng).entries;
    Eigen::Index i = 0, j = 0;
    (f_mat.adjoint() * x.h_tx).cwiseAbs2().maxCoeff(&i);
    (w_mat.adjoint() * x.h_rx).cwiseAbs2().maxCoeff(&j);
    x.f = f_mat.col(i);
    x.w = w_mat.col(j);
    users.push_back(std::move(x));
  }
  std::vector<LinkRow> rows;
  for (double snr : config.link.snr_db) {
    for (double inr : config.link.inr_db) {
      LinkBudget budget{db_to_pow(snr), db_to_pow(snr), db_to_pow(inr)};
      LinkRow row;
      row.snr_db = snr;
      row.inr_db = inr;
      for (const auto& x : users) {
        const RateReport r = rates(budget, x.h_tx, x.f, x.h_rx, x.w, h);
        row.r_tx += r.r_tx;
        row.r_rx += r.r_rx;
        row.c_fd += r.c_fd;
      }
      const double n = static_cast<double>(users.size());
      row.r_tx /= n;
      row.r_rx /= n;
      row.sum = row.r_tx + row.r_rx;
      row.c_fd /= n;
      row.c_hd = 0.5 * row.c_fd;
      rows.push_back(row);
    }
  }
  return rows;
}

// ---- CSV ----

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "seed",       "delta_db",   "sigma_db",  "b_phs",      "b_amp",      "eps_tilde_db",
      "eps_eval_db", "model",     "E_design_db", "E_cbf_db", "E_tay20_db", "E_tay40_db",
      "med_gtx_db", "med_grx_db", "cov_resid_tx", "cov_resid_rx", "status", "ms"};
  return cols;
}

std::string csv_header() {
  std::string s;
  for (const auto& c : csv_columns()) s += (s.empty() ? "" : ",") + c;
  return s;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw FormatError("csv: bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

constexpr const char* kAggregateSeed = "agg";

}  // namespace

std::string to_csv_row(const TrialRecord& r) {
  std::ostringstream s;
  s << (r.status.rfind("agg", 0) == 0 ? std::string(kAggregateSeed) : std::to_string(r.seed)) << ','
    << num(r.axis.delta_db) << ',' << num(r.axis.sigma_db) << ',' << r.axis.b_phs << ',' << r.axis.b_amp << ','
    << opt(r.axis.eps_tilde_db) << ',' << opt(r.axis.eps_eval_db) << ',' << r.model << ',' << opt(r.E_design_db) << ','
    << opt(r.E_cbf_db) << ',' << opt(r.E_tay20_db) << ',' << opt(r.E_tay40_db) << ',' << opt(r.med_gtx_db) << ','
    << opt(r.med_grx_db) << ',' << opt(r.cov_resid_tx) << ',' << opt(r.cov_resid_rx) << ',' << sanitize(r.status)
    << ',' << num(r.ms);
  return s.str();
}

std::optional<TrialRecord> parse_csv_row(const std::string& line) {
  const auto f = split(line);
  if (f.size() != csv_columns().size()) throw FormatError("csv: expected " + std::to_string(csv_columns().size()) + " fields");
  if (f[0] == kAggregateSeed) return std::nullopt;
  try {
    TrialRecord r;
    std::size_t used = 0;
    r.seed = std::stoull(f[0], &used);
    if (used != f[0].size()) throw FormatError("csv: bad seed");
    r.axis.delta_db = *parse_opt(f[1]);
    r.axis.sigma_db = *parse_opt(f[2]);
    r.axis.b_phs = std::stoi(f[3]);
    r.axis.b_amp = std::stoi(f[4]);
    r.axis.eps_tilde_db = parse_opt(f[5]);
    r.axis.eps_eval_db = parse_opt(f[6]);
    r.model = f[7];
    r.E_design_db = parse_opt(f[8]);
    r.E_cbf_db = parse_opt(f[9]);
    r.E_tay20_db = parse_opt(f[10]);
    r.E_tay40_db = parse_opt(f[11]);
    r.med_gtx_db = parse_opt(f[12]);
    r.med_grx_db = parse_opt(f[13]);
    r.cov_resid_tx = parse_opt(f[14]);
    r.cov_resid_rx = parse_opt(f[15]);
    r.status = f[16];
    r.ms = parse_opt(f[17]).value_or(0.0);
    return r;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("csv: malformed row: ") + e.what());
  }
}

TrialRecord aggregate(const std::vector<TrialRecord>& rows) {
  if (rows.empty()) throw Error("aggregate: no rows");
  TrialRecord a;
  a.axis = rows.front().axis;
  a.model = rows.front().model;
  int ok = 0;
  double e_des = 0, e_cbf = 0, e_t20 = 0, e_t40 = 0, g_tx = 0, g_rx = 0, c_tx = 0, c_rx = 0, ms = 0;
  bool has_design = false, has_cov = false;
  for (const auto& r : rows) {
    if (r.status.rfind("failed", 0) == 0) continue;
    ++ok;
    has_design = has_design || r.status == "ok";
    e_des += linear_of(r.E_design_db);
    e_cbf += linear_of(r.E_cbf_db);
    e_t20 += linear_of(r.E_tay20_db);
    e_t40 += linear_of(r.E_tay40_db);
    g_tx += linear_of(r.med_gtx_db);
    g_rx += linear_of(r.med_grx_db);
    if (r.cov_resid_tx && r.cov_resid_rx) {
      has_cov = true;
      c_tx += *r.cov_resid_tx;
      c_rx += *r.cov_resid_rx;
    }
    ms += r.ms;
  }
  a.status = "agg " + std::to_string(ok) + "/" + std::to_string(rows.size());
  if (ok == 0) return a;
  const double n = ok;
  if (has_design) {
    a.E_design_db = db_or_null(e_des / n);
    a.med_gtx_db = db_or_null(g_tx / n);
    a.med_grx_db = db_or_null(g_rx / n);
  }
  a.E_cbf_db = db_or_null(e_cbf / n);
  a.E_tay20_db = db_or_null(e_t20 / n);
  a.E_tay40_db = db_or_null(e_t40 / n);
  if (has_cov) {
    a.cov_resid_tx = c_tx / n;
    a.cov_resid_rx = c_rx / n;
  }
  a.ms = ms / n;
  return a;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FDBEAM_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    throw Error("FDBEAM_WORKERS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string build_id() {
  std::string id = std::string("fdbeam ") + FDBEAM_VERSION;
#ifdef __VERSION__
  id += std::string(" / ") + __VERSION__;
#endif
  return id;
}

SweepSummary sweep(const ExperimentConfig& config, const std::filesystem::path& csv_path, const SweepOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  config.validate();
  const auto points = axis_points(config.axes);
  const std::size_t n_eval = config.axes.eps_eval_db.size();
  const std::size_t n_design = points.size() / n_eval;
  const std::string hash = config_hash(config);
  auto manifest_path = csv_path;
  manifest_path.replace_extension(".manifest.json");

  auto axis_index_of = [&](const AxisPoint& p) -> std::size_t {
    for (std::size_t i = 0; i < points.size(); ++i)
      if (points[i] == p) return i;
    throw FormatError("sweep: existing CSV row does not belong to this configuration");
  };

  // Key: (axis index, seed).
  std::map<std::pair<std::size_t, std::uint64_t>, TrialRecord> done;
  const bool exists = std::filesystem::exists(csv_path);
  if (exists && !options.fresh) {
    if (std::filesystem::exists(manifest_path)) {
      std::ifstream mf(manifest_path);
      json m;
      try {
        m = json::parse(mf);
      } catch (const json::exception& e) {
        throw FormatError(std::string("sweep: unreadable manifest: ") + e.what());
      }
      if (m.value("config_hash", "") != hash) {
        throw FormatError("sweep: " + csv_path.string() + " was produced by a different configuration (use a fresh run)");
      }
    }
    std::ifstream in(csv_path);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (first) {
        first = false;
        if (line != csv_header()) throw FormatError("sweep: unexpected CSV header in " + csv_path.string());
        continue;
      }
      std::optional<TrialRecord> r;
      try {
        r = parse_csv_row(line);
      } catch (const FormatError&) {
        continue;  // a partially written last line from an interrupted run
      }
      if (r) done[{axis_index_of(r->axis), r->seed}] = *r;
    }
  }

  struct Item {
    std::size_t design_index;
    int trial;
    std::uint64_t seed;
  };
  std::vector<Item> items;
  std::map<std::uint64_t, int> trial_of_seed;
  SweepSummary summary;
  for (std::size_t d = 0; d < n_design; ++d) {
    for (int t = 0; t < config.trials; ++t) {
      const std::uint64_t seed = trial_seed(config, d, t);
      trial_of_seed[seed] = t;
      bool complete = true;
      for (std::size_t e = 0; e < n_eval; ++e) complete = complete && done.count({d * n_eval + e, seed}) > 0;
      if (complete) {
        ++summary.resumed;
      } else {
        items.push_back({d, t, seed});
      }
    }
  }

  if (!exists || options.fresh) {
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    std::ofstream out(csv_path, std::ios::trunc);
    if (!out) throw Error("cannot write " + csv_path.string());
    out << csv_header() << '\n';
  }
  {
    json m;
    m["config_hash"] = hash;
    m["config"] = json::parse(to_json_string(config));
    m["build_id"] = build_id();
    m["state"] = "running";
    std::ofstream mf(manifest_path, std::ios::trunc);
    mf << m.dump(2) << '\n';
  }

  bool needs_newline = false;
  if (exists && !options.fresh && std::filesystem::file_size(csv_path) > 0) {
    std::ifstream in(csv_path, std::ios::binary);
    in.seekg(-1, std::ios::end);
    needs_newline = in.get() != '\n';
  }
  std::ofstream sink(csv_path, std::ios::app);
  if (!sink) throw Error("cannot append to " + csv_path.string());
  // Terminate a line cut short by an interrupted run.
  if (needs_newline) sink << '\n';
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::exception_ptr worker_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= items.size()) return;
      const Item& it = items[k];
      try {
        AxisPoint p = points[it.design_index * n_eval];
        auto rows = run_trial_group(config, p, config.axes.eps_eval_db, it.seed);
        std::lock_guard<std::mutex> lock(mu);
        for (std::size_t e = 0; e < n_eval; ++e) {
          const auto key = std::make_pair(it.design_index * n_eval + e, it.seed);
          if (done.count(key)) continue;
          sink << to_csv_row(rows[e]) << '\n';
          done[key] = rows[e];
          if (options.on_record) options.on_record(rows[e]);
        }
        sink.flush();
        ++summary.completed;
        if (!options.quiet) {
          std::cerr << "trial " << summary.completed << "/" << items.size() << " (" << rows.front().status << ")\n";
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!worker_error) worker_error = std::current_exception();
        next = items.size();
        return;
      }
    }
  };
  const int n_workers = std::min<int>(resolve_workers(options.workers), std::max<std::size_t>(1, items.size()));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  sink.close();
  if (worker_error) std::rethrow_exception(worker_error);

  // Canonical rewrite: data rows ordered by (axis, trial), then one aggregate per axis point.
  std::vector<std::vector<TrialRecord>> by_axis(points.size());
  for (const auto& [key, rec] : done) by_axis[key.first].push_back(rec);
  for (auto& rows : by_axis) {
    std::sort(rows.begin(), rows.end(), [&](const TrialRecord& l, const TrialRecord& r) {
      const auto tl = trial_of_seed.count(l.seed) ? trial_of_seed.at(l.seed) : -1;
      const auto tr = trial_of_seed.count(r.seed) ? trial_of_seed.at(r.seed) : -1;
      return tl != tr ? tl < tr : l.seed < r.seed;
    });
    for (const auto& r : rows) {
      summary.rows.push_back(r);
      if (r.status.rfind("failed", 0) == 0) ++summary.failed;
    }
    if (!rows.empty()) summary.aggregates.push_back(aggregate(rows));
  }
  auto tmp = csv_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << csv_header() << '\n';
    for (const auto& r : summary.rows) out << to_csv_row(r) << '\n';
    for (const auto& a : summary.aggregates) out << to_csv_row(a) << '\n';
  }
  std::filesystem::rename(tmp, csv_path);

  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json m;
  m["config_hash"] = hash;
  m["config"] = json::parse(to_json_string(config));
  m["build_id"] = build_id();
  m["state"] = "complete";
  m["wall_seconds"] = summary.wall_seconds;
  m["workers"] = n_workers;
  m["trials_per_point"] = config.trials;
  m["axis_points"] = points.size();
  m["data_rows"] = summary.rows.size();
  m["trials_run"] = summary.completed;
  m["trials_resumed"] = summary.resumed;
  m["failed_rows"] = summary.failed;
  std::ofstream mf(manifest_path, std::ios::trunc);
  mf << m.dump(2) << '\n';
  return summary;
}

}  // namespace fdbeam
