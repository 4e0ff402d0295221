#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fdbeam/config.hpp"

namespace fdbeam {

// One point of the Cartesian product of sweep axes.
struct AxisPoint {
  double delta_db = 0.0;
  double sigma_db = -20.0;
  int b_phs = 5;
  int b_amp = 5;
  std::optional<double> eps_tilde_db;
  std::optional<double> eps_eval_db;

  bool operator==(const AxisPoint&) const = default;
};

// Enumeration order: delta, sigma, b_phs, b_amp, eps_tilde, eps_eval (last varies fastest).
std::vector<AxisPoint> axis_points(const SweepAxes& axes);

DesignParams design_params(const ExperimentConfig& config, const AxisPoint& point);

// A missing optional is a -inf dB quantity (zero linear) and is written as an empty CSV field.
struct TrialRecord {
  std::uint64_t seed = 0;
  AxisPoint axis;
  std::string model;
  std::optional<double> E_design_db;
  std::optional<double> E_cbf_db;
  std::optional<double> E_tay20_db;
  std::optional<double> E_tay40_db;
  std::optional<double> med_gtx_db;
  std::optional<double> med_grx_db;
  std::optional<double> cov_resid_tx;
  std::optional<double> cov_resid_rx;
  std::string status = "ok";
  double ms = 0.0;
};

struct TrialOptions {
  // Test hook: use this channel instead of drawing one.
  std::optional<CMat> channel_override;
};

// Designed and benchmark codebooks of one trial plus the channel they were built for.
struct TrialArtifacts {
  CMat h;
  std::optional<DesignResult> design;
  Codebook cbf_tx, cbf_rx, tay20_tx, tay20_rx, tay40_tx, tay40_rx;
};

// Draws H from the trial stream, designs (unless benchmark-only), builds the scaled
// CBF/Tay-20/Tay-40 benchmarks, and evaluates every method. Design failures are caught
// and reported in `status`.
TrialRecord run_trial(const ExperimentConfig& config, const AxisPoint& point, std::uint64_t seed,
                      const TrialOptions& options = {});

// Same as run_trial for every eps_eval value in one go: the design is shared.
std::vector<TrialRecord> run_trial_group(const ExperimentConfig& config, AxisPoint point,
                                         const std::vector<std::optional<double>>& eps_eval_db, std::uint64_t seed,
                                         const TrialOptions& options = {}, TrialArtifacts* artifacts = nullptr);

// Channel draw used by trials: a function of the model and the seed only.
CMat trial_channel(const ExperimentConfig& config, std::uint64_t seed);

struct ErrorEvalReport {
  double mean_E = 0.0;
  double std_E = 0.0;
  std::vector<double> draws;
};

// E under H + sqrt(Nt Nr) Delta with ||Delta||_F = eps_eval drawn n_draws times.
ErrorEvalReport evaluate_under_error(const CMat& f_mat, const CMat& w_mat, const CMat& h, double eps_eval, int n_draws,
                                     Rng& rng);

struct LinkRow {
  double snr_db = 0.0;
  double inr_db = 0.0;
  double r_tx = 0.0;
  double r_rx = 0.0;
  double sum = 0.0;
  double c_fd = 0.0;
  double c_hd = 0.0;
};

// Average rates over user pairs drawn once and reused at every (snr, inr) point. Each user
// is served by the beam with the highest gain toward it.
std::vector<LinkRow> link_sweep(const ExperimentConfig& config, const CMat& f_mat, const CMat& w_mat, const CMat& h,
                                Rng& rng);

// ---- CSV persistence ----

const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string to_csv_row(const TrialRecord& r);
// Parses a data row; returns nullopt for aggregate rows.
std::optional<TrialRecord> parse_csv_row(const std::string& line);

// Aggregate over the ok rows of one axis point: E and gains are averaged in linear terms
// and converted back to dB.
TrialRecord aggregate(const std::vector<TrialRecord>& rows);

struct SweepOptions {
  int workers = 0;  // 0: FDBEAM_WORKERS or 1
  bool fresh = false;
  bool quiet = true;
  std::function<void(const TrialRecord&)> on_record;
};

struct SweepSummary {
  int completed = 0;  // trials run by this call
  int resumed = 0;    // trials already present in the CSV
  int failed = 0;
  double wall_seconds = 0.0;
  std::vector<TrialRecord> rows;        // every data row, sorted by (axis, trial)
  std::vector<TrialRecord> aggregates;  // one per axis point
};

// Runs every (axis point, trial) missing from `csv_path`, appending rows as they finish,
// then rewrites the file with data rows in canonical order followed by aggregate rows and
// writes a JSON manifest next to it.
SweepSummary sweep(const ExperimentConfig& config, const std::filesystem::path& csv_path,
                   const SweepOptions& options = {});

// Trial stream seed for (axis index, trial index).
std::uint64_t trial_seed(const ExperimentConfig& config, std::size_t axis_index, int trial);

int resolve_workers(int requested);

std::string build_id();

}  // namespace fdbeam
