#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fdbeam/channels.hpp"
#include "fdbeam/codebooks.hpp"
#include "fdbeam/designer.hpp"

namespace fdbeam {

// Sweep axes. Angles and levels are given in degrees and dB in the file; an empty optional
// in eps_tilde_db means eps_tilde = 0 and in eps_eval_db means the nominal channel.
struct SweepAxes {
  std::vector<double> delta_db{0.0};
  std::vector<double> sigma_db{-20.0};
  std::vector<int> b_phs{5};
  std::vector<int> b_amp{5};
  std::vector<std::optional<double>> eps_tilde_db{std::nullopt};
  std::vector<std::optional<double>> eps_eval_db{std::nullopt};
};

struct EvalSettings {
  int n_error_draws = 20;
};

struct LinkSettings {
  std::vector<double> snr_db{0.0};
  std::vector<double> inr_db{-300.0, 0.0, 20.0, 40.0, 60.0, 80.0};
  int n_user_draws = 100;
};

struct BenchmarkSettings {
  // Benchmark resolution; unset fields follow the design point.
  std::optional<int> b_phs;
  std::optional<int> b_amp;
  WindowLayout layout = WindowLayout::azimuth;
  int nbar = 4;
};

struct ExperimentConfig {
  ArrayGeometry geometry_tx;
  ArrayGeometry geometry_rx;
  DirectionGrid grid_tx = DirectionGrid::default_region();
  DirectionGrid grid_rx = DirectionGrid::default_region();
  int dense_n_az = 121;
  int dense_n_el = 61;
  SIChannelModel si_model = RayleighModel{};
  SweepAxes axes;
  double lsb_db = 0.25;
  AmpMode amp_mode = AmpMode::log;
  SolverConfig solver;
  int passes = 1;
  BenchmarkSettings benchmark;
  EvalSettings eval;
  LinkSettings link;
  int trials = 20;
  std::uint64_t master_seed = 1;
  bool benchmark_only = false;

  void validate() const;
};

ExperimentConfig config_from_json_string(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
// Canonical JSON form; parsing it back yields an equal configuration.
std::string to_json_string(const ExperimentConfig& config);

// 64-bit FNV-1a of the canonical JSON, as hex.
std::string config_hash(const ExperimentConfig& config);

// Amplitude-domain value of a power level in dB: 10^(db / 20). Used for eps and eps_tilde.
inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

}  // namespace fdbeam
