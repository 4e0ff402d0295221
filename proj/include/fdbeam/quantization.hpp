#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fdbeam/types.hpp"

namespace fdbeam {

enum class AmpMode { log, linear, none };

std::string to_string(AmpMode mode);
AmpMode amp_mode_from_string(const std::string& s);

// Digitally controlled phase shifter + attenuator resolution.
//
// Phase levels are 2*pi*k / 2^b_phs. Attenuator levels depend on amp_mode:
//   log    - 10^(-lsb_db * k / 20), lsb_db being a power step
//   linear - evenly spaced from 1 down to 2^-b_amp
//   none   - the single level 1 (constant modulus)
struct QuantizationSpec {
  int b_phs = 5;
  int b_amp = 5;
  double lsb_db = 0.25;
  AmpMode amp_mode = AmpMode::log;

  void validate() const;
  std::int64_t phase_count() const { return std::int64_t{1} << b_phs; }
  std::int64_t amp_count() const {
    return (amp_mode == AmpMode::none || b_amp == 0) ? 1 : (std::int64_t{1} << b_amp);
  }
  double phase_step() const { return 2.0 * kPi / static_cast<double>(phase_count()); }
  double amp_level(std::int64_t k) const;
  double phase_level(std::int64_t k) const { return phase_step() * static_cast<double>(k); }

  // Phase-only spec with b_phs = 30, used as a stand-in for unquantized weights.
  static QuantizationSpec unquantized_phase();

  bool operator==(const QuantizationSpec&) const = default;
};

struct QuantizedWeight {
  std::int64_t phase_idx = 0;
  std::int64_t amp_idx = 0;

  bool operator==(const QuantizedWeight&) const = default;
};

struct QuantizedBeam {
  std::vector<QuantizedWeight> weights;
  QuantizationSpec spec;

  bool operator==(const QuantizedBeam&) const = default;
};

// Materialized level tables (small specs only; throws for b_phs > 20 or b_amp > 20).
std::vector<double> phase_levels(const QuantizationSpec& spec);
std::vector<double> amp_levels(const QuantizationSpec& spec);

// Nearest grid point in Euclidean distance; ties prefer smaller amp_idx, then smaller phase_idx.
QuantizedWeight project_weight(cd w, const QuantizationSpec& spec);
cd realize(const QuantizedWeight& q, const QuantizationSpec& spec);

QuantizedBeam project_beam(const Eigen::Ref<const CVec>& v, const QuantizationSpec& spec);
CVec realize(const QuantizedBeam& beam);

// True when every index is inside the spec's ranges.
bool in_range(const QuantizedBeam& beam);

}  // namespace fdbeam
