#include "fdbeam/quantization.hpp"

#include <algorithm>
#include <cmath>

namespace fdbeam {

std::string to_string(AmpMode mode) {
  switch (mode) {
    case AmpMode::log: return "log";
    case AmpMode::linear: return "linear";
    case AmpMode::none: return "none";
  }
  return "none";
}

AmpMode amp_mode_from_string(const std::string& s) {
  if (s == "log") return AmpMode::log;
  if (s == "linear") return AmpMode::linear;
  if (s == "none") return AmpMode::none;
  throw FormatError("unknown amp_mode '" + s + "'");
}

void QuantizationSpec::validate() const {
  if (b_phs < 0 || b_phs > 31) throw Error("b_phs must be in [0, 31]");
  if (b_amp < 0 || b_amp > 31) throw Error("b_amp must be in [0, 31]");
  if (amp_mode == AmpMode::log && !(lsb_db > 0.0)) throw Error("lsb_db must be positive");
}

double QuantizationSpec::amp_level(std::int64_t k) const {
  const std::int64_t count = amp_count();
  if (count == 1 || k == 0) return 1.0;
  if (amp_mode == AmpMode::log) return std::pow(10.0, -lsb_db * static_cast<double>(k) / 20.0);
  const double step = (1.0 - std::ldexp(1.0, -b_amp)) / static_cast<double>(count - 1);
  return 1.0 - static_cast<double>(k) * step;
}

QuantizationSpec QuantizationSpec::unquantized_phase() {
  QuantizationSpec s;
  s.b_phs = 30;
  s.b_amp = 0;
  s.amp_mode = AmpMode::none;
  return s;
}

std::vector<double> phase_levels(const QuantizationSpec& spec) {
  spec.validate();
  if (spec.b_phs > 20) throw Error("phase level table too large to materialize");
  std::vector<double> out(static_cast<std::size_t>(spec.phase_count()));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = spec.phase_level(static_cast<std::int64_t>(k));
  return out;
}

std::vector<double> amp_levels(const QuantizationSpec& spec) {
  spec.validate();
  if (spec.amp_count() > (std::int64_t{1} << 20)) throw Error("amplitude level table too large to materialize");
  std::vector<double> out(static_cast<std::size_t>(spec.amp_count()));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = spec.amp_level(static_cast<std::int64_t>(k));
  return out;
}

namespace {

std::int64_t nearest_phase(cd w, const QuantizationSpec& spec) {
  const std::int64_t count = spec.phase_count();
  if (count == 1 || w == cd{0.0, 0.0}) return 0;
  double angle = std::arg(w);
  if (angle < 0.0) angle += 2.0 * kPi;
  const double step = spec.phase_step();
  const auto lo = static_cast<std::int64_t>(std::floor(angle / step)) % count;
  const std::int64_t hi = (lo + 1) % count;
  // For a fixed amplitude the best phase maximizes cos(angle - level).
  const double c_lo = std::cos(angle - spec.phase_level(lo));
  const double c_hi = std::cos(angle - spec.phase_level(hi));
  if (c_hi > c_lo) return hi;
  if (c_hi < c_lo) return lo;
  return std::min(lo, hi);
}

// Nearest amplitude level to the real target r; ties prefer the smaller index.
std::int64_t nearest_amp(double r, const QuantizationSpec& spec) {
  const std::int64_t count = spec.amp_count();
  if (count == 1) return 0;
  double k_real = 0.0;
  if (spec.amp_mode == AmpMode::log) {
    if (r <= 0.0) return count - 1;
    k_real = -20.0 * std::log10(r) / spec.lsb_db;
  } else {
    const double step = (1.0 - std::ldexp(1.0, -spec.b_amp)) / static_cast<double>(count - 1);
    k_real = (1.0 - r) / step;
  }
  if (!(k_real > 0.0)) return 0;
  if (k_real >= static_cast<double>(count - 1)) return count - 1;
  const auto lo = static_cast<std::int64_t>(std::floor(k_real));
  const std::int64_t hi = std::min(lo + 1, count - 1);
  // Scan a small neighbourhood to absorb rounding in the index estimate.
  std::int64_t best = std::max<std::int64_t>(lo - 1, 0);
  double best_d = std::abs(spec.amp_level(best) - r);
  for (std::int64_t k = best + 1; k <= std::min(hi + 1, count - 1); ++k) {
    const double d = std::abs(spec.amp_level(k) - r);
    if (d < best_d) {
      best = k;
      best_d = d;
    }
  }
  return best;
}

}  // namespace

QuantizedWeight project_weight(cd w, const QuantizationSpec& spec) {
  QuantizedWeight q;
  q.phase_idx = nearest_phase(w, spec);
  // With the phase fixed, |w - A e^{j phi}|^2 is a parabola in A centred at |w| cos(delta).
  const double r = std::abs(w) * std::cos(std::arg(w) - spec.phase_level(q.phase_idx));
  q.amp_idx = nearest_amp(w == cd{0.0, 0.0} ? 0.0 : r, spec);
  return q;
}

cd realize(const QuantizedWeight& q, const QuantizationSpec& spec) {
  return std::polar(spec.amp_level(q.amp_idx), spec.phase_level(q.phase_idx));
}

QuantizedBeam project_beam(const Eigen::Ref<const CVec>& v, const QuantizationSpec& spec) {
  spec.validate();
  QuantizedBeam beam;
  beam.spec = spec;
  beam.weights.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index n = 0; n < v.size(); ++n) beam.weights.push_back(project_weight(v[n], spec));
  return beam;
}

CVec realize(const QuantizedBeam& beam) {
  CVec out(static_cast<Eigen::Index>(beam.weights.size()));
  for (std::size_t n = 0; n < beam.weights.size(); ++n) {
    out[static_cast<Eigen::Index>(n)] = realize(beam.weights[n], beam.spec);
  }
  return out;
}

bool in_range(const QuantizedBeam& beam) {
  const auto pc = beam.spec.phase_count();
  const auto ac = beam.spec.amp_count();
  return std::all_of(beam.weights.begin(), beam.weights.end(), [&](const QuantizedWeight& q) {
    return q.phase_idx >= 0 && q.phase_idx < pc && q.amp_idx >= 0 && q.amp_idx < ac;
  });
}

}  // namespace fdbeam
