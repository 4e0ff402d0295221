#include "fdbeam/codebooks.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fdbeam {

using nlohmann::json;

std::string to_string(WindowLayout layout) {
  switch (layout) {
    case WindowLayout::azimuth: return "azimuth";
    case WindowLayout::vectorized: return "vectorized";
    case WindowLayout::separable: return "separable";
  }
  return "azimuth";
}

WindowLayout window_layout_from_string(const std::string& s) {
  if (s == "azimuth") return WindowLayout::azimuth;
  if (s == "vectorized") return WindowLayout::vectorized;
  if (s == "separable") return WindowLayout::separable;
  throw FormatError("unknown window layout '" + s + "'");
}

void Codebook::validate() const {
  geometry.validate();
  spec.validate();
  if (beams.empty()) throw Error("codebook must hold at least one beam");
  if (beams.size() != directions.size()) throw Error("codebook beam and direction counts differ");
  for (const auto& b : beams) {
    if (static_cast<int>(b.weights.size()) != geometry.size()) throw Error("beam length does not match array size");
    if (!(b.spec == spec)) throw Error("beam quantization spec differs from codebook spec");
    if (!in_range(b)) throw Error("beam index out of range for quantization spec");
  }
}

RVec taylor_window_1d(int n, const WindowSpec& window) {
  if (n < 1) throw Error("window length must be positive");
  if (window.nbar < 1) throw Error("Taylor nbar must be >= 1");
  if (!(window.sll_db > 0.0)) throw Error("Taylor sidelobe level must be positive");
  if (n < window.nbar) throw Error("Taylor window shorter than nbar");

  const double b = std::pow(10.0, window.sll_db / 20.0);
  const double a = std::acosh(b) / kPi;
  const int nbar = window.nbar;
  const double s2 = nbar * nbar / (a * a + (nbar - 0.5) * (nbar - 0.5));

  std::vector<double> fm(static_cast<std::size_t>(std::max(nbar - 1, 0)));
  for (int m = 1; m < nbar; ++m) {
    double numer = (m % 2 == 1) ? 1.0 : -1.0;
    double denom = 2.0;
    for (int j = 1; j < nbar; ++j) {
      numer *= 1.0 - (m * m) / s2 / (a * a + (j - 0.5) * (j - 0.5));
      if (j != m) denom *= 1.0 - static_cast<double>(m * m) / (j * j);
    }
    fm[static_cast<std::size_t>(m - 1)] = numer / denom;
  }

  RVec w(n);
  for (int k = 0; k < n; ++k) {
    double v = 1.0;
    for (int m = 1; m < nbar; ++m) {
      v += 2.0 * fm[static_cast<std::size_t>(m - 1)] * std::cos(2.0 * kPi * m * (k - n / 2.0 + 0.5) / n);
    }
    w[k] = v;
  }
  w /= w.maxCoeff();

  // Centre-to-edge monotonicity; a violation means edge brightening.
  const double tol = 1e-12;
  for (int k = 0; k < n; ++k) {
    if (!(w[k] > 0.0)) throw Error("Taylor window has non-positive entries for these parameters");
  }
  for (int k = 0; k + 1 < (n + 1) / 2; ++k) {
    if (w[k] > w[k + 1] + tol) throw Error("Taylor nbar too large for the requested sidelobe level");
  }
  return w;
}

RVec array_window(const ArrayGeometry& geometry, const WindowSpec& window) {
  const int n = geometry.size();
  RVec out(n);
  switch (window.layout) {
    case WindowLayout::vectorized:
      return taylor_window_1d(n, window);
    case WindowLayout::azimuth: {
      const RVec wc = taylor_window_1d(geometry.cols, window);
      for (int c = 0; c < geometry.cols; ++c)
        for (int r = 0; r < geometry.rows; ++r) out[c * geometry.rows + r] = wc[c];
      return out;
    }
    case WindowLayout::separable: {
      const RVec wc = taylor_window_1d(geometry.cols, window);
      const RVec wr = taylor_window_1d(geometry.rows, window);
      for (int c = 0; c < geometry.cols; ++c)
        for (int r = 0; r < geometry.rows; ++r) out[c * geometry.rows + r] = wc[c] * wr[r];
      return out;
    }
  }
  return out;
}

int count_below_floor(const Eigen::Ref<const CVec>& v, const QuantizationSpec& spec) {
  if (spec.amp_count() == 1) return 0;
  const double floor = spec.amp_level(spec.amp_count() - 1);
  int count = 0;
  for (Eigen::Index n = 0; n < v.size(); ++n) count += std::abs(v[n]) < floor ? 1 : 0;
  return count;
}

Codebook from_matrix(const ArrayGeometry& geometry, const std::vector<Direction>& directions,
                     const QuantizationSpec& spec, const CMat& beams, std::string label) {
  if (beams.rows() != geometry.size() || beams.cols() != static_cast<Eigen::Index>(directions.size())) {
    throw Error("beam matrix shape does not match geometry and directions");
  }
  Codebook cb;
  cb.geometry = geometry;
  cb.spec = spec;
  cb.directions = directions;
  cb.label = std::move(label);
  for (Eigen::Index i = 0; i < beams.cols(); ++i) {
    cb.beams.push_back(project_beam(beams.col(i), spec));
    cb.saturated_weights += count_below_floor(beams.col(i), spec);
  }
  cb.validate();
  return cb;
}

Codebook cbf(const ArrayGeometry& geometry, const std::vector<Direction>& directions, const QuantizationSpec& spec) {
  return from_matrix(geometry, directions, spec, steering_matrix(geometry, directions).entries, "CBF");
}

Codebook tapered_cbf(const ArrayGeometry& geometry, const std::vector<Direction>& directions,
                     const QuantizationSpec& spec, const RVec& taper, std::string label) {
  if (taper.size() != geometry.size()) throw Error("taper length does not match array size");
  CMat a = steering_matrix(geometry, directions).entries;
  a = taper.cast<cd>().asDiagonal() * a;
  return from_matrix(geometry, directions, spec, a, std::move(label));
}

Codebook windowed_cbf(const ArrayGeometry& geometry, const std::vector<Direction>& directions,
                      const QuantizationSpec& spec, const WindowSpec& window) {
  std::ostringstream label;
  label << "CBF+Tay-" << window.sll_db;
  return tapered_cbf(geometry, directions, spec, array_window(geometry, window), label.str());
}

Codebook scale(const Codebook& codebook, double delta_amplitude) {
  if (!(delta_amplitude > 0.0 && delta_amplitude <= 1.0)) throw Error("scale factor must lie in (0, 1]");
  Codebook out = codebook;
  if (delta_amplitude == 1.0) return out;
  out.saturated_weights = 0;
  for (auto& beam : out.beams) {
    const CVec v = delta_amplitude * realize(beam);
    out.saturated_weights += count_below_floor(v, codebook.spec);
    beam = project_beam(v, codebook.spec);
  }
  return out;
}

CMat to_matrix(const Codebook& codebook) {
  CMat out(codebook.geometry.size(), static_cast<Eigen::Index>(codebook.beams.size()));
  for (std::size_t i = 0; i < codebook.beams.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = realize(codebook.beams[i]);
  }
  return out;
}

namespace {

constexpr int kFormatVersion = 1;

json spec_to_json(const QuantizationSpec& s) {
  return {{"b_phs", s.b_phs}, {"b_amp", s.b_amp}, {"lsb_db", s.lsb_db}, {"amp_mode", to_string(s.amp_mode)}};
}

QuantizationSpec spec_from_json(const json& j) {
  QuantizationSpec s;
  s.b_phs = j.at("b_phs").get<int>();
  s.b_amp = j.at("b_amp").get<int>();
  s.lsb_db = j.at("lsb_db").get<double>();
  s.amp_mode = amp_mode_from_string(j.at("amp_mode").get<std::string>());
  s.validate();
  return s;
}

}  // namespace

std::string to_json_string(const Codebook& cb) {
  json j;
  j["version"] = kFormatVersion;
  j["label"] = cb.label;
  j["geometry"] = {{"rows", cb.geometry.rows}, {"cols", cb.geometry.cols}, {"spacing", cb.geometry.spacing}};
  j["spec"] = spec_to_json(cb.spec);
  json deg = json::array();
  json rad = json::array();
  for (const auto& d : cb.directions) {
    deg.push_back({rad2deg(d.azimuth), rad2deg(d.elevation)});
    rad.push_back({d.azimuth, d.elevation});
  }
  j["directions_deg"] = deg;
  // Exact radians alongside the human-readable degrees so reloads are bit-identical.
  j["directions_rad"] = rad;
  json beams = json::array();
  for (const auto& b : cb.beams) {
    json phase = json::array();
    json amp = json::array();
    for (const auto& w : b.weights) {
      phase.push_back(w.phase_idx);
      amp.push_back(w.amp_idx);
    }
    beams.push_back({{"phase_idx", phase}, {"amp_idx", amp}});
  }
  j["beams"] = beams;
  j["saturated_weights"] = cb.saturated_weights;
  return j.dump(1);
}

Codebook codebook_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("codebook: invalid JSON: ") + e.what());
  }
  try {
    if (!j.contains("version") || j.at("version").get<int>() != kFormatVersion) {
      throw FormatError("codebook: unsupported or missing format version");
    }
    Codebook cb;
    cb.label = j.value("label", "");
    const auto& g = j.at("geometry");
    cb.geometry.rows = g.at("rows").get<int>();
    cb.geometry.cols = g.at("cols").get<int>();
    cb.geometry.spacing = g.at("spacing").get<double>();
    cb.spec = spec_from_json(j.at("spec"));
    const auto& deg = j.at("directions_deg");
    for (const auto& d : deg) {
      if (d.size() != 2) throw FormatError("codebook: direction entries must be [az, el]");
      cb.directions.push_back({deg2rad(d[0].get<double>()), deg2rad(d[1].get<double>())});
    }
    if (j.contains("directions_rad")) {
      const auto& rad = j.at("directions_rad");
      if (rad.size() != deg.size()) throw FormatError("codebook: directions_rad length mismatch");
      for (std::size_t i = 0; i < rad.size(); ++i) {
        if (rad[i].size() != 2) throw FormatError("codebook: direction entries must be [az, el]");
        cb.directions[i] = {rad[i][0].get<double>(), rad[i][1].get<double>()};
      }
    }
    const auto& beams = j.at("beams");
    if (beams.size() != cb.directions.size()) throw FormatError("codebook: beam count differs from direction count");
    for (const auto& b : beams) {
      const auto& phase = b.at("phase_idx");
      const auto& amp = b.at("amp_idx");
      if (static_cast<int>(phase.size()) != cb.geometry.size() || static_cast<int>(amp.size()) != cb.geometry.size()) {
        throw FormatError("codebook: beam length does not match geometry");
      }
      QuantizedBeam qb;
      qb.spec = cb.spec;
      for (std::size_t n = 0; n < phase.size(); ++n) {
        qb.weights.push_back({phase[n].get<std::int64_t>(), amp[n].get<std::int64_t>()});
      }
      if (!in_range(qb)) throw FormatError("codebook: quantization index out of range");
      cb.beams.push_back(std::move(qb));
    }
    cb.saturated_weights = j.value("saturated_weights", 0);
    cb.validate();
    return cb;
  } catch (const FormatError&) {
    throw;
  } catch (const json::exception& e) {
    throw FormatError(std::string("codebook: ") + e.what());
  } catch (const Error& e) {
    throw FormatError(std::string("codebook: ") + e.what());
  }
}

void save(const Codebook& codebook, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json_string(codebook) << '\n';
}

Codebook load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return codebook_from_json_string(ss.str());
}

}  // namespace fdbeam
