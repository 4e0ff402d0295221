#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fdbeam/geometry.hpp"
#include "fdbeam/quantization.hpp"

namespace fdbeam {

// A codebook: one hardware-realizable beam per served direction.
struct Codebook {
  ArrayGeometry geometry;
  QuantizationSpec spec;
  std::vector<Direction> directions;
  std::vector<QuantizedBeam> beams;
  std::string label;
  // Weights whose requested magnitude fell below the attenuator floor when the codebook
  // was built; those weights sit at the deepest level.
  int saturated_weights = 0;

  std::size_t size() const { return beams.size(); }
  void validate() const;

  bool operator==(const Codebook& o) const {
    return geometry == o.geometry && spec == o.spec && directions == o.directions && beams == o.beams &&
           label == o.label;
  }
};

// How a 1D Taylor taper is laid over a planar array.
enum class WindowLayout {
  azimuth,     // taper across columns (y axis), uniform down each column
  vectorized,  // one length-N taper over the element index
  separable,   // outer product of row and column tapers
};

std::string to_string(WindowLayout layout);
WindowLayout window_layout_from_string(const std::string& s);

struct WindowSpec {
  double sll_db = 20.0;
  int nbar = 4;
  WindowLayout layout = WindowLayout::azimuth;
};

// Classical Taylor nbar taper normalized to unit peak. Throws when the taper is not
// monotone from centre to edge (nbar too large for the requested sidelobe level).
RVec taylor_window_1d(int n, const WindowSpec& window);

// Element-wise taper for an array, laid out per window.layout.
RVec array_window(const ArrayGeometry& geometry, const WindowSpec& window);

// Conjugate beamforming: beam i = P(a(dir_i)).
Codebook cbf(const ArrayGeometry& geometry, const std::vector<Direction>& directions, const QuantizationSpec& spec);

// Tapered conjugate beamforming: beam i = P(a(dir_i) .* v).
Codebook windowed_cbf(const ArrayGeometry& geometry, const std::vector<Direction>& directions,
                      const QuantizationSpec& spec, const WindowSpec& window);

// Same construction with an explicit taper vector of length N.
Codebook tapered_cbf(const ArrayGeometry& geometry, const std::vector<Direction>& directions,
                     const QuantizationSpec& spec, const RVec& taper, std::string label);

// Re-projects delta * realize(beam) for every beam; delta in (0, 1].
Codebook scale(const Codebook& codebook, double delta_amplitude);

// Builds a codebook from unquantized beam columns.
Codebook from_matrix(const ArrayGeometry& geometry, const std::vector<Direction>& directions,
                     const QuantizationSpec& spec, const CMat& beams, std::string label);

// N x M matrix of realized beams.
CMat to_matrix(const Codebook& codebook);

// Number of entries of v below the smallest attenuator level.
int count_below_floor(const Eigen::Ref<const CVec>& v, const QuantizationSpec& spec);

std::string to_json_string(const Codebook& codebook);
Codebook codebook_from_json_string(const std::string& text);
void save(const Codebook& codebook, const std::filesystem::path& path);
Codebook load(const std::filesystem::path& path);

}  // namespace fdbeam
