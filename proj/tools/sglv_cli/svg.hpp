#pragma once

#include <string>

#include "sglv/matrix.hpp"
#include "sglv/model.hpp"

namespace sglvcli {

// Line chart of the observed abundances: exactly one <polyline> per species,
// plus axes and tick labels. Standalone SVG with no external references.
std::string render_series_svg(const sglv::ObservationSeries& series,
                              const std::string& title);

// Log-abundance chart with the model's one-step predictions overlaid as
// dashed polylines. `predicted` holds x-scale predictions for observations
// 1..n-1 (one row per transition target).
std::string render_prediction_svg(const sglv::ObservationSeries& series,
                                  const sglv::Matrix& predicted,
                                  const std::string& title);

}  // namespace sglvcli
