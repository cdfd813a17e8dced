#pragma once

#include <iosfwd>
#include <vector>

#include "foodchain/sweep.hpp"

namespace foodchain::cli {

/// Static d2-z bifurcation diagram: equilibrium branches (blue stable, red
/// unstable) under the z-maxima of each sweep point.
void write_sweep_svg(std::ostream& os, const ModelParams& base, const std::vector<SweepPoint>& points);

}  // namespace foodchain::cli
