#pragma once

#include "foodchain/model.hpp"

namespace foodchain {

// Reference parameter sets. The Ivlev set is the least-squares transfer of
// the Holling one.
inline ModelParams holling_reference(double d2) {
  return {ResponseSpec::holling2(4.98, 6.2), ResponseSpec::holling2(0.46, 2.0), 0.4, d2};
}

inline ModelParams ivlev_reference(double d2) {
  return {ResponseSpec::ivlev(0.67, 5.349), ResponseSpec::ivlev(0.1647, 2.457), 0.4, d2};
}

}  // namespace foodchain
