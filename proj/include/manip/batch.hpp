#pragma once

#include <vector>

#include "manip/spd.hpp"

namespace manip::batch {

/// Execution policy for the data-parallel kernels. Parallel uses OpenMP when
/// compiled in; results are bit-identical to Serial because every worker
/// writes its own output slot and reductions run serially in index order.
enum class Exec { Serial, Parallel };

/// Tangent coordinates of many points at a common base: row i is
/// mandel_vec(log_map(base, points[i])).
Matrix tangent_coordinates(const SpdMatrix& base, const std::vector<SpdMatrix>& points, Exec exec);

/// Affine-invariant distances from a reference to many points.
Vector distances_to(const SpdMatrix& ref, const std::vector<SpdMatrix>& points, Exec exec);

/// Weighted Karcher mean built on the batched tangent kernel. Serial policy
/// matches manip::karcher_mean bit for bit.
SpdMatrix karcher_mean(const std::vector<SpdMatrix>& points, const Vector& weights,
                       const KarcherOptions& opts, Exec exec);

}  // namespace manip::batch
