#pragma once

#include <cstddef>

namespace boolperc::tolerance {

// Hyperboloid constraint |x^2 + y^2 - t^2 + 1|.
inline constexpr double kModel = 1e-9;
// Relative asymmetry allowed in d(p, q) vs d(q, p).
inline constexpr double kSymmetry = 1e-12;
// Slack for triangle-inequality pruning in the vantage-point tree.
inline constexpr double kPruneSlack = 1e-9;
// Largest expected point count sample_configuration accepts.
inline constexpr double kMaxExpectedPoints = 1e8;

}  // namespace boolperc::tolerance
