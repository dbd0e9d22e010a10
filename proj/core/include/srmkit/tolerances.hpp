#pragma once

// Numerical tolerances used across the toolkit. Values sit roughly 100-1000x
// above double-precision epsilon, scaled for desk-sized problems (n, m <= 1e3).
namespace srmkit::tol {

// ||Q^T Q - I||_max for sampled orthogonal / permutation matrices.
inline constexpr double kOrthogonality = 1e-12;
// Orthonormality of SVD factors (max-abs).
inline constexpr double kSvdFactor = 1e-10;
// SVD reconstruction, relative to ||A||_F.
inline constexpr double kSvdReconstruction = 1e-8;
// Orthonormal-column constraint on fitted SRM transforms.
inline constexpr double kTransformOrthonormality = 1e-8;
// Slack allowed when checking monotone descent of the SRM objective.
inline constexpr double kDescentSlack = 1e-10;
// RSM symmetry / unit diagonal / range checks.
inline constexpr double kRsm = 1e-10;
// Equality of within-network RSMs required by build_srm_from_rsm_equal.
inline constexpr double kRsmEquality = 1e-8;
// Relative singular-value gap below which a compact SVD is not unique.
inline constexpr double kSpectrumGap = 1e-8;
// Singular values below this fraction of sigma_max are dropped from compact SVDs.
inline constexpr double kCompactRank = 1e-12;
// Relative reconstruction residual accepted by build_srm_from_rsm_equal.
inline constexpr double kConstructionResidual = 1e-6;
// Floor for the SRM convergence denominator, relative to total data energy.
inline constexpr double kObjectiveFloor = 1e-12;
// Objective at or below this fraction of total energy is treated as an exact fit.
inline constexpr double kExactFit = 1e-24;

}  // namespace srmkit::tol
