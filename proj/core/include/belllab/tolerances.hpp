#pragma once

namespace belllab {

// Tolerance for claims that are exact up to float rounding.
inline constexpr double kExactTol = 1e-12;

// Tolerance for comparing two analytic computations of the same quantity.
inline constexpr double kAnalyticTol = 1e-9;

// Default tolerance for condition audits.
inline constexpr double kDefaultAuditTol = 1e-9;

// Witnesses are the earliest grid point within this slack of the max
// deviation, so float noise cannot move the witness between grid points
// that deviate by the same amount analytically.
inline constexpr double kWitnessSlack = 1e-12;

// Default number of standard errors a statistical check may deviate by.
inline constexpr double kDefaultSigma = 4.0;

}  // namespace belllab
