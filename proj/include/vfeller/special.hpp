#pragma once

namespace vfeller::special {

/// Gamma function via the Lanczos approximation (g = 7, 9 terms) with reflection
/// for arguments below 1/2. Relative accuracy is better than 1e-13 on (0, 10].
double gamma(double x);

/// Natural log of |Gamma(x)|, for x > 0.
double log_gamma(double x);

}  // namespace vfeller::special
