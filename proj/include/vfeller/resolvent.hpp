#pragma once

#include <vector>

#include "vfeller/kernels.hpp"

namespace vfeller {

/// Resolvent of the first kind L = atom * delta_0 + density dt on a uniform grid.
struct ResolventGrid {
  double dt = 0.0;
  double horizon = 0.0;
  double atom = 0.0;
  std::vector<double> t;
  std::vector<double> density;        // rho(t_i), piecewise constant on [t_i, t_{i+1})
  std::vector<double> kprime_conv_L;  // (K' * L)(t_i)
  double residual = 0.0;              // max_i |(K * L)(t_i) - 1|
};

/// Forward substitution of the left-rectangle discretisation of
/// K * rho = 1 - K / K(0). The reported residual and K' * L integrate the
/// piecewise-constant density exactly against K and K' cell by cell.
ResolventGrid solve_resolvent(const KernelSpec& kernel, double dt, double horizon);

struct HypothesisReport {
  double tol = 0.0;
  bool density_nonnegative = true;
  int worst_density_index = -1;
  double worst_density = 0.0;
  bool kprime_nonpositive = true;
  int worst_positive_index = -1;
  double worst_positive = 0.0;
  bool kprime_nondecreasing = true;
  int worst_decrease_index = -1;  // i such that K'*L drops from i to i + 1
  double worst_decrease = 0.0;
  bool all() const { return density_nonnegative && kprime_nonpositive && kprime_nondecreasing; }
};

/// tol <= 0 selects the default 100 dt.
HypothesisReport check_hypotheses(const ResolventGrid& grid, double tol = 0.0);

/// Scalars with hypotheses_hold set from a resolvent check.
KernelScalars verified_scalars(const KernelSpec& kernel, double dt = 1e-3, double horizon = 5.0);

}  // namespace vfeller
