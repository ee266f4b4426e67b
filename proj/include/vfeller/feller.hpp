#pragma once

#include <string>
#include <vector>

#include "vfeller/fracapprox.hpp"
#include "vfeller/kernels.hpp"
#include "vfeller/model.hpp"
#include "vfeller/scale.hpp"

namespace vfeller {

enum class Boundary { Left, Right, Both };

/// NoExitAS with boundary Left reads "P({S < S-} or {S- = inf}) = 1": the path
/// never leaves through the left endpoint first. Right and Both are analogous.
enum class Verdict {
  NoExitAS,
  ExitsWithPositiveProb,
  NecessaryHolds,
  SupBoundedAS,
  InfBoundedAS,
  Inconclusive
};

struct Evidence {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
};

struct BoundaryVerdict {
  Boundary boundary = Boundary::Both;
  Verdict verdict = Verdict::Inconclusive;
  std::string theorem;
  std::vector<Evidence> evidence;
  std::vector<std::string> assumptions_checked;
};

const char* to_string(Boundary b);
const char* to_string(Verdict v);
bool is_decisive(Verdict v);

/// Default shift for necessary_test: 1e-6 times the interval width, or times
/// max(1, |x0|) when the interval is unbounded.
double default_eps_shift(const ModelSpec& model);

/// v_c(l+; -beta) with beta = x0 + eps and v_c(r-; -gamma) with gamma = x0 - eps.
/// The base point and options of `ctx` are used; its shifts are ignored.
BoundaryVerdict necessary_test(const ScaleContext& ctx, double eps_shift);

/// v_c(l_n; -l_n) and v_c(r_n; -r_n) along sequences approaching the endpoints.
BoundaryVerdict sufficient_test(const ScaleContext& ctx, int n_stages);

/// Bounded interval with integrable sigma~^{-2}: v_c(l+; 0) = v_c(r-; 0) = inf is
/// necessary and sufficient.
BoundaryVerdict bounded_interval_test(const ScaleContext& ctx);

enum class SupInfSide { Sup, Inf };

/// Boundedness of sup (or inf) of the path before S via the limits of p_c.
BoundaryVerdict sup_inf_test(const ScaleContext& ctx, SupInfSide side);

/// Closed-form verdicts for the CIR, Jacobi and power families.
std::vector<BoundaryVerdict> family_test(const ModelSpec& model, const KernelScalars& kernel);
std::vector<BoundaryVerdict> family_test(const ModelSpec& model, const KernelSpec& kernel);

enum class SchemeKind { Truncation, FractionalWeight, GeometricBB2 };
enum class Regime { Diverging, Vanishing, Bounded };
const char* to_string(Regime r);

struct StudyRow {
  double sweep = 0.0;  // T for truncation, number of intervals N otherwise
  double xi_max = 0.0; // largest mixing rate retained
  double k0 = 0.0;
  double kp0 = 0.0;
  double threshold = 0.0;  // sigma^2 K0^3 / (2|K'0|) - kappa theta K0^2 / |K'0|
  double gap = 0.0;        // 2 kappa theta - K0 sigma^2
  Regime regime = Regime::Bounded;
};

struct StudyOptions {
  double xi1 = 1.0;    // first node of the geometric schemes
  double ratio = 6.4;  // geometric growth ratio
  int q = 1;
};

/// For each sweep value (T for truncation, number of intervals N otherwise) builds
/// the kernel and tabulates the CIR necessary-threshold quantity and sufficient gap.
std::vector<StudyRow> fractional_condition_study(double alpha, SchemeKind scheme,
                                                 const CIRParams& model,
                                                 const std::vector<double>& sweep,
                                                 const StudyOptions& options = {});

/// Asymptotic behaviour of the threshold as the sweep parameter grows.
Regime asymptotic_regime(double alpha, SchemeKind scheme);

}  // namespace vfeller
