#pragma once

#include <string>
#include <vector>

#include "vfeller/kernels.hpp"
#include "vfeller/model.hpp"

namespace vfeller {

/// Decision procedure used when a boundary limit is judged from samples.
struct LimitOptions {
  double cap = 1e12;          // sampled value above this counts as divergence
  int finite_steps = 12;      // samples toward a finite endpoint, spacing halves each step
  int infinite_steps = 16;    // samples x = +-2^k toward an infinite endpoint
  int window = 4;             // trailing increment ratios inspected
  double finite_ratio = 0.9;  // all ratios at or below: geometric contraction
  double divergent_ratio = 0.97;
  bool closed_form = true;  // exponent-sign decision for built-in families
};

struct ScaleOptions {
  double quad_tol = 1e-10;  // relative tolerance of the adaptive integrals
  int max_subdivisions = 4000;
  bool closed_form = true;  // closed-form log p' for built-in families
  LimitOptions limit;
};

/// Model, kernel scalars, base point and shifts. Immutable.
class ScaleContext {
 public:
  ScaleContext(ModelSpec model, KernelScalars kernel, double c, double beta = 0.0,
               double gamma = 0.0, ScaleOptions options = {});
  ScaleContext(ModelSpec model, const KernelSpec& kernel, double c, double beta = 0.0,
               double gamma = 0.0, ScaleOptions options = {});

  const ModelSpec& model() const noexcept { return model_; }
  const KernelScalars& kernel() const noexcept { return kernel_; }
  double c() const noexcept { return c_; }
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }
  const ScaleOptions& options() const noexcept { return options_; }

  ScaleContext with_shifts(double beta, double gamma) const;
  ScaleContext with_base(double c) const;
  ScaleContext with_options(ScaleOptions options) const;

  /// K0 b(x) + (Kp0/K0) x.
  double modified_drift(double x) const;
  /// K0 sigma(x).
  double modified_diffusion(double x) const;
  /// Modified drift plus (Kp0/K0) times beta left of c, gamma from c onwards.
  double shifted_drift(double x) const;
  double shift_at(double x) const noexcept { return x < c_ ? beta_ : gamma_; }

 private:
  ModelSpec model_;
  KernelScalars kernel_;
  double c_;
  double beta_;
  double gamma_;
  ScaleOptions options_;
};

/// log p'_c(x), closed form for built-in families when enabled.
double log_scale_derivative(const ScaleContext& ctx, double x);
/// log p'_c(x) by quadrature of the exponent, whatever the family.
double log_scale_derivative_generic(const ScaleContext& ctx, double x);
double scale_derivative(const ScaleContext& ctx, double x);

/// p_c(x). Returns +-infinity when the integral overflows.
double scale(const ScaleContext& ctx, double x);

/// v_c(x). Returns +infinity when the integral overflows.
double v(const ScaleContext& ctx, double x);

/// int_c^x dz / (p'_c(z) sigma~^2(z)), signed like x - c.
double inner_integral(const ScaleContext& ctx, double x);

/// v'_c(x) = 2 p'_c(x) int_c^x dz / (p'_c sigma~^2).
double v_derivative(const ScaleContext& ctx, double x);

/// 1 + sum_{k=1}^{n_terms} u_{c,k}(x). The k = 1 term is v(ctx, x).
double u_series(const ScaleContext& ctx, double x, int n_terms);

enum class BoundarySide { Left, Right };
enum class LimitTarget { ScaleP, TestV };
enum class LimitKind { Finite, Divergent, Inconclusive };

struct LimitClassification {
  LimitKind kind = LimitKind::Inconclusive;
  double value = 0.0;  // limit estimate when Finite, +inf when Divergent
  bool closed_form = false;
  std::vector<double> points;   // sampled abscissae
  std::vector<double> samples;  // |target| at the sampled abscissae
  std::string reason;
};

LimitClassification boundary_limit(const ScaleContext& ctx, BoundarySide side, LimitTarget target);

/// Classification of an arbitrary nonnegative sequence approaching a limit,
/// with the same thresholds as boundary_limit.
LimitClassification classify_sequence(const std::vector<double>& points,
                                      const std::vector<double>& samples, const LimitOptions& opt,
                                      double tail_tol);

const char* to_string(LimitKind k);
const char* to_string(BoundarySide s);

}  // namespace vfeller
