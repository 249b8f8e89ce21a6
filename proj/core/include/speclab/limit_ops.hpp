#pragma once

#include <vector>

#include "speclab/model.hpp"
#include "speclab/spectral.hpp"

namespace speclab {

/// Population degree function d(x) = integral of k(x, .) against the measure.
/// Either evaluated by quadrature on a grid, or the closed form 1.5*x that
/// the product kernel admits on the two-bump density.
class DegreeFunction {
 public:
  enum class Kind { AnalyticTwoBumpProduct, Quadrature };

  static DegreeFunction analytic_two_bump_product(const KernelSpec& k);
  static DegreeFunction quadrature(const KernelSpec& k, QuadratureGrid grid);

  double operator()(double x) const;
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  Kind kind() const { return kind_; }

 private:
  DegreeFunction(const KernelSpec& k, Kind kind) : kernel_(k), kind_(kind) {}

  KernelSpec kernel_;
  Kind kind_;
  QuadratureGrid grid_;
  double lo_ = 0.0, hi_ = 1.0;
};

/// Grid-resolved range of the degree function; the essential spectrum of the
/// unnormalized limit operator.
struct EssentialRange {
  double lo = 0.0;
  double hi = 0.0;
};

EssentialRange essential_range(const DegreeFunction& d, std::size_t probes);

enum class LimitKind { NormalizedT, UnnormalizedU };

/// Quadrature discretization of a limit operator, conjugated by sqrt(w) to a
/// symmetric matrix. The conjugation preserves eigenvalues exactly; function
/// node values are recovered by dividing eigenvector entries by sqrt(w_i).
struct LimitOperatorDisc {
  LimitKind kind;
  QuadratureGrid grid;
  Matrix m;
  Vector degree_at_nodes;
};

LimitOperatorDisc build_limit(LimitKind kind, const KernelSpec& k,
                              const QuadratureGrid& grid);

/// r smallest eigenpairs of the discretized limit operator, ascending. For
/// NormalizedT the reported values are 1 - mu (mu the largest eigenvalues of
/// the integral operator). Eigenvector columns hold function node values,
/// normalized to unit L2 norm against the grid weights.
EigenSystem limit_eigs(const LimitOperatorDisc& op, int r);

/// Nystrom-style eigenfunction extension from a sample eigenvector: a
/// function on the whole support whose restriction to the sample reproduces
/// the eigenvector and which satisfies the eigen equation of the empirical
/// operator everywhere.
class ExtensionFunction {
 public:
  enum class Kind { Normalized, Unnormalized };

  double operator()(double x) const;
  double eigenvalue() const { return lambda_; }
  Kind kind() const { return kind_; }

  /// Empirical degree d_n(x) = (1/n) sum_j k(x, X_j).
  double empirical_degree(double x) const;

  /// Value of the empirical operator applied to this function at x, i.e.
  /// U'_n f(x) (normalized) or U_n f(x) (unnormalized).
  double apply_operator(double x) const;

 private:
  friend ExtensionFunction extend_normalized(const SampleSet&,
                                             const KernelSpec&, const Vector&,
                                             double);
  friend ExtensionFunction extend_unnormalized(const SampleSet&,
                                               const KernelSpec&,
                                               const Vector&, double);
  ExtensionFunction(Kind kind, SampleSet s, const KernelSpec& k, Vector v,
                    double lambda);

  Kind kind_;
  SampleSet sample_;
  KernelSpec kernel_;
  Vector coeffs_;
  double lambda_;
  Vector sqrt_deg_at_sample_;  // sqrt(d_n(X_j)), normalized case only
};

/// Extension for the normalized operator; v must be an eigenvector of the
/// symmetric normalized Laplacian with eigenvalue lambda != 1.
ExtensionFunction extend_normalized(const SampleSet& s, const KernelSpec& k,
                                    const Vector& v, double lambda);

/// Extension for the unnormalized operator; lambda must lie outside the
/// (probe-estimated) range of the empirical degree function by margin 1e-6.
ExtensionFunction extend_unnormalized(const SampleSet& s, const KernelSpec& k,
                                      const Vector& v, double lambda);

/// g(lambda) = integral of y^2 / (1.5 y - lambda) p(y) dy for the two-bump
/// density with plateau s; lambda is an eigenvalue of the unnormalized limit
/// operator outside [1.5, 3] iff g(lambda) = 1.
double two_bump_eigencondition(double lambda, double s);

/// All solutions of g(lambda) = 1 outside the essential spectrum [1.5, 3],
/// via bracket scan plus bisection. Always {0} for valid s.
std::vector<double> two_bump_point_spectrum(double s);

/// Piecewise-linear interpolation of grid node values, clamped at the ends.
double interpolate_on_grid(const QuadratureGrid& grid, const Vector& values,
                           double x);

}  // namespace speclab
