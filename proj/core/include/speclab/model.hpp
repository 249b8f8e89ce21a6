#pragma once

#include <cstdint>
#include <vector>

namespace speclab {

/// 1-D probability density on a compact support interval.
///
/// Two variants are supported: the piecewise-constant two-bump density on
/// [1,2] (parameter s controls the mass of the middle plateau), and a
/// Gaussian mixture restricted to a declared compact support. The mixture is
/// rejection-resampled into the support, which changes the measure only by
/// the (negligible) tail mass outside it.
class Density {
 public:
  enum class Kind { PiecewiseTwoBump, GaussianMixture };

  static Density piecewise_two_bump(double s);
  static Density gaussian_mixture(std::vector<double> means,
                                  std::vector<double> stds,
                                  std::vector<double> weights, double lo,
                                  double hi);

  double pdf(double x) const;  // throws std::domain_error outside support
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  bool in_support(double x) const { return x >= lo_ && x <= hi_; }

  Kind kind() const { return kind_; }
  double plateau_s() const { return s_; }
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& stds() const { return stds_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  Density() = default;

  Kind kind_ = Kind::PiecewiseTwoBump;
  double lo_ = 1.0, hi_ = 2.0;
  double s_ = 0.0;
  std::vector<double> means_, stds_, weights_;
};

/// Symmetric similarity function bounded away from zero on the support.
/// The bounds l and ||k||_inf are computed at construction for the declared
/// support square, so downstream range checks have concrete numbers.
class KernelSpec {
 public:
  enum class Kind { Gaussian, Product };

  static KernelSpec gaussian(double sigma, double lo, double hi);
  static KernelSpec product(double lo, double hi);

  double operator()(double x, double y) const;
  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double lower_bound() const { return lower_; }
  double upper_bound() const { return upper_; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

 private:
  KernelSpec() = default;

  Kind kind_ = Kind::Product;
  double sigma_ = 1.0;
  double lo_ = 0.0, hi_ = 1.0;
  double lower_ = 0.0, upper_ = 1.0;
};

/// n i.i.d.-style draws together with their seed and generating density.
struct SampleSet {
  std::vector<double> points;
  std::uint64_t seed = 0;
  Density density;

  std::size_t size() const { return points.size(); }
};

SampleSet sample(const Density& d, std::size_t n, std::uint64_t seed);

/// Midpoint-rule discretization of the measure: uniform nodes over the
/// support, weights proportional to the density, normalized to sum 1.
struct QuadratureGrid {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

QuadratureGrid build_grid(const Density& d, std::size_t n_nodes);

}  // namespace speclab
