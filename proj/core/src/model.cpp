#include "speclab/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "speclab/rng.hpp"

namespace speclab {

Density Density::piecewise_two_bump(double s) {
  if (!(s > 0.0 && s < 3.0))
    throw std::invalid_argument("piecewise density: s must be in (0, 3)");
  Density d;
  d.kind_ = Kind::PiecewiseTwoBump;
  d.lo_ = 1.0;
  d.hi_ = 2.0;
  d.s_ = s;
  return d;
}

Density Density::gaussian_mixture(std::vector<double> means,
                                  std::vector<double> stds,
                                  std::vector<double> weights, double lo,
                                  double hi) {
  if (means.empty() || means.size() != stds.size() ||
      means.size() != weights.size())
    throw std::invalid_argument("gaussian mixture: component size mismatch");
  if (!(lo < hi)) throw std::invalid_argument("gaussian mixture: empty support");
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("gaussian mixture: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("gaussian mixture: weights must sum to 1");
  for (double sd : stds)
    if (!(sd > 0.0))
      throw std::invalid_argument("gaussian mixture: stds must be positive");
  Density d;
  d.kind_ = Kind::GaussianMixture;
  d.lo_ = lo;
  d.hi_ = hi;
  d.means_ = std::move(means);
  d.stds_ = std::move(stds);
  d.weights_ = std::move(weights);
  return d;
}

double Density::pdf(double x) const {
  if (!in_support(x))
    throw std::domain_error("pdf: x = " + std::to_string(x) +
                            " outside support");
  if (kind_ == Kind::PiecewiseTwoBump) {
    if (x >= 4.0 / 3.0 && x < 5.0 / 3.0) return s_;
    return (3.0 - s_) / 2.0;
  }
  constexpr double inv_sqrt_2pi = 0.3989422804014327;
  double p = 0.0;
  for (std::size_t c = 0; c < means_.size(); ++c) {
    const double z = (x - means_[c]) / stds_[c];
    p += weights_[c] * inv_sqrt_2pi / stds_[c] * std::exp(-0.5 * z * z);
  }
  return p;
}

KernelSpec KernelSpec::gaussian(double sigma, double lo, double hi) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian kernel: sigma <= 0");
  KernelSpec k;
  k.kind_ = Kind::Gaussian;
  k.sigma_ = sigma;
  k.lo_ = lo;
  k.hi_ = hi;
  const double diam = hi - lo;
  k.lower_ = std::exp(-diam * diam / (sigma * sigma));
  k.upper_ = 1.0;
  return k;
}

KernelSpec KernelSpec::product(double lo, double hi) {
  if (!(lo > 0.0))
    throw std::invalid_argument(
        "product kernel: support must stay positive to keep k bounded away "
        "from 0");
  KernelSpec k;
  k.kind_ = Kind::Product;
  k.lo_ = lo;
  k.hi_ = hi;
  k.lower_ = lo * lo;
  k.upper_ = hi * hi;
  return k;
}

double KernelSpec::operator()(double x, double y) const {
  if (x < lo_ || x > hi_ || y < lo_ || y > hi_)
    throw std::domain_error("kernel: argument outside support");
  if (kind_ == Kind::Gaussian) {
    const double t = (x - y) / sigma_;
    return std::exp(-t * t);
  }
  return x * y;
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // Box-Muller; u1 shifted away from 0.
  double u1 = uniform();
  if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

namespace {

// Inverse CDF for the piecewise-constant density: three intervals with
// masses (3-s)/6, s/3, (3-s)/6 on [1,4/3), [4/3,5/3), [5/3,2].
double two_bump_invcdf(double u, double s) {
  const double m_outer = (3.0 - s) / 6.0;
  const double m_mid = s / 3.0;
  const double p_outer = (3.0 - s) / 2.0;
  if (u < m_outer) return 1.0 + u / p_outer;
  if (u < m_outer + m_mid) return 4.0 / 3.0 + (u - m_outer) / s;
  return 5.0 / 3.0 + (u - m_outer - m_mid) / p_outer;
}

}  // namespace

SampleSet sample(const Density& d, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample: n must be >= 2");
  SampleSet out{{}, seed, d};
  out.points.reserve(n);
  Rng rng(seed);
  if (d.kind() == Density::Kind::PiecewiseTwoBump) {
    for (std::size_t i = 0; i < n; ++i)
      out.points.push_back(two_bump_invcdf(rng.uniform(), d.plateau_s()));
    return out;
  }
  const auto& weights = d.weights();
  while (out.points.size() < n) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t c = weights.size() - 1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) {
        c = i;
        break;
      }
    }
    const double x = d.means()[c] + d.stds()[c] * rng.normal();
    if (d.in_support(x)) out.points.push_back(x);  // redraw otherwise
  }
  return out;
}

QuadratureGrid build_grid(const Density& d, std::size_t n_nodes) {
  if (n_nodes < 16) throw std::invalid_argument("build_grid: N must be >= 16");
  QuadratureGrid g;
  g.nodes.resize(n_nodes);
  g.weights.resize(n_nodes);
  const double lo = d.support_lo(), hi = d.support_hi();
  const double step = (hi - lo) / static_cast<double>(n_nodes);
  double wsum = 0.0;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    g.nodes[i] = lo + (static_cast<double>(i) + 0.5) * step;
    g.weights[i] = d.pdf(g.nodes[i]);
    wsum += g.weights[i];
  }
  for (double& w : g.weights) w /= wsum;
  return g;
}

}  // namespace speclab
