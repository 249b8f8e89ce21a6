#include "speclab/limit_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace speclab {

DegreeFunction DegreeFunction::analytic_two_bump_product(const KernelSpec& k) {
  if (k.kind() != KernelSpec::Kind::Product)
    throw std::invalid_argument(
        "analytic degree function requires the product kernel");
  DegreeFunction d(k, Kind::AnalyticTwoBumpProduct);
  d.lo_ = 1.0;
  d.hi_ = 2.0;
  return d;
}

DegreeFunction DegreeFunction::quadrature(const KernelSpec& k,
                                          QuadratureGrid grid) {
  if (grid.nodes.empty())
    throw std::invalid_argument("degree function: empty grid");
  DegreeFunction d(k, Kind::Quadrature);
  d.lo_ = k.support_lo();
  d.hi_ = k.support_hi();
  d.grid_ = std::move(grid);
  return d;
}

double DegreeFunction::operator()(double x) const {
  if (kind_ == Kind::AnalyticTwoBumpProduct) {
    if (x < lo_ || x > hi_)
      throw std::domain_error("degree function: x outside support");
    return 1.5 * x;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i)
    acc += kernel_(x, grid_.nodes[i]) * grid_.weights[i];
  return acc;
}

EssentialRange essential_range(const DegreeFunction& d, std::size_t probes) {
  if (probes < 100)
    throw std::invalid_argument("essential_range: need >= 100 probes");
  const double lo = d.support_lo(), hi = d.support_hi();
  EssentialRange r;
  r.lo = r.hi = d(lo);
  for (std::size_t i = 1; i < probes; ++i) {
    const double x =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(probes - 1);
    const double v = d(x);
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
  }
  return r;
}

LimitOperatorDisc build_limit(LimitKind kind, const KernelSpec& k,
                              const QuadratureGrid& grid) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  LimitOperatorDisc op;
  op.kind = kind;
  op.grid = grid;
  op.degree_at_nodes.resize(n);

  Matrix kw(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = k(grid.nodes[i], grid.nodes[j]);
      kw(i, j) = v;
      kw(j, i) = v;
    }
  const Eigen::Map<const Vector> w(grid.weights.data(), n);
  op.degree_at_nodes = kw * w;
  // The quadrature degree can undershoot the analytic lower bound only by
  // discretization error; leave headroom for that.
  if ((op.degree_at_nodes.array() < 0.5 * k.lower_bound()).any())
    throw std::runtime_error("build_limit: degree below kernel lower bound");

  const Vector sqrt_w = w.array().sqrt();
  if (kind == LimitKind::NormalizedT) {
    const Vector dinv_sqrt = op.degree_at_nodes.array().rsqrt();
    const Vector scale = sqrt_w.cwiseProduct(dinv_sqrt);
    op.m = scale.asDiagonal() * kw * scale.asDiagonal();
  } else {
    op.m = -(sqrt_w.asDiagonal() * kw * sqrt_w.asDiagonal());
    op.m.diagonal() += op.degree_at_nodes;
  }
  // Enforce exact symmetry (diagonal scalings can leave last-bit asymmetry).
  op.m = ((op.m + op.m.transpose()) * 0.5).eval();
  return op;
}

EigenSystem limit_eigs(const LimitOperatorDisc& op, int r) {
  const Eigen::Index n = op.m.rows();
  if (r < 1 || r > n) throw std::invalid_argument("limit_eigs: bad count");
  Matrix a;
  if (op.kind == LimitKind::NormalizedT) {
    a = -op.m;  // spectrum of U' = I - T
    a.diagonal().array() += 1.0;
  } else {
    a = op.m;
  }
  EigenSystem sys = eig_sym(a, r);
  // Recover function node values from the sqrt(w)-conjugated coordinates;
  // the result is unit-norm in L2 of the grid measure.
  for (int j = 0; j < r; ++j) {
    for (Eigen::Index i = 0; i < n; ++i)
      sys.vectors(i, j) /= std::sqrt(op.grid.weights[static_cast<std::size_t>(i)]);
    // Deterministic orientation: largest-magnitude node value positive.
    Eigen::Index imax = 0;
    sys.vectors.col(j).cwiseAbs().maxCoeff(&imax);
    if (sys.vectors(imax, j) < 0.0) sys.vectors.col(j) = -sys.vectors.col(j);
  }
  return sys;
}

ExtensionFunction::ExtensionFunction(Kind kind, SampleSet s,
                                     const KernelSpec& k, Vector v,
                                     double lambda)
    : kind_(kind),
      sample_(std::move(s)),
      kernel_(k),
      coeffs_(std::move(v)),
      lambda_(lambda) {
  if (kind_ == Kind::Normalized) {
    const Eigen::Index n = static_cast<Eigen::Index>(sample_.size());
    sqrt_deg_at_sample_.resize(n);
    for (Eigen::Index j = 0; j < n; ++j)
      sqrt_deg_at_sample_(j) = std::sqrt(empirical_degree(sample_.points[j]));
  }
}

double ExtensionFunction::empirical_degree(double x) const {
  double acc = 0.0;
  for (double p : sample_.points) acc += kernel_(x, p);
  return acc / static_cast<double>(sample_.size());
}

double ExtensionFunction::operator()(double x) const {
  const std::size_t n = sample_.size();
  double acc = 0.0;
  if (kind_ == Kind::Normalized) {
    const double sd_x = std::sqrt(empirical_degree(x));
    for (std::size_t j = 0; j < n; ++j)
      acc += kernel_(x, sample_.points[j]) /
             (sd_x * sqrt_deg_at_sample_(static_cast<Eigen::Index>(j))) *
             coeffs_(static_cast<Eigen::Index>(j));
    return acc / static_cast<double>(n) / (1.0 - lambda_);
  }
  for (std::size_t j = 0; j < n; ++j)
    acc += kernel_(x, sample_.points[j]) * coeffs_(static_cast<Eigen::Index>(j));
  return acc / static_cast<double>(n) / (empirical_degree(x) - lambda_);
}

double ExtensionFunction::apply_operator(double x) const {
  const std::size_t n = sample_.size();
  const double fx = (*this)(x);
  if (kind_ == Kind::Normalized) {
    // U'_n f(x) = f(x) - (1/n) sum_j h_n(x, X_j) f(X_j)
    const double sd_x = std::sqrt(empirical_degree(x));
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      acc += kernel_(x, sample_.points[j]) /
             (sd_x * sqrt_deg_at_sample_(static_cast<Eigen::Index>(j))) *
             coeffs_(static_cast<Eigen::Index>(j));
    return fx - acc / static_cast<double>(n);
  }
  // U_n f(x) = d_n(x) f(x) - (1/n) sum_j k(x, X_j) f(X_j)
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    acc += kernel_(x, sample_.points[j]) * coeffs_(static_cast<Eigen::Index>(j));
  return empirical_degree(x) * fx - acc / static_cast<double>(n);
}

ExtensionFunction extend_normalized(const SampleSet& s, const KernelSpec& k,
                                    const Vector& v, double lambda) {
  if (v.size() != static_cast<Eigen::Index>(s.size()))
    throw std::invalid_argument("extend_normalized: coefficient length mismatch");
  if (std::abs(1.0 - lambda) < 1e-6)
    throw std::domain_error(
        "extend_normalized: lambda inside the essential spectrum {1}");
  return ExtensionFunction(ExtensionFunction::Kind::Normalized, s, k, v,
                           lambda);
}

ExtensionFunction extend_unnormalized(const SampleSet& s, const KernelSpec& k,
                                      const Vector& v, double lambda) {
  if (v.size() != static_cast<Eigen::Index>(s.size()))
    throw std::invalid_argument(
        "extend_unnormalized: coefficient length mismatch");
  ExtensionFunction f(ExtensionFunction::Kind::Unnormalized, s, k, v, lambda);
  // Probe-estimated range of d_n; lambda must clear it by the fixed margin.
  constexpr std::size_t kProbes = 512;
  constexpr double kMargin = 1e-6;
  const double lo = s.density.support_lo(), hi = s.density.support_hi();
  double dmin = f.empirical_degree(lo), dmax = dmin;
  for (std::size_t i = 1; i < kProbes; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(kProbes - 1);
    const double d = f.empirical_degree(x);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (lambda > dmin - kMargin && lambda < dmax + kMargin) {
    std::ostringstream msg;
    msg << "extend_unnormalized: lambda = " << lambda
        << " inside the essential-spectrum estimate [" << dmin << ", " << dmax
        << "]";
    throw std::domain_error(msg.str());
  }
  return f;
}

namespace {

// Exact integral of y^2 / (1.5 y - lambda) over [a, b], via the partial
// fractions y^2/(cy - l) = y/c + l/c^2 + (l^2/c^2) / (cy - l) with c = 1.5.
// Requires cy - lambda to keep one sign on [a, b].
double eigencondition_piece(double a, double b, double lambda) {
  constexpr double c = 1.5;
  const double linear = (b * b - a * a) / (2.0 * c) +
                        lambda * (b - a) / (c * c);
  if (lambda == 0.0) return linear;
  const double log_term = std::log(std::abs((c * b - lambda) /
                                            (c * a - lambda)));
  return linear + lambda * lambda / (c * c * c) * log_term;
}

}  // namespace

double two_bump_eigencondition(double lambda, double s) {
  if (!(s > 0.0 && s < 3.0))
    throw std::invalid_argument("eigencondition: s must be in (0, 3)");
  if (lambda >= 1.5 && lambda <= 3.0)
    throw std::domain_error(
        "eigencondition: lambda inside the continuous spectrum [1.5, 3]");
  const double p_outer = (3.0 - s) / 2.0;
  double g = 0.0;
  g += p_outer * eigencondition_piece(1.0, 4.0 / 3.0, lambda);
  g += s * eigencondition_piece(4.0 / 3.0, 5.0 / 3.0, lambda);
  g += p_outer * eigencondition_piece(5.0 / 3.0, 2.0, lambda);
  return g;
}

std::vector<double> two_bump_point_spectrum(double s) {
  if (!(s > 0.0 && s < 3.0))
    throw std::invalid_argument("point spectrum: s must be in (0, 3)");
  constexpr double kScanStep = 1e-2;
  constexpr double kEdge = 1e-6;
  std::vector<double> roots;

  const auto scan = [&](double lo, double hi) {
    double xa = lo;
    double ga = two_bump_eigencondition(xa, s) - 1.0;
    while (xa < hi) {
      const double xb = std::min(xa + kScanStep, hi);
      const double gb = two_bump_eigencondition(xb, s) - 1.0;
      if (ga == 0.0) {
        roots.push_back(xa);
      } else if (ga * gb < 0.0) {
        double a = xa, b = xb, fa = ga;
        for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
          const double mid = 0.5 * (a + b);
          const double fmid = two_bump_eigencondition(mid, s) - 1.0;
          if (fa * fmid <= 0.0) {
            b = mid;
          } else {
            a = mid;
            fa = fmid;
          }
        }
        roots.push_back(0.5 * (a + b));
      }
      xa = xb;
      ga = gb;
    }
  };

  scan(-100.0, 1.5 - kEdge);
  scan(3.0 + kEdge, 100.0);
  std::sort(roots.begin(), roots.end());
  return roots;
}

double interpolate_on_grid(const QuadratureGrid& grid, const Vector& values,
                           double x) {
  const std::size_t n = grid.size();
  if (values.size() != static_cast<Eigen::Index>(n))
    throw std::invalid_argument("interpolate_on_grid: length mismatch");
  if (x <= grid.nodes.front()) return values(0);
  if (x >= grid.nodes.back()) return values(static_cast<Eigen::Index>(n - 1));
  const auto it = std::upper_bound(grid.nodes.begin(), grid.nodes.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - grid.nodes.begin());
  const std::size_t lo = hi - 1;
  const double t =
      (x - grid.nodes[lo]) / (grid.nodes[hi] - grid.nodes[lo]);
  return (1.0 - t) * values(static_cast<Eigen::Index>(lo)) +
         t * values(static_cast<Eigen::Index>(hi));
}

}  // namespace speclab
