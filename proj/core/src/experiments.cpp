#include "speclab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <stdexcept>
#include <thread>

#include "speclab/rng.hpp"

namespace speclab {

Scenario scenario_two_bump(double s, LaplacianKind kind) {
  return Scenario{"twobump", Density::piecewise_two_bump(s),
                  KernelSpec::product(1.0, 2.0), kind};
}

Scenario scenario_mixture(double sigma, LaplacianKind kind) {
  return Scenario{
      "mixture",
      Density::gaussian_mixture({2.0, 4.0, 6.0, 8.0}, {0.25, 0.25, 0.25, 0.25},
                                {0.25, 0.25, 0.25, 0.25}, 0.0, 10.0),
      KernelSpec::gaussian(sigma, 0.0, 10.0), kind};
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

// Precomputed population quantities for the function-class supremum of the
// rate study: probes, degree and normalized-similarity values against the
// quadrature grid, and the population second eigenfunction at the nodes.
struct ClassSupContext {
  std::vector<double> probes;
  Vector deg_pop;   // d at probes
  Matrix h_probe;   // h(probe_a, node_i)
  Vector uh_pop;    // P(u * h(probe_a, .))
  Matrix hh_pop;    // P(h(probe_a, .) h(probe_b, .))
};

ClassSupContext make_class_sup_context(const Scenario& sc,
                                       const LimitOperatorDisc& op,
                                       const Vector& u_nodes,
                                       std::size_t probes) {
  ClassSupContext ctx;
  const double lo = sc.density.support_lo(), hi = sc.density.support_hi();
  const Eigen::Index p = static_cast<Eigen::Index>(probes);
  const Eigen::Index m = static_cast<Eigen::Index>(op.grid.size());
  ctx.probes.resize(probes);
  for (Eigen::Index a = 0; a < p; ++a)
    ctx.probes[static_cast<std::size_t>(a)] =
        lo + (hi - lo) * static_cast<double>(a) / static_cast<double>(p - 1);

  const Eigen::Map<const Vector> w(op.grid.weights.data(), m);
  Matrix k_probe(p, m);
  for (Eigen::Index a = 0; a < p; ++a)
    for (Eigen::Index i = 0; i < m; ++i)
      k_probe(a, i) =
          sc.kernel(ctx.probes[static_cast<std::size_t>(a)], op.grid.nodes[i]);
  ctx.deg_pop = k_probe * w;

  const Vector node_scale = op.degree_at_nodes.array().rsqrt();
  ctx.h_probe = ctx.deg_pop.array().rsqrt().matrix().asDiagonal() * k_probe *
                node_scale.asDiagonal();
  ctx.uh_pop = ctx.h_probe * w.cwiseProduct(u_nodes);
  ctx.hh_pop = ctx.h_probe * w.asDiagonal() * ctx.h_probe.transpose();
  return ctx;
}

// sup over K u (u.H) u (H.H) of |P_n f - P f| for one sample.
double class_sup_deviation(const Scenario& sc, const ClassSupContext& ctx,
                           const LimitOperatorDisc& op, const Vector& u_nodes,
                           const SampleSet& s) {
  const Eigen::Index p = static_cast<Eigen::Index>(ctx.probes.size());
  const Eigen::Index n = static_cast<Eigen::Index>(s.size());
  const double inv_n = 1.0 / static_cast<double>(n);

  Matrix k_ps(p, n);
  for (Eigen::Index a = 0; a < p; ++a)
    for (Eigen::Index j = 0; j < n; ++j)
      k_ps(a, j) = sc.kernel(ctx.probes[static_cast<std::size_t>(a)],
                             s.points[static_cast<std::size_t>(j)]);

  // Class K: empirical vs population degree on the probes.
  const Vector deg_emp = k_ps.rowwise().sum() * inv_n;
  double sup = (deg_emp - ctx.deg_pop).cwiseAbs().maxCoeff();

  // Population d and u at the sample points (population h, empirical P_n).
  Vector deg_at_sample(n), u_at_sample(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < op.grid.size(); ++i)
      acc += sc.kernel(s.points[static_cast<std::size_t>(j)],
                       op.grid.nodes[i]) *
             op.grid.weights[i];
    deg_at_sample(j) = acc;
    u_at_sample(j) =
        interpolate_on_grid(op.grid, u_nodes, s.points[static_cast<std::size_t>(j)]);
  }
  const Matrix h_ps = ctx.deg_pop.array().rsqrt().matrix().asDiagonal() * k_ps *
                      deg_at_sample.array().rsqrt().matrix().asDiagonal();

  const Vector uh_emp = h_ps * u_at_sample * inv_n;
  sup = std::max(sup, (uh_emp - ctx.uh_pop).cwiseAbs().maxCoeff());

  const Matrix hh_emp = h_ps * h_ps.transpose() * inv_n;
  sup = std::max(sup, (hh_emp - ctx.hh_pop).cwiseAbs().maxCoeff());
  return sup;
}

LimitKind limit_kind_for(LaplacianKind kind) {
  return kind == LaplacianKind::UnnormScaled ? LimitKind::UnnormalizedU
                                             : LimitKind::NormalizedT;
}

// Runs body(task) for task in [0, count) on up to `workers` threads. Each
// task writes only its own output slot, so the merged result is identical
// for any worker count.
template <typename Body>
void for_each_task(std::size_t count, int workers, const Body& body) {
  workers = std::max(1, workers);
  if (workers == 1 || count < 2) {
    for (std::size_t t = 0; t < count; ++t) body(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto run = [&] {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= count || failed.load()) return;
      try {
        body(t);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), count));
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

ConvergenceSeries run_convergence(const Scenario& scenario,
                                  const std::vector<std::size_t>& n_list,
                                  int reps, std::uint64_t seed,
                                  const ConvergenceOptions& opts) {
  if (n_list.size() < 4)
    throw std::invalid_argument("run_convergence: need >= 4 sample sizes");
  if (!std::is_sorted(n_list.begin(), n_list.end()))
    throw std::invalid_argument("run_convergence: n_list must be ascending");
  if (reps < 1) throw std::invalid_argument("run_convergence: reps must be >= 1");

  const QuadratureGrid grid = build_grid(scenario.density, opts.grid_nodes);
  const LimitOperatorDisc op =
      build_limit(limit_kind_for(scenario.laplacian), scenario.kernel, grid);
  const EigenSystem limit_sys = limit_eigs(op, 3);
  if (limit_sys.degenerate[1])
    throw std::domain_error(
        "run_convergence: limit second eigenvalue is degenerate");
  const double lambda2_limit = limit_sys.values(1);
  const Vector u_nodes = limit_sys.vectors.col(1);

  ClassSupContext ctx;
  const bool with_class =
      opts.with_class_sup && scenario.laplacian != LaplacianKind::UnnormScaled;
  if (with_class)
    ctx = make_class_sup_context(scenario, op, u_nodes, opts.class_probes);

  ConvergenceSeries series;
  series.scenario_id = scenario.id;
  series.seed = seed;
  const std::size_t tasks = n_list.size() * static_cast<std::size_t>(reps);
  series.records.resize(tasks);
  for_each_task(tasks, opts.workers, [&](std::size_t t) {
    const std::size_t ni = t / static_cast<std::size_t>(reps);
    const int rep = static_cast<int>(t % static_cast<std::size_t>(reps));
    const std::size_t n = n_list[ni];
    const std::uint64_t rep_seed =
        mix_seed(seed, ni, static_cast<std::uint64_t>(rep));
    const SampleSet s = sample(scenario.density, n, rep_seed);
    const Matrix sim = build_similarity(s, scenario.kernel);
    const LaplacianMatrix lap = build_laplacian(sim, scenario.laplacian);
    const EigenSystem es = eig_sym(lap.m, 2);

    ConvergenceRecord rec;
    rec.n = n;
    rec.rep = rep;
    rec.lambda2_sample = es.values(1);
    rec.lambda2_limit = lambda2_limit;
    rec.ipr2 = ipr(es.vectors.col(1));

    const CriticalRegion region = estimate_critical_region(lap.degrees, n, 0.0);
    rec.inconsistent_regime = scenario.laplacian == LaplacianKind::UnnormScaled &&
                              region.contains(rec.lambda2_sample);

    Vector ref(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      ref(static_cast<Eigen::Index>(i)) =
          interpolate_on_grid(grid, u_nodes, s.points[i]);
    const Vector scaled = std::sqrt(static_cast<double>(n)) * es.vectors.col(1);
    const auto [a, aligned] = align_sign(scaled.normalized(), ref.normalized());
    rec.sign = a;
    rec.vec_sup_err = (a * scaled - ref).cwiseAbs().maxCoeff();

    if (with_class)
      rec.class_sup_dev = class_sup_deviation(scenario, ctx, op, u_nodes, s);
    series.records[t] = rec;
  });
  return series;
}

ConvergenceSeries empirical_sup_deviation(const Scenario& scenario,
                                          const std::vector<std::size_t>& n_list,
                                          int reps, std::uint64_t seed,
                                          std::size_t grid_nodes,
                                          std::size_t probes, int workers) {
  if (n_list.size() < 4)
    throw std::invalid_argument("empirical_sup_deviation: need >= 4 sizes");
  if (!std::is_sorted(n_list.begin(), n_list.end()))
    throw std::invalid_argument("empirical_sup_deviation: n_list not ascending");

  const bool analytic = scenario.density.kind() == Density::Kind::PiecewiseTwoBump &&
                        scenario.kernel.kind() == KernelSpec::Kind::Product;
  const DegreeFunction deg_oracle =
      analytic ? DegreeFunction::analytic_two_bump_product(scenario.kernel)
               : DegreeFunction::quadrature(
                     scenario.kernel, build_grid(scenario.density, grid_nodes));

  const double lo = scenario.density.support_lo();
  const double hi = scenario.density.support_hi();
  std::vector<double> xs(probes);
  Vector d_pop(static_cast<Eigen::Index>(probes));
  for (std::size_t i = 0; i < probes; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) /
                     static_cast<double>(probes - 1);
    d_pop(static_cast<Eigen::Index>(i)) = deg_oracle(xs[i]);
  }

  ConvergenceSeries series;
  series.scenario_id = scenario.id;
  series.seed = seed;
  const std::size_t tasks = n_list.size() * static_cast<std::size_t>(reps);
  series.records.resize(tasks);
  for_each_task(tasks, workers, [&](std::size_t t) {
    const std::size_t ni = t / static_cast<std::size_t>(reps);
    const int rep = static_cast<int>(t % static_cast<std::size_t>(reps));
    const std::size_t n = n_list[ni];
    const std::uint64_t rep_seed =
        mix_seed(seed, ni, static_cast<std::uint64_t>(rep));
    const SampleSet s = sample(scenario.density, n, rep_seed);
    double sup = 0.0;
    for (std::size_t i = 0; i < probes; ++i) {
      double acc = 0.0;
      for (double p : s.points) acc += scenario.kernel(xs[i], p);
      sup = std::max(sup, std::abs(acc / static_cast<double>(n) -
                                   d_pop(static_cast<Eigen::Index>(i))));
    }
    ConvergenceRecord rec;
    rec.n = n;
    rec.rep = rep;
    rec.vec_sup_err = sup;
    series.records[t] = rec;
  });
  return series;
}

RateFit fit_rate(const ConvergenceSeries& series, SeriesField field) {
  std::map<std::size_t, std::vector<double>> by_n;
  for (const auto& rec : series.records) {
    double v = 0.0;
    switch (field) {
      case SeriesField::Lambda2Error:
        v = std::abs(rec.lambda2_sample - rec.lambda2_limit);
        break;
      case SeriesField::VecSupError:
        v = rec.vec_sup_err;
        break;
      case SeriesField::ClassSupDev:
        v = rec.class_sup_dev;
        break;
    }
    by_n[rec.n].push_back(v);
  }

  std::vector<double> log_n, log_err;
  for (auto& [n, errs] : by_n) {
    const double med = median(errs);
    if (med <= 0.0) continue;  // zero errors carry no slope information
    log_n.push_back(std::log(static_cast<double>(n)));
    log_err.push_back(std::log(med));
  }
  const int m = static_cast<int>(log_n.size());
  if (m < 4)
    throw std::invalid_argument(
        "fit_rate: need >= 4 sample sizes with positive median error");

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < m; ++i) {
    sx += log_n[i];
    sy += log_err[i];
    sxx += log_n[i] * log_n[i];
    sxy += log_n[i] * log_err[i];
    syy += log_err[i] * log_err[i];
  }
  const double denom = m * sxx - sx * sx;
  RateFit fit;
  fit.points_used = m;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  const double ss_tot = syy - sy * sy / m;
  double ss_res = 0.0;
  for (int i = 0; i < m; ++i) {
    const double e = log_err[i] - (fit.intercept + fit.slope * log_n[i]);
    ss_res += e * e;
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

FigureData run_figures(std::uint64_t seed, double margin) {
  const std::vector<double> sigmas = {1.0, 2.0, 5.0, 50.0};
  FigureData data;
  data.seed = seed;
  data.n = 200;

  for (std::size_t si = 0; si < sigmas.size(); ++si) {
    const double sigma = sigmas[si];
    const Scenario sc = scenario_mixture(sigma, LaplacianKind::UnnormScaled);
    const SampleSet s = sample(sc.density, data.n, mix_seed(seed, si, 0));
    const Matrix sim = build_similarity(s, sc.kernel);

    for (const LaplacianKind kind :
         {LaplacianKind::UnnormScaled, LaplacianKind::RwNorm}) {
      // Random-walk spectra come from the symmetric form.
      const LaplacianKind solve_kind = kind == LaplacianKind::RwNorm
                                           ? LaplacianKind::SymNorm
                                           : LaplacianKind::UnnormScaled;
      const LaplacianMatrix lap = build_laplacian(sim, solve_kind);
      EigenSystem es = eig_sym(lap.m, 10);
      if (kind == LaplacianKind::RwNorm)
        for (int j = 0; j < es.count(); ++j)
          es.vectors.col(j) = rw_from_sym(es.vectors.col(j), lap.degrees);

      FigureEntry entry;
      entry.sigma = sigma;
      entry.kind = kind;
      entry.points = s.points;
      entry.eigenvalues = es.values;
      entry.eigenvectors = es.vectors.leftCols(5);
      entry.region = estimate_critical_region(lap.degrees, data.n, margin);
      entry.min_degree_over_n = entry.region.lo;
      entry.report = classify_eigenvalues(es, entry.region);
      data.entries.push_back(std::move(entry));
    }
  }
  return data;
}

}  // namespace speclab
