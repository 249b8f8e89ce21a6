// Acceptance gate: each criterion is exercised by `speclab_acceptance cN`
// (cN in c1..c8) and reports exactly one PASS/FAIL line. c8 additionally
// needs the path to the speclab executable as the second argument.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <speclab/experiments.hpp>
#include <speclab/limit_ops.hpp>
#include <speclab/rng.hpp>
#include <sstream>
#include <string>
#include <vector>

using namespace speclab;
namespace fs = std::filesystem;

namespace {

struct Checker {
  bool ok = true;
  std::string first_failure;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      first_failure = what;
    }
  }
};

std::vector<double> per_n_median(const ConvergenceSeries& series,
                                 std::size_t n,
                                 double ConvergenceRecord::*field) {
  std::vector<double> vals;
  for (const auto& rec : series.records)
    if (rec.n == n) vals.push_back(rec.*field);
  return vals;
}

int workers_from_env() {
  if (const char* env = std::getenv("SPECLAB_THREADS"))
    return std::max(1, std::atoi(env));
  return 1;
}

// --- C1: analytic two-bump suite ------------------------------------------

void c1(Checker& c) {
  for (double s : {0.3, 1.0, 2.5}) {
    const std::vector<double> roots = two_bump_point_spectrum(s);
    c.expect(roots.size() == 1, "root count != 1");
    if (!roots.empty())
      c.expect(std::abs(roots[0]) <= 1e-9, "root not at 0");
  }
  const KernelSpec k = KernelSpec::product(1.0, 2.0);
  const DegreeFunction analytic = DegreeFunction::analytic_two_bump_product(k);
  const QuadratureGrid grid =
      build_grid(Density::piecewise_two_bump(0.3), 4000);
  const DegreeFunction quad = DegreeFunction::quadrature(k, grid);
  for (int i = 0; i < 100; ++i) {
    const double x = 1.0 + i / 99.0;
    c.expect(std::abs(analytic(x) - 1.5 * x) <= 1e-12, "analytic degree");
    c.expect(std::abs(quad(x) - 1.5 * x) <= 1e-3, "quadrature degree");
  }
  const EssentialRange r = essential_range(analytic, 2000);
  c.expect(std::abs(r.lo - 1.5) <= 1e-9 && std::abs(r.hi - 3.0) <= 1e-9,
           "essential range");
}

// --- C2: commutation of empirical operators with the sample ---------------

void c2(Checker& c) {
  const Density density = Density::piecewise_two_bump(0.3);
  const KernelSpec k = KernelSpec::product(1.0, 2.0);
  Rng rng(424242);
  for (std::size_t n : {50u, 200u}) {
    const SampleSet s = sample(density, n, 1000 + n);
    const Matrix sim = build_similarity(s, k);
    const LaplacianMatrix un = build_laplacian(sim, LaplacianKind::UnnormScaled);
    const LaplacianMatrix sym = build_laplacian(sim, LaplacianKind::SymNorm);
    const Vector deg = un.degrees;
    for (int poly = 0; poly < 20; ++poly) {
      double coef[6];
      for (double& a : coef) a = 2.0 * rng.uniform() - 1.0;
      const auto f = [&](double x) {
        double acc = 0.0;
        for (int p = 5; p >= 0; --p) acc = acc * x + coef[p];
        return acc;
      };
      Vector fv(static_cast<Eigen::Index>(n));
      double f_inf = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        fv(static_cast<Eigen::Index>(i)) = f(s.points[i]);
        f_inf = std::max(f_inf, std::abs(fv(static_cast<Eigen::Index>(i))));
      }
      const double tol = 1e-9 * static_cast<double>(n) * 4.0 * f_inf;

      // Unnormalized: U_n f at the sample equals (L_n/n) rho_n f.
      Vector lhs(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Index ii = static_cast<Eigen::Index>(i);
        const double dn = deg(ii) / static_cast<double>(n);
        lhs(ii) = dn * fv(ii) - sim.row(ii).dot(fv) / static_cast<double>(n);
      }
      c.expect((lhs - un.m * fv).cwiseAbs().maxCoeff() <= tol,
               "unnormalized commutation");

      // Normalized: U'_n f via h_n sums equals L'_n rho_n f.
      Vector nl(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Index ii = static_cast<Eigen::Index>(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const Eigen::Index jj = static_cast<Eigen::Index>(j);
          acc += sim(ii, jj) / std::sqrt(deg(ii) * deg(jj)) * fv(jj);
        }
        nl(ii) = fv(ii) - acc;
      }
      c.expect((nl - sym.m * fv).cwiseAbs().maxCoeff() <= tol,
               "normalized commutation");
    }
  }
}

// --- C3: eigenfunction extension round trips -------------------------------

void c3(Checker& c) {
  int tested = 0;

  // Normalized extensions on the sigma=1 mixture scenario.
  {
    const Scenario sc = scenario_mixture(1.0, LaplacianKind::SymNorm);
    const SampleSet s = sample(sc.density, 200, 8);
    const Matrix sim = build_similarity(s, sc.kernel);
    const LaplacianMatrix lap = build_laplacian(sim, LaplacianKind::SymNorm);
    const EigenSystem es = eig_sym(lap.m, 4);
    for (int j = 0; j < 4; ++j) {
      if (es.degenerate[static_cast<std::size_t>(j)]) continue;
      if (std::abs(1.0 - es.values(j)) < 1e-6) continue;
      const ExtensionFunction f =
          extend_normalized(s, sc.kernel, es.vectors.col(j), es.values(j));
      double round = 0.0, resid = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i)
        round = std::max(round,
                         std::abs(f(s.points[i]) -
                                  es.vectors(static_cast<Eigen::Index>(i), j)));
      for (int p = 0; p < 200; ++p) {
        const double x = 10.0 * p / 199.0;
        resid = std::max(resid,
                         std::abs(f.apply_operator(x) - es.values(j) * f(x)));
      }
      c.expect(round <= 1e-8, "normalized round trip");
      c.expect(resid <= 1e-7, "normalized residual");
      ++tested;
    }
  }

  // Unnormalized extensions on the two-bump product scenario; eigenvalues
  // inside the empirical degree range are inadmissible by construction.
  {
    const Scenario sc = scenario_two_bump(0.3, LaplacianKind::UnnormScaled);
    const SampleSet s = sample(sc.density, 200, 9);
    const Matrix sim = build_similarity(s, sc.kernel);
    const LaplacianMatrix lap =
        build_laplacian(sim, LaplacianKind::UnnormScaled);
    const EigenSystem es = eig_sym(lap.m, 4);
    for (int j = 0; j < 4; ++j) {
      if (es.degenerate[static_cast<std::size_t>(j)]) continue;
      ExtensionFunction const* fp = nullptr;
      try {
        static std::vector<ExtensionFunction> keep;
        keep.push_back(extend_unnormalized(s, sc.kernel, es.vectors.col(j),
                                           es.values(j)));
        fp = &keep.back();
      } catch (const std::domain_error&) {
        continue;  // inadmissible: eigenvalue inside rg(d_n)
      }
      double round = 0.0, resid = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i)
        round = std::max(round,
                         std::abs((*fp)(s.points[i]) -
                                  es.vectors(static_cast<Eigen::Index>(i), j)));
      for (int p = 0; p < 200; ++p) {
        const double x = 1.0 + p / 199.0;
        resid = std::max(
            resid, std::abs(fp->apply_operator(x) - es.values(j) * (*fp)(x)));
      }
      c.expect(round <= 1e-8, "unnormalized round trip");
      c.expect(resid <= 1e-7, "unnormalized residual");
      ++tested;
    }
  }
  c.expect(tested >= 4, "too few admissible eigenpairs exercised");
}

// --- C4: unnormalized failure mode -----------------------------------------

void c4(Checker& c) {
  const Scenario sc = scenario_two_bump(0.3, LaplacianKind::UnnormScaled);
  ConvergenceOptions opts;
  opts.grid_nodes = 4000;
  opts.workers = workers_from_env();
  const ConvergenceSeries series =
      run_convergence(sc, {200, 400, 800, 1600}, 10, 2718, opts);
  const std::vector<double> lam =
      per_n_median(series, 1600, &ConvergenceRecord::lambda2_sample);
  const std::vector<double> loc =
      per_n_median(series, 1600, &ConvergenceRecord::ipr2);
  c.expect(lam.size() == 10, "missing records at n=1600");
  c.expect(std::abs(median(lam) - 1.5) <= 0.05, "median lambda2 not at min d");
  c.expect(median(loc) > 0.3, "second eigenvector not localized");
  for (double v : lam)
    c.expect(v >= 1.4 && v <= 1.75, "lambda2 outside [1.4, 1.75]");
}

// --- C5: figure reproduction ------------------------------------------------

int nearest_component(double x) {
  const double means[4] = {2.0, 4.0, 6.0, 8.0};
  int best = 0;
  for (int m = 1; m < 4; ++m)
    if (std::abs(x - means[m]) < std::abs(x - means[best])) best = m;
  return best;
}

void c5(Checker& c) {
  const FigureData data = run_figures(31415, 0.05);
  for (const auto& entry : data.entries) {
    if (entry.kind == LaplacianKind::RwNorm) {
      // (a) delocalized eigenvectors 2-4 for every width.
      for (int j = 1; j <= 3; ++j) {
        Vector v = entry.eigenvectors.col(j);
        v.normalize();
        c.expect(ipr(v) < 0.1, "normalized eigenvector localized");
      }
      // Thresholding eigenvector 2 at zero splits components pairwise.
      const ClusterAssignment split =
          threshold_cluster(entry.eigenvectors.col(1), 0.0);
      int in_group1[4] = {0, 0, 0, 0}, total[4] = {0, 0, 0, 0};
      for (std::size_t i = 0; i < entry.points.size(); ++i) {
        const int comp = nearest_component(entry.points[i]);
        ++total[comp];
        if (split.labels[i] == 1) ++in_group1[comp];
      }
      int side1 = 0, side0 = 0;
      for (int m = 0; m < 4; ++m) {
        const double frac =
            static_cast<double>(in_group1[m]) / std::max(1, total[m]);
        if (frac >= 0.95) ++side1;
        if (frac <= 0.05) ++side0;
      }
      c.expect(side1 == 2 && side0 == 2,
               "eigenvector 2 does not split components two against two");
    } else if (entry.sigma == 50.0) {
      // (b) at least one Dirac-like unnormalized eigenvector whose
      // eigenvalue falls into or near the critical region.
      bool found = false;
      for (int j = 1; j <= 4; ++j) {
        Vector v = entry.eigenvectors.col(j);
        v.normalize();
        const EigStatus status = entry.report.rows[static_cast<std::size_t>(j)]
                                     .status;
        if (ipr(v) > 0.5 &&
            (status == EigStatus::Inside || status == EigStatus::Marginal))
          found = true;
      }
      c.expect(found, "no localized eigenvalue near the critical region");
    }
  }
}

// --- C6: rate suite ---------------------------------------------------------

void c6(Checker& c) {
  const Scenario sc = scenario_mixture(1.0, LaplacianKind::SymNorm);
  const std::vector<std::size_t> ns = {100, 200, 400, 800, 1600};
  ConvergenceOptions opts;
  opts.grid_nodes = 4000;
  opts.with_class_sup = true;
  opts.workers = workers_from_env();
  const ConvergenceSeries series = run_convergence(sc, ns, 20, 161803, opts);

  const RateFit vec_fit = fit_rate(series, SeriesField::VecSupError);
  c.expect(vec_fit.slope >= -0.75 && vec_fit.slope <= -0.25,
           "eigenvector rate slope " + std::to_string(vec_fit.slope));

  const ConvergenceSeries dev = empirical_sup_deviation(
      sc, ns, 20, 161803, 4000, 2000, opts.workers);
  const RateFit dev_fit = fit_rate(dev, SeriesField::VecSupError);
  c.expect(dev_fit.slope >= -0.65 && dev_fit.slope <= -0.35,
           "sup-deviation slope " + std::to_string(dev_fit.slope));

  // Ratio of eigenvector error to the function-class supremum stays bounded.
  double first_ratio = 0.0, max_ratio = 0.0;
  for (std::size_t n : ns) {
    const double err =
        median(per_n_median(series, n, &ConvergenceRecord::vec_sup_err));
    const double sup =
        median(per_n_median(series, n, &ConvergenceRecord::class_sup_dev));
    c.expect(sup > 0.0, "vanishing class supremum");
    const double ratio = err / sup;
    if (n == ns.front()) first_ratio = ratio;
    max_ratio = std::max(max_ratio, ratio);
  }
  c.expect(max_ratio <= 3.0 * first_ratio,
           "constant ratio grew beyond 3x: " + std::to_string(max_ratio) +
               " vs " + std::to_string(first_ratio));
}

// --- C7: algebraic identities ------------------------------------------------

void c7(Checker& c) {
  Rng rng(7777);
  const Density density = Density::piecewise_two_bump(0.4);
  const KernelSpec k = KernelSpec::product(1.0, 2.0);
  for (std::size_t n : {4u, 8u, 16u, 32u, 64u}) {
    const SampleSet s = sample(density, n, 600 + n);
    const Matrix sim = build_similarity(s, k);

    // quadratic_form cross-checks against the brute-force double sum
    // internally and throws if the sides disagree beyond 1e-9 * scale.
    for (int t = 0; t < 4; ++t) {
      Vector f(static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = rng.normal();
      try {
        c.expect(quadratic_form(sim, f) >= -1e-12, "negative quadratic form");
      } catch (const std::runtime_error&) {
        c.expect(false, "cut identity violated");
      }
    }

    const LaplacianMatrix un = build_laplacian(sim, LaplacianKind::UnnormScaled);
    const LaplacianMatrix sym = build_laplacian(sim, LaplacianKind::SymNorm);
    const LaplacianMatrix rw = build_laplacian(sim, LaplacianKind::RwNorm);
    const Vector ones = Vector::Ones(static_cast<Eigen::Index>(n));
    const double null_tol = 1e-10 * static_cast<double>(n) * 4.0;
    c.expect((un.m * ones).cwiseAbs().maxCoeff() <= null_tol,
             "unnormalized null vector");
    c.expect((rw.m * ones).cwiseAbs().maxCoeff() <= null_tol,
             "random-walk null vector");
    c.expect((sym.m * sym.degrees.cwiseSqrt()).cwiseAbs().maxCoeff() <=
                 null_tol,
             "symmetric null vector");

    const EigenSystem es = eig_sym(sym.m, static_cast<int>(n));
    c.expect(es.values(0) >= -1e-10, "negative Laplacian eigenvalue");
    for (int j = 0; j < es.count(); ++j) {
      const Vector v = rw_from_sym(es.vectors.col(j), sym.degrees);
      c.expect((rw.m * v - es.values(j) * v).norm() <= 1e-8,
               "rw eigen correspondence");
    }
    const EigenSystem eu = eig_sym(un.m, 1);
    c.expect(eu.values(0) >= -1e-10 && eu.values(0) <= 1e-10,
             "trivial eigenvalue not at zero");
  }
}

// --- C8: byte determinism of the CLI ----------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_csvs(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> csvs;
  for (const auto& e : fs::directory_iterator(a))
    if (e.path().extension() == ".csv") csvs.push_back(e.path().filename());
  if (csvs.empty()) return false;
  std::sort(csvs.begin(), csvs.end());
  for (const auto& name : csvs) {
    if (!fs::exists(b / name)) return false;
    if (slurp(a / name) != slurp(b / name)) return false;
  }
  return true;
}

void c8(Checker& c, const std::string& exe) {
  if (exe.empty()) {
    c.expect(false, "speclab executable path not supplied");
    return;
  }
  const fs::path base = fs::temp_directory_path() / "speclab_acceptance_c8";
  fs::remove_all(base);
  fs::create_directories(base);
  const auto run = [&](const std::string& args, const fs::path& out) {
    const std::string cmd =
        "\"" + exe + "\" " + args + " --out \"" + out.string() + "\" > /dev/null";
    return std::system(cmd.c_str()) == 0;
  };
  const std::string fig_args = "figures --seed 99 --no-svg";
  c.expect(run(fig_args, base / "fig_a"), "figures run 1 failed");
  c.expect(run(fig_args, base / "fig_b"), "figures run 2 failed");
  c.expect(same_csvs(base / "fig_a", base / "fig_b"),
           "figures CSVs not byte-identical");

  const std::string conv_args =
      "converge --density mixture --kernel gaussian --sigma 1 "
      "--nlist 50,100,150,200 --reps 2 --gridN 500 --seed 12 --no-svg";
  c.expect(run(conv_args, base / "conv_a"), "converge run 1 failed");
  c.expect(run(conv_args, base / "conv_b"), "converge run 2 failed");
  c.expect(same_csvs(base / "conv_a", base / "conv_b"),
           "converge CSVs not byte-identical");
}

struct Criterion {
  std::string label;
  std::function<void(Checker&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  const std::string exe = argc > 2 ? argv[2] : "";

  const std::vector<std::pair<std::string, Criterion>> table = {
      {"c1", {"C1 analytic two-bump suite", c1}},
      {"c2", {"C2 empirical-operator commutation", c2}},
      {"c3", {"C3 eigenfunction extension round trips", c3}},
      {"c4", {"C4 unnormalized failure mode", c4}},
      {"c5", {"C5 figure reproduction", c5}},
      {"c6", {"C6 convergence rate suite", c6}},
      {"c7", {"C7 algebraic identity suite", c7}},
      {"c8", {"C8 CLI byte determinism", [&exe](Checker& c) { c8(c, exe); }}},
  };

  int failures = 0;
  bool matched = false;
  for (const auto& [key, crit] : table) {
    if (which != "all" && which != key) continue;
    matched = true;
    Checker checker;
    try {
      crit.run(checker);
    } catch (const std::exception& e) {
      checker.expect(false, std::string("exception: ") + e.what());
    }
    if (checker.ok) {
      std::cout << crit.label << ": PASS\n";
    } else {
      std::cout << crit.label << ": FAIL (" << checker.first_failure << ")\n";
      ++failures;
    }
  }
  if (!matched) {
    std::cerr << "unknown criterion: " << which << "\n";
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
