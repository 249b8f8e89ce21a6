#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "speclab/diagnostics.hpp"
#include "speclab/limit_ops.hpp"
#include "speclab/model.hpp"
#include "speclab/spectral.hpp"

namespace speclab {

/// A named (density, kernel, Laplacian) configuration for a study.
struct Scenario {
  std::string id;
  Density density;
  KernelSpec kernel;
  LaplacianKind laplacian = LaplacianKind::SymNorm;
};

Scenario scenario_two_bump(double s, LaplacianKind kind);
Scenario scenario_mixture(double sigma, LaplacianKind kind);

struct ConvergenceRecord {
  std::size_t n = 0;
  int rep = 0;
  double lambda2_sample = 0.0;
  double lambda2_limit = 0.0;
  double vec_sup_err = 0.0;
  int sign = 1;
  double ipr2 = 0.0;             // localization of the second eigenvector
  bool inconsistent_regime = false;  // lambda2 inside the critical region
  double class_sup_dev = 0.0;    // sup_F |P_n f - P f|, when requested
};

struct ConvergenceSeries {
  std::string scenario_id;
  std::uint64_t seed = 0;
  std::vector<ConvergenceRecord> records;
};

struct ConvergenceOptions {
  std::size_t grid_nodes = 4000;
  /// Also measure the empirical-process supremum over the function class
  /// K u (u.H) u (H.H) on probe grids (400 points, 400x400 pairs).
  bool with_class_sup = false;
  std::size_t class_probes = 400;
  /// Worker threads for the (n, rep) tasks. Each task owns a seed derived
  /// from (master seed, n index, rep), so results do not depend on order.
  int workers = 1;
};

/// Samples at each (n, rep), builds the scenario Laplacian, and compares the
/// second eigenpair against the grid-discretized limit operator. The limit
/// eigenfunction is interpolated to the sample points and sign-aligned; the
/// sample eigenvector is rescaled by sqrt(n) so both sides carry unit L2 norm
/// under their respective measures.
ConvergenceSeries run_convergence(const Scenario& scenario,
                                  const std::vector<std::size_t>& n_list,
                                  int reps, std::uint64_t seed,
                                  const ConvergenceOptions& opts = {});

/// Uniform sup-deviation ||d_n - d||_inf over a probe grid, per (n, rep).
/// Stored in vec_sup_err; the degree oracle is analytic where available and
/// quadrature-based otherwise.
ConvergenceSeries empirical_sup_deviation(const Scenario& scenario,
                                          const std::vector<std::size_t>& n_list,
                                          int reps, std::uint64_t seed,
                                          std::size_t grid_nodes = 4000,
                                          std::size_t probes = 2000,
                                          int workers = 1);

enum class SeriesField { Lambda2Error, VecSupError, ClassSupDev };

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points_used = 0;
};

/// OLS of log(median error) against log(n); needs >= 4 distinct n values
/// with strictly positive medians (zeros are dropped).
RateFit fit_rate(const ConvergenceSeries& series, SeriesField field);

struct FigureEntry {
  double sigma = 0.0;
  LaplacianKind kind = LaplacianKind::UnnormScaled;
  std::vector<double> points;        // sample, ascending with the vectors
  Vector eigenvalues;                // first 10
  Matrix eigenvectors;               // columns 1..5
  SpectrumReport report;             // classification of the first 10
  CriticalRegion region;
  double min_degree_over_n = 0.0;
};

struct FigureData {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::vector<FigureEntry> entries;
};

/// One fixed 200-point mixture sample per sigma in {1, 2, 5, 50}; first 10
/// eigenvalues and eigenvectors 1-5 of both Laplacians, with the critical
/// region. Normalized entries report random-walk eigenvector coordinates.
FigureData run_figures(std::uint64_t seed, double margin = 0.05);

double median(std::vector<double> values);

}  // namespace speclab
