#pragma once

#include <cstddef>
#include <vector>

#include "speclab/spectral.hpp"

namespace speclab {

/// Sample estimate [min_i d_i/n, max_i d_i/n] of the essential spectrum of
/// the unnormalized limit operator, with a relative margin for the
/// "close to the interval" classification.
struct CriticalRegion {
  double lo = 0.0;
  double hi = 0.0;
  double margin = 0.0;  // relative to (hi - lo)

  bool contains(double lambda) const { return lambda >= lo && lambda <= hi; }
};

enum class EigStatus { Safe, Marginal, Inside };

/// Per-eigenvalue reliability report: position relative to the critical
/// region plus a localization score for the eigenvector.
struct SpectrumReport {
  struct Row {
    double eigenvalue = 0.0;
    EigStatus status = EigStatus::Safe;
    double ipr = 0.0;
  };
  std::vector<Row> rows;
  CriticalRegion region;
};

CriticalRegion estimate_critical_region(const Vector& deg, std::size_t n,
                                        double margin);

SpectrumReport classify_eigenvalues(const EigenSystem& eigs,
                                    const CriticalRegion& region);

/// Inverse participation ratio sum v_i^4 of a unit vector: 1 for a one-hot
/// (Dirac) vector, 1/n for a flat one.
double ipr(const Vector& v);

const char* to_string(EigStatus s);

}  // namespace speclab
