#include "speclab/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace speclab {

CriticalRegion estimate_critical_region(const Vector& deg, std::size_t n,
                                        double margin) {
  if (margin < 0.0)
    throw std::invalid_argument("critical region: margin must be >= 0");
  if (deg.size() == 0)
    throw std::invalid_argument("critical region: empty degree vector");
  CriticalRegion r;
  r.lo = deg.minCoeff() / static_cast<double>(n);
  r.hi = deg.maxCoeff() / static_cast<double>(n);
  r.margin = margin;
  return r;
}

SpectrumReport classify_eigenvalues(const EigenSystem& eigs,
                                    const CriticalRegion& region) {
  SpectrumReport report;
  report.region = region;
  const double band = region.margin * (region.hi - region.lo);
  for (int i = 0; i < eigs.count(); ++i) {
    SpectrumReport::Row row;
    row.eigenvalue = eigs.values(i);
    row.ipr = ipr(eigs.vectors.col(i));
    if (std::abs(row.eigenvalue) <= 1e-10) {
      row.status = EigStatus::Safe;  // trivial eigenvalue
    } else if (region.contains(row.eigenvalue)) {
      row.status = EigStatus::Inside;
    } else if (row.eigenvalue >= region.lo - band &&
               row.eigenvalue <= region.hi + band) {
      row.status = EigStatus::Marginal;
    } else {
      row.status = EigStatus::Safe;
    }
    report.rows.push_back(row);
  }
  return report;
}

double ipr(const Vector& v) {
  if (std::abs(v.squaredNorm() - 1.0) > 1e-8)
    throw std::invalid_argument("ipr: vector must have unit Euclidean norm");
  return v.array().square().square().sum();
}

const char* to_string(EigStatus s) {
  switch (s) {
    case EigStatus::Safe:
      return "safe";
    case EigStatus::Marginal:
      return "marginal";
    case EigStatus::Inside:
      return "inside";
  }
  return "unknown";
}

}  // namespace speclab
