#include "speclab/spectral.hpp"

#include <lapacke.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace speclab {

namespace {
constexpr double kDegenerateGap = 1e-8;
}

Matrix build_similarity(const SampleSet& s, const KernelSpec& k) {
  const Eigen::Index n = static_cast<Eigen::Index>(s.size());
  if (n < 2) throw std::invalid_argument("build_similarity: need n >= 2");
  Matrix sim(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = k(s.points[i], s.points[j]);
      sim(i, j) = v;
      sim(j, i) = v;
    }
  return sim;
}

Vector degrees(const Matrix& similarity) { return similarity.rowwise().sum(); }

LaplacianMatrix build_laplacian(const Matrix& similarity, LaplacianKind kind) {
  const Eigen::Index n = similarity.rows();
  LaplacianMatrix lap;
  lap.kind = kind;
  lap.degrees = degrees(similarity);
  if ((lap.degrees.array() <= 0.0).any())
    throw std::invalid_argument("build_laplacian: nonpositive degree");
  switch (kind) {
    case LaplacianKind::UnnormScaled: {
      Matrix l = -similarity;
      l.diagonal() += lap.degrees;
      lap.m = l / static_cast<double>(n);
      break;
    }
    case LaplacianKind::SymNorm: {
      const Vector dinv_sqrt = lap.degrees.array().rsqrt();
      lap.m = -(dinv_sqrt.asDiagonal() * similarity * dinv_sqrt.asDiagonal());
      lap.m.diagonal().array() += 1.0;
      break;
    }
    case LaplacianKind::RwNorm: {
      const Vector dinv = lap.degrees.array().inverse();
      lap.m = -(dinv.asDiagonal() * similarity);
      lap.m.diagonal().array() += 1.0;
      break;
    }
  }
  return lap;
}

double quadratic_form(const Matrix& similarity, const Vector& f) {
  const Eigen::Index n = similarity.rows();
  if (f.size() != n)
    throw std::invalid_argument("quadratic_form: vector length mismatch");
  const Vector deg = degrees(similarity);
  const double direct = f.dot(deg.cwiseProduct(f)) - f.dot(similarity * f);
  double cut = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double diff = f(i) - f(j);
      cut += similarity(i, j) * diff * diff;
    }
  cut *= 0.5;
  const double scale = static_cast<double>(n) * static_cast<double>(n) *
                       similarity.cwiseAbs().maxCoeff() *
                       std::max(1.0, f.cwiseAbs().maxCoeff() *
                                         f.cwiseAbs().maxCoeff());
  if (std::abs(direct - cut) > 1e-9 * scale)
    throw std::runtime_error("quadratic_form: cut identity violated");
  return direct;
}

EigenSystem eig_sym(const Matrix& a, int r) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("eig_sym: matrix not square");
  if (r < 1 || r > n) throw std::invalid_argument("eig_sym: bad eigenpair count");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (((a - a.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * scale)
    throw std::invalid_argument("eig_sym: matrix not symmetric");

  Matrix work = a;  // dsyevd overwrites with eigenvectors, column-major
  Vector values(n);
  const lapack_int info = LAPACKE_dsyevd(
      LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), work.data(),
      static_cast<lapack_int>(n), values.data());
  if (info != 0)
    throw std::runtime_error("eig_sym: dsyevd failed with info = " +
                             std::to_string(info));

  EigenSystem out;
  out.values = values.head(r);
  out.vectors = work.leftCols(r);
  out.degenerate.resize(r, false);
  for (int i = 0; i < r; ++i) {
    const bool near_below = i > 0 && values(i) - values(i - 1) < kDegenerateGap;
    const bool near_above =
        i + 1 < n && values(i + 1) - values(i) < kDegenerateGap;
    out.degenerate[i] = near_below || near_above;
  }
  for (int i = 0; i < r; ++i) out.vectors.col(i).normalize();
  return out;
}

Vector rw_from_sym(const Vector& w, const Vector& deg) {
  if (w.size() != deg.size())
    throw std::invalid_argument("rw_from_sym: length mismatch");
  if ((deg.array() <= 0.0).any())
    throw std::invalid_argument("rw_from_sym: nonpositive degree");
  Vector v = w.array() * deg.array().rsqrt();
  v.normalize();
  return v;
}

ClusterAssignment threshold_cluster(const Vector& v, double b) {
  ClusterAssignment out;
  out.threshold = b;
  out.labels.resize(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.labels[static_cast<std::size_t>(i)] = v(i) >= b ? 1 : 0;
  return out;
}

std::pair<int, Vector> align_sign(const Vector& v_n, const Vector& v_ref) {
  if (v_n.size() != v_ref.size())
    throw std::invalid_argument("align_sign: length mismatch");
  const int a = v_ref.dot(v_n) < 0.0 ? -1 : 1;
  return {a, a * v_n};
}

}  // namespace speclab
