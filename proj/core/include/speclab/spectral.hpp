#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "speclab/model.hpp"

namespace speclab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class LaplacianKind {
  UnnormScaled,  // (D - K) / n
  SymNorm,       // I - D^{-1/2} K D^{-1/2}
  RwNorm         // I - D^{-1} K
};

struct LaplacianMatrix {
  LaplacianKind kind;
  Matrix m;
  Vector degrees;  // row sums of K
};

/// Sorted eigenpairs. `vectors` holds one unit-norm column per eigenvalue.
/// A pair is flagged degenerate when its eigenvalue is closer than 1e-8 to a
/// neighbor in the full spectrum; eigenvectors of such clusters are only
/// determined up to rotation, so alignment-based checks skip them.
struct EigenSystem {
  Vector values;
  Matrix vectors;
  std::vector<bool> degenerate;

  int count() const { return static_cast<int>(values.size()); }
};

struct ClusterAssignment {
  std::vector<int> labels;  // 1 where v_j >= threshold, else 0
  double threshold = 0.0;
};

Matrix build_similarity(const SampleSet& s, const KernelSpec& k);

Vector degrees(const Matrix& similarity);

LaplacianMatrix build_laplacian(const Matrix& similarity, LaplacianKind kind);

/// f^t (D - K) f, cross-checked internally against the graph-cut form
/// (1/2) sum_ij k_ij (f_i - f_j)^2.
double quadratic_form(const Matrix& similarity, const Vector& f);

/// r smallest eigenpairs of a symmetric matrix, ascending.
EigenSystem eig_sym(const Matrix& a, int r);

/// Maps an eigenvector w of the symmetric normalized Laplacian to the
/// corresponding random-walk eigenvector v = D^{-1/2} w, renormalized.
Vector rw_from_sym(const Vector& w, const Vector& deg);

ClusterAssignment threshold_cluster(const Vector& v, double b);

/// Chooses the sign a making a*v_n closest to v_ref (+1 on a tie).
std::pair<int, Vector> align_sign(const Vector& v_n, const Vector& v_ref);

}  // namespace speclab
