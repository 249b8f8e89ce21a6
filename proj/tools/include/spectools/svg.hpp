#pragma once

#include <speclab/spectral.hpp>
#include <string>
#include <vector>

namespace speclab::tools {

/// Scatter of (index, eigenvalue) with a dashed horizontal marker line
/// (min_i d_i / n). Static SVG 1.1.
void write_eigenvalue_svg(const std::string& path,
                          const std::vector<double>& eigenvalues,
                          double dashed_line_y, const std::string& title);

/// Line plots of (x_i, v_i) for up to five eigenvector columns; points are
/// sorted by x before plotting.
void write_eigenvector_svg(const std::string& path,
                           const std::vector<double>& xs,
                           const speclab::Matrix& vectors,
                           const std::string& title);

}  // namespace speclab::tools
