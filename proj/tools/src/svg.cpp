#include "spectools/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace speclab::tools {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kPad = 50;

const char* kPalette[5] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e"};

struct Axis {
  double lo, hi;

  double to_px(double v, double px_lo, double px_hi) const {
    const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    return px_lo + t * (px_hi - px_lo);
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void open_svg(std::ofstream& out, const std::string& title) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
         "width=\""
      << kWidth << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth
      << ' ' << kHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2
      << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << title << "</text>\n"
      << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\""
      << kWidth - 2 * kPad << "\" height=\"" << kHeight - 2 * kPad
      << "\" fill=\"none\" stroke=\"black\"/>\n";
}

}  // namespace

void write_eigenvalue_svg(const std::string& path,
                          const std::vector<double>& eigenvalues,
                          double dashed_line_y, const std::string& title) {
  if (eigenvalues.empty())
    throw std::invalid_argument("write_eigenvalue_svg: no eigenvalues");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);

  double lo = std::min(dashed_line_y,
                       *std::min_element(eigenvalues.begin(), eigenvalues.end()));
  double hi = std::max(dashed_line_y,
                       *std::max_element(eigenvalues.begin(), eigenvalues.end()));
  const double span = hi > lo ? hi - lo : 1.0;
  Axis y{lo - 0.05 * span, hi + 0.05 * span};
  Axis x{0.0, static_cast<double>(eigenvalues.size() + 1)};

  open_svg(out, title);
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const double px =
        x.to_px(static_cast<double>(i + 1), kPad, kWidth - kPad);
    const double py = y.to_px(eigenvalues[i], kHeight - kPad, kPad);
    out << "<circle cx=\"" << fmt(px) << "\" cy=\"" << fmt(py)
        << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
  }
  const double dy = y.to_px(dashed_line_y, kHeight - kPad, kPad);
  out << "<line x1=\"" << kPad << "\" y1=\"" << fmt(dy) << "\" x2=\""
      << kWidth - kPad << "\" y2=\"" << fmt(dy)
      << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
  out << "<text x=\"" << kWidth - kPad << "\" y=\"" << fmt(dy - 6)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
         "min degree</text>\n";
  out << "</svg>\n";
}

void write_eigenvector_svg(const std::string& path,
                           const std::vector<double>& xs,
                           const speclab::Matrix& vectors,
                           const std::string& title) {
  if (xs.empty() || vectors.rows() != static_cast<Eigen::Index>(xs.size()))
    throw std::invalid_argument("write_eigenvector_svg: shape mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);

  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

  Axis x{*std::min_element(xs.begin(), xs.end()),
         *std::max_element(xs.begin(), xs.end())};
  const double vmax = std::max(vectors.cwiseAbs().maxCoeff(), 1e-12);
  Axis y{-1.05 * vmax, 1.05 * vmax};

  open_svg(out, title);
  const Eigen::Index cols = std::min<Eigen::Index>(vectors.cols(), 5);
  for (Eigen::Index c = 0; c < cols; ++c) {
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[c]
        << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t idx : order) {
      const double px = x.to_px(xs[idx], kPad, kWidth - kPad);
      const double py = y.to_px(vectors(static_cast<Eigen::Index>(idx), c),
                                kHeight - kPad, kPad);
      out << fmt(px) << ',' << fmt(py) << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace speclab::tools
