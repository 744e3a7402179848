#pragma once

#include <Eigen/Dense>
#include <span>

namespace pugraph {

// Dense row-major matrix; one row per node or example.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline std::span<const double> row_span(const Matrix& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline std::span<double> row_span(Matrix& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

// Copies the listed rows into a new matrix, preserving order.
template <typename IndexRange>
Matrix select_rows(const Matrix& m, const IndexRange& rows) {
  Matrix out(static_cast<Eigen::Index>(std::size(rows)), m.cols());
  Eigen::Index k = 0;
  for (auto r : rows) out.row(k++) = m.row(static_cast<Eigen::Index>(r));
  return out;
}

}  // namespace pugraph
