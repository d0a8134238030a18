#pragma once

#include <Eigen/Sparse>

#include <iosfwd>

namespace pdwg {

/// Compressed row storage, 64-bit values.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// max |A - A^T| over all entries.
double asymmetry(const SparseMatrix& a);

/// MatrixMarket "coordinate real general" with 1-based indices.
void write_matrix_market(std::ostream& os, const SparseMatrix& a);

/// MatrixMarket "array real general" column vector.
void write_matrix_market(std::ostream& os, const Eigen::VectorXd& v);

}  // namespace pdwg
