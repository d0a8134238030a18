#include "pdwg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace pdwg {

double asymmetry(const SparseMatrix& a) {
  const SparseMatrix diff = a - SparseMatrix(a.transpose());
  double worst = 0.0;
  for (int r = 0; r < diff.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(diff, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

void write_matrix_market(std::ostream& os, const SparseMatrix& a) {
  const auto old_precision = os.precision();
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  os << std::setprecision(17);
  for (int r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
  os.precision(old_precision);
}

void write_matrix_market(std::ostream& os, const Eigen::VectorXd& v) {
  const auto old_precision = os.precision();
  os << "%%MatrixMarket matrix array real general\n";
  os << v.size() << " 1\n";
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) os << v[i] << '\n';
  os.precision(old_precision);
}

}  // namespace pdwg
