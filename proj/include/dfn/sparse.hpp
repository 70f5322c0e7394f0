#ifndef DFN_SPARSE_HPP
#define DFN_SPARSE_HPP

#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

namespace dfn {

/// Compressed sparse row matrix with sorted column indices.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;  // size rows + 1
  std::vector<int> col;
  std::vector<double> val;

  /// y = A x; per-row accumulation in stored (sorted) column order.
  void matvec(const std::vector<double>& x, std::vector<double>& y) const {
    for (int r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p) acc += val[p] * x[col[p]];
      y[r] = acc;
    }
  }

  double* find(int r, int c) {
    for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
      if (col[p] == c) return &val[p];
    return nullptr;
  }
};

/// Row-wise triplet accumulator. Values for a repeated (row, col) pair are
/// summed in insertion order, and the resulting CSR has columns sorted by key,
/// so the assembled matrix is independent of how the work was distributed as
/// long as contributions arrive in the same order.
class RowAccumulator {
 public:
  RowAccumulator(int rows, int cols) : cols_(cols), rows_(rows) {}

  void add(int r, int c, double v) { rows_[r][c] += v; }
  std::map<int, double>& row(int r) { return rows_[r]; }
  const std::map<int, double>& row(int r) const { return rows_[r]; }
  int n_rows() const { return static_cast<int>(rows_.size()); }

  /// Convert to CSR. `col_map` remaps the (global) column keys to matrix
  /// column indices; entries keep ascending-key order.
  template <typename ColMap>
  CsrMatrix to_csr(ColMap&& col_map) const {
    CsrMatrix m;
    m.rows = n_rows();
    m.cols = cols_;
    m.row_ptr.assign(m.rows + 1, 0);
    std::size_t nnz = 0;
    for (const auto& r : rows_) nnz += r.size();
    m.col.reserve(nnz);
    m.val.reserve(nnz);
    for (int r = 0; r < m.rows; ++r) {
      for (const auto& [c, v] : rows_[r]) {
        m.col.push_back(col_map(c));
        m.val.push_back(v);
      }
      m.row_ptr[r + 1] = static_cast<int>(m.col.size());
    }
    return m;
  }

  CsrMatrix to_csr() const {
    return to_csr([](int c) { return c; });
  }

 private:
  int cols_;
  std::vector<std::map<int, double>> rows_;
};

}  // namespace dfn

#endif
