#ifndef GBM_LINALG_HPP
#define GBM_LINALG_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace gbm {

using DenseVector = std::vector<double>;

class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// CSR sparsity structure. Column indices are strictly increasing in each row.
struct SparsityPattern {
  std::size_t n{0};
  std::vector<std::size_t> row_offsets{0};
  std::vector<std::size_t> col_indices;

  /// Builds the pattern from per-row column lists (duplicates allowed).
  static SparsityPattern from_rows(std::vector<std::vector<std::size_t>> rows);

  std::size_t nnz() const { return col_indices.size(); }
  /// Position of (row, col) in the value array; throws if not in the pattern.
  std::size_t find(std::size_t row, std::size_t col) const;
};

/// Square CSR matrix. Matrices assembled on the same mesh share one pattern,
/// which makes entrywise sums cheap.
class SparseMatrix {
public:
  SparseMatrix() : m_pattern(std::make_shared<SparsityPattern>()) {}
  explicit SparseMatrix(std::shared_ptr<const SparsityPattern> pattern);

  static SparseMatrix identity(std::size_t n);
  /// Dense row-major input; zeros are dropped from the pattern.
  static SparseMatrix from_dense(std::size_t n, std::span<const double> dense);

  std::size_t rows() const { return m_pattern->n; }
  std::size_t nnz() const { return m_values.size(); }

  const SparsityPattern &pattern() const { return *m_pattern; }
  const std::shared_ptr<const SparsityPattern> &pattern_ptr() const { return m_pattern; }
  std::span<const double> values() const { return m_values; }
  std::span<double> values() { return m_values; }

  double at(std::size_t row, std::size_t col) const;
  void add(std::size_t row, std::size_t col, double v) { m_values[m_pattern->find(row, col)] += v; }

  /// this += alpha * other; both must share a pattern.
  SparseMatrix &add_scaled(double alpha, const SparseMatrix &other);
  void add_to_diagonal(std::span<const double> d);

  DenseVector diagonal() const;
  DenseVector row_sums() const;
  double max_abs() const;

  /// |A_ij - A_ji| <= rel_tol * max|A| for every stored entry.
  bool is_symmetric(double rel_tol = 1e-12) const;

private:
  std::shared_ptr<const SparsityPattern> m_pattern;
  std::vector<double> m_values;
};

/// y = A x. Rows are split across `threads` workers; each row is computed
/// by one worker so the result does not depend on the thread count.
void spmv(const SparseMatrix &a, std::span<const double> x, std::span<double> y, unsigned threads = 1);
DenseVector spmv(const SparseMatrix &a, std::span<const double> x, unsigned threads = 1);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

enum class Preconditioner { None, Jacobi };

struct CgOptions {
  double tol{1e-10};
  /// 0 selects 10*n.
  std::size_t max_iterations{0};
  Preconditioner preconditioner{Preconditioner::None};
  unsigned threads{1};
};

struct CgResult {
  DenseVector x;
  std::size_t iterations{0};
  /// ||b - A x||_2 / ||b||_2 recomputed from the returned x.
  double relative_residual{0.0};
};

class CgNotConverged : public std::runtime_error {
public:
  CgNotConverged(std::size_t iterations, double residual);
  std::size_t iterations() const { return m_iterations; }
  double residual() const { return m_residual; }

private:
  std::size_t m_iterations;
  double m_residual;
};

/// Conjugate gradients for symmetric positive-definite A. `x0` is the
/// starting guess (zero when empty).
CgResult cg_solve(const SparseMatrix &a, std::span<const double> b, const CgOptions &options = {},
                  std::span<const double> x0 = {});

} // namespace gbm

#endif // GBM_LINALG_HPP
