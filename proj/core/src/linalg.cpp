#include "gbm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace gbm {

SparsityPattern SparsityPattern::from_rows(std::vector<std::vector<std::size_t>> rows) {
  SparsityPattern p;
  p.n = rows.size();
  p.row_offsets.assign(p.n + 1, 0);
  for (std::size_t i = 0; i < p.n; ++i) {
    auto &r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    if (!r.empty() && r.back() >= p.n) {
      throw DimensionError("column index out of range in sparsity pattern");
    }
    p.row_offsets[i + 1] = p.row_offsets[i] + r.size();
  }
  p.col_indices.reserve(p.row_offsets.back());
  for (const auto &r : rows) {
    p.col_indices.insert(p.col_indices.end(), r.begin(), r.end());
  }
  return p;
}

std::size_t SparsityPattern::find(std::size_t row, std::size_t col) const {
  if (row >= n) {
    throw DimensionError("row index out of range");
  }
  const auto first = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[row]);
  const auto last = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[row + 1]);
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) {
    throw DimensionError("entry (" + std::to_string(row) + "," + std::to_string(col) +
                         ") is not in the sparsity pattern");
  }
  return static_cast<std::size_t>(it - col_indices.begin());
}

SparseMatrix::SparseMatrix(std::shared_ptr<const SparsityPattern> pattern)
    : m_pattern(std::move(pattern)), m_values(m_pattern->nnz(), 0.0) {}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::vector<std::size_t>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = {i};
  SparseMatrix m(std::make_shared<SparsityPattern>(SparsityPattern::from_rows(std::move(rows))));
  std::fill(m.m_values.begin(), m.m_values.end(), 1.0);
  return m;
}

SparseMatrix SparseMatrix::from_dense(std::size_t n, std::span<const double> dense) {
  if (dense.size() != n * n) {
    throw DimensionError("dense input must have n*n entries");
  }
  std::vector<std::vector<std::size_t>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (dense[i * n + j] != 0.0) rows[i].push_back(j);
    }
  }
  SparseMatrix m(std::make_shared<SparsityPattern>(SparsityPattern::from_rows(std::move(rows))));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (dense[i * n + j] != 0.0) m.add(i, j, dense[i * n + j]);
    }
  }
  return m;
}

double SparseMatrix::at(std::size_t row, std::size_t col) const {
  const auto &p = *m_pattern;
  if (row >= p.n || col >= p.n) {
    throw DimensionError("index out of range");
  }
  const auto first = p.col_indices.begin() + static_cast<std::ptrdiff_t>(p.row_offsets[row]);
  const auto last = p.col_indices.begin() + static_cast<std::ptrdiff_t>(p.row_offsets[row + 1]);
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return m_values[static_cast<std::size_t>(it - p.col_indices.begin())];
}

SparseMatrix &SparseMatrix::add_scaled(double alpha, const SparseMatrix &other) {
  if (other.m_pattern != m_pattern) {
    throw DimensionError("add_scaled requires matrices sharing one sparsity pattern");
  }
  for (std::size_t k = 0; k < m_values.size(); ++k) {
    m_values[k] += alpha * other.m_values[k];
  }
  return *this;
}

void SparseMatrix::add_to_diagonal(std::span<const double> d) {
  if (d.size() != rows()) {
    throw DimensionError("diagonal length mismatch");
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    m_values[m_pattern->find(i, i)] += d[i];
  }
}

DenseVector SparseMatrix::diagonal() const {
  DenseVector d(rows(), 0.0);
  for (std::size_t i = 0; i < rows(); ++i) d[i] = at(i, i);
  return d;
}

DenseVector SparseMatrix::row_sums() const {
  const auto &p = *m_pattern;
  DenseVector s(p.n, 0.0);
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k) s[i] += m_values[k];
  }
  return s;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : m_values) m = std::max(m, std::abs(v));
  return m;
}

bool SparseMatrix::is_symmetric(double rel_tol) const {
  const auto &p = *m_pattern;
  const double tol = rel_tol * max_abs();
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k) {
      const std::size_t j = p.col_indices[k];
      if (std::abs(m_values[k] - at(j, i)) > tol) return false;
    }
  }
  return true;
}

namespace {

void spmv_rows(const SparseMatrix &a, std::span<const double> x, std::span<double> y,
               std::size_t begin, std::size_t end) {
  const auto &p = a.pattern();
  const auto vals = a.values();
  for (std::size_t i = begin; i < end; ++i) {
    double s = 0.0;
    for (std::size_t k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k) {
      s += vals[k] * x[p.col_indices[k]];
    }
    y[i] = s;
  }
}

} // namespace

void spmv(const SparseMatrix &a, std::span<const double> x, std::span<double> y, unsigned threads) {
  const std::size_t n = a.rows();
  if (x.size() != n || y.size() != n) {
    throw DimensionError("spmv: dimension mismatch (matrix " + std::to_string(n) + ", x " +
                         std::to_string(x.size()) + ", y " + std::to_string(y.size()) + ")");
  }
  if (threads <= 1 || n < 4096) {
    spmv_rows(a, x, y, 0, n);
    return;
  }
  std::vector<std::jthread> workers;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&, begin, end] { spmv_rows(a, x, y, begin, end); });
  }
}

DenseVector spmv(const SparseMatrix &a, std::span<const double> x, unsigned threads) {
  DenseVector y(a.rows(), 0.0);
  spmv(a, x, y, threads);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) {
    throw DimensionError("axpy: dimension mismatch");
  }
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

CgNotConverged::CgNotConverged(std::size_t iterations, double residual)
    : std::runtime_error("conjugate gradients did not converge after " + std::to_string(iterations) +
                         " iterations (relative residual " + std::to_string(residual) + ")"),
      m_iterations(iterations), m_residual(residual) {}

CgResult cg_solve(const SparseMatrix &a, std::span<const double> b, const CgOptions &options,
                  std::span<const double> x0) {
  const std::size_t n = a.rows();
  if (b.size() != n || (!x0.empty() && x0.size() != n)) {
    throw DimensionError("cg_solve: dimension mismatch");
  }
  if (!(options.tol > 0.0)) {
    throw std::invalid_argument("cg_solve: tolerance must be positive");
  }
  CgResult result;
  if (n == 0) {
    return result;
  }
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    result.x.assign(n, 0.0);
    return result;
  }
  const std::size_t maxit = options.max_iterations > 0 ? options.max_iterations : 10 * n;
  const double target = options.tol * bnorm;

  DenseVector inv_diag;
  if (options.preconditioner == Preconditioner::Jacobi) {
    inv_diag = a.diagonal();
    for (auto &d : inv_diag) {
      if (!(d > 0.0)) {
        throw std::invalid_argument("cg_solve: Jacobi preconditioner needs a positive diagonal");
      }
      d = 1.0 / d;
    }
  }
  const auto precondition = [&](std::span<const double> r, std::span<double> z) {
    if (inv_diag.empty()) {
      std::copy(r.begin(), r.end(), z.begin());
    } else {
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    }
  };

  DenseVector x = x0.empty() ? DenseVector(n, 0.0) : DenseVector(x0.begin(), x0.end());
  DenseVector r(n);
  DenseVector z(n);
  DenseVector p(n);
  DenseVector ap(n);

  const auto true_residual = [&] {
    spmv(a, x, ap, options.threads);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    return norm2(r);
  };

  std::size_t it = 0;
  double rnorm = true_residual();
  // Restart from the true residual whenever the recursive one claims
  // convergence but the returned x does not satisfy the tolerance.
  while (rnorm > target) {
    if (it >= maxit) {
      throw CgNotConverged(it, rnorm / bnorm);
    }
    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    while (it < maxit) {
      spmv(a, p, ap, options.threads);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) {
        throw CgNotConverged(it, norm2(r) / bnorm);
      }
      const double alpha = rz / pap;
      axpy(alpha, p, x);
      axpy(-alpha, ap, r);
      ++it;
      if (norm2(r) <= target) break;
      precondition(r, z);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    rnorm = true_residual();
  }
  result.x = std::move(x);
  result.iterations = it;
  result.relative_residual = rnorm / bnorm;
  return result;
}

} // namespace gbm
