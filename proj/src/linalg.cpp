#include "pm/linalg.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace pm {

bool is_prime(std::uint32_t p) {
  if (p < 2) return false;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

Residue inverse_mod(Residue a, std::uint32_t p) {
  // Extended Euclid on (a, p).
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = p, new_r = a % p;
  if (new_r == 0) throw std::domain_error("inverse of zero residue");
  while (new_r != 0) {
    std::int64_t q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  if (t < 0) t += p;
  return static_cast<Residue>(t);
}

Matrix::Matrix(std::uint32_t prime, std::size_t rows, std::size_t cols)
    : prime_(prime), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

Matrix::Matrix(std::uint32_t prime, std::size_t rows, std::size_t cols, std::vector<Residue> entries)
    : prime_(prime), rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) throw std::invalid_argument("matrix entry count does not match shape");
  for (auto& v : data_) v %= prime_;
}

Matrix Matrix::identity(std::uint32_t prime, std::size_t n) {
  Matrix m(prime, n, n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1;
  return m;
}

Matrix Matrix::from_rows(std::uint32_t prime, std::size_t cols,
                         const std::vector<std::vector<std::int64_t>>& rows) {
  Matrix m(prime, rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      std::int64_t v = rows[r][c] % static_cast<std::int64_t>(prime);
      if (v < 0) v += prime;
      m.data_[r * cols + c] = static_cast<Residue>(v);
    }
  }
  return m;
}

bool Matrix::is_zero() const {
  for (auto v : data_) {
    if (v != 0) return false;
  }
  return true;
}

Matrix Matrix::transpose() const {
  Matrix t(prime_, cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t.data_[c * rows_ + r] = data_[r * cols_ + c];
  }
  return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("matrix block out of range");
  Matrix b(prime_, nr, nc);
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t c = 0; c < nc; ++c) b.data_[r * nc + c] = data_[(r0 + r) * cols_ + c0 + c];
  }
  return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& m) {
  if (r0 + m.rows_ > rows_ || c0 + m.cols_ > cols_) throw std::out_of_range("matrix block out of range");
  for (std::size_t r = 0; r < m.rows_; ++r) {
    for (std::size_t c = 0; c < m.cols_; ++c) data_[(r0 + r) * cols_ + c0 + c] = m.data_[r * m.cols_ + c];
  }
}

Matrix Matrix::select_columns(std::span<const std::size_t> cols) const {
  Matrix b(prime_, rows_, cols.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) b.data_[r * cols.size() + j] = data_[r * cols_ + cols[j]];
  }
  return b;
}

Matrix Matrix::scaled(Residue s) const {
  Matrix m = *this;
  for (auto& v : m.data_) v = static_cast<Residue>((static_cast<std::uint64_t>(v) * s) % prime_);
  return m;
}

void Matrix::add_scaled(const Matrix& b, Residue s) {
  if (rows_ != b.rows_ || cols_ != b.cols_ || prime_ != b.prime_) throw std::invalid_argument("add_scaled shape mismatch");
  if (s % prime_ == 0) return;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    data_[i] = static_cast<Residue>((data_[i] + static_cast<std::uint64_t>(b.data_[i]) * s) % prime_);
  }
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_ || a.prime_ != b.prime_) {
    throw std::invalid_argument("matrix product shape mismatch: " + std::to_string(a.rows_) + "x" +
                                std::to_string(a.cols_) + " * " + std::to_string(b.rows_) + "x" +
                                std::to_string(b.cols_));
  }
  Matrix c(a.prime_, a.rows_, b.cols_);
  const std::uint64_t p = a.prime_;
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const std::uint64_t aik = a.data_[i * a.cols_ + k];
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) {
        auto& dst = c.data_[i * b.cols_ + j];
        dst = static_cast<Residue>((dst + aik * b.data_[k * b.cols_ + j]) % p);
      }
    }
  }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  Matrix c = a;
  c.add_scaled(b, 1);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  Matrix c = a;
  c.add_scaled(b, a.prime_ - 1);
  return c;
}

std::string Matrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t r = 0; r < rows_; ++r) {
    os << (r ? ", [" : "[");
    for (std::size_t c = 0; c < cols_; ++c) os << (c ? "," : "") << data_[r * cols_ + c];
    os << "]";
  }
  os << "](" << rows_ << "x" << cols_ << ")";
  return os.str();
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("hstack row mismatch");
  Matrix m(a.prime(), a.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(0, a.cols(), b);
  return m;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("vstack column mismatch");
  Matrix m(a.prime(), a.rows() + b.rows(), a.cols());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), 0, b);
  return m;
}

Matrix block_diagonal(std::span<const Matrix> blocks) {
  std::size_t rows = 0, cols = 0;
  std::uint32_t p = blocks.empty() ? 2 : blocks.front().prime();
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix m(p, rows, cols);
  rows = cols = 0;
  for (const auto& b : blocks) {
    m.set_block(rows, cols, b);
    rows += b.rows();
    cols += b.cols();
  }
  return m;
}

RowEchelon row_reduce(Matrix m) {
  const std::uint32_t p = m.prime();
  const std::uint64_t pp = p;
  std::vector<Residue> a(m.entries());
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv * cols + c] == 0) ++piv;
    if (piv == rows) continue;
    if (piv != r) {
      for (std::size_t j = 0; j < cols; ++j) std::swap(a[piv * cols + j], a[r * cols + j]);
    }
    const std::uint64_t inv = inverse_mod(a[r * cols + c], p);
    for (std::size_t j = c; j < cols; ++j) a[r * cols + j] = static_cast<Residue>(a[r * cols + j] * inv % pp);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      const std::uint64_t f = a[i * cols + c];
      if (f == 0) continue;
      const std::uint64_t nf = pp - f;
      for (std::size_t j = c; j < cols; ++j) {
        a[i * cols + j] = static_cast<Residue>((a[i * cols + j] + nf * a[r * cols + j]) % pp);
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return {Matrix(p, rows, cols, std::move(a)), std::move(pivots)};
}

std::size_t rank(const Matrix& m) {
  if (m.empty()) return 0;
  return row_reduce(m).pivots.size();
}

Matrix kernel_basis(const Matrix& m) {
  const std::size_t n = m.cols();
  auto [red, pivots] = row_reduce(m);
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;
  Matrix basis(m.prime(), n, n - pivots.size());
  std::size_t k = 0;
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    basis.set(free, k, 1);
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      Residue v = red(i, free);
      if (v != 0) basis.set(pivots[i], k, m.prime() - v);
    }
    ++k;
  }
  return basis;
}

Matrix image_basis(const Matrix& m) {
  if (m.empty()) return Matrix(m.prime(), m.rows(), 0);
  auto pivots = row_reduce(m).pivots;
  return m.select_columns(pivots);
}

std::optional<Matrix> solve(const Matrix& m, const Matrix& b) {
  if (m.rows() != b.rows()) throw std::invalid_argument("solve: dimension mismatch");
  const std::size_t n = m.cols(), k = b.cols();
  auto [red, pivots] = row_reduce(hstack(m, b));
  Matrix x(m.prime(), n, k);
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    if (pivots[i] >= n) return std::nullopt;
    for (std::size_t j = 0; j < k; ++j) x.set(pivots[i], j, red(i, n + j));
  }
  return x;
}

std::optional<Matrix> inverse(const Matrix& m) {
  if (m.rows() != m.cols()) return std::nullopt;
  if (rank(m) != m.rows()) return std::nullopt;
  return solve(m, Matrix::identity(m.prime(), m.rows()));
}

Cokernel cokernel_presentation(const Matrix& m) {
  // Rows of proj span the left null space of m.
  Matrix left = kernel_basis(m.transpose());
  return {left.transpose(), left.cols()};
}

Matrix induced_map_on_quotients(const Matrix& proj_a, const Matrix& map_ab, const Matrix& proj_b) {
  Matrix rhs = proj_b * map_ab;
  auto qt = solve(proj_a.transpose(), rhs.transpose());
  if (!qt) throw std::invalid_argument("induced_map_on_quotients: map does not preserve the kernels");
  return qt->transpose();
}

}  // namespace pm
