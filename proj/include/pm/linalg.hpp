#pragma once

// Exact linear algebra over a prime field F_p.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pm {

using Residue = std::uint32_t;

bool is_prime(std::uint32_t p);

/// Multiplicative inverse of a nonzero residue modulo p.
Residue inverse_mod(Residue a, std::uint32_t p);

/// Dense row-major matrix with entries in F_p. Zero-row and zero-column
/// matrices are valid and stand for maps to/from the zero space.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::uint32_t prime, std::size_t rows, std::size_t cols);
  Matrix(std::uint32_t prime, std::size_t rows, std::size_t cols, std::vector<Residue> entries);

  static Matrix zeros(std::uint32_t prime, std::size_t rows, std::size_t cols) {
    return Matrix(prime, rows, cols);
  }
  static Matrix identity(std::uint32_t prime, std::size_t n);
  /// Builds from signed integers, reducing each entry modulo p.
  static Matrix from_rows(std::uint32_t prime, std::size_t cols,
                          const std::vector<std::vector<std::int64_t>>& rows);

  std::uint32_t prime() const { return prime_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Residue operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, Residue v) { data_[r * cols_ + c] = v % prime_; }
  std::span<const Residue> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<Residue>& entries() const { return data_; }

  bool is_zero() const;

  Matrix transpose() const;
  /// Rows [r0, r0+nr) and columns [c0, c0+nc).
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& m);
  Matrix column(std::size_t c) const { return block(0, c, rows_, 1); }
  Matrix select_columns(std::span<const std::size_t> cols) const;

  Matrix scaled(Residue s) const;
  Matrix negated() const { return scaled(prime_ - 1); }

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix& a, const Matrix& b) = default;

  /// a += s * b, in place.
  void add_scaled(const Matrix& b, Residue s);

  std::string to_string() const;

 private:
  std::uint32_t prime_ = 2;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Residue> data_;
};

Matrix hstack(const Matrix& a, const Matrix& b);
Matrix vstack(const Matrix& a, const Matrix& b);
Matrix block_diagonal(std::span<const Matrix> blocks);

/// Reduced row echelon form; pivot column of each nonzero row.
struct RowEchelon {
  Matrix reduced;
  std::vector<std::size_t> pivots;
};
RowEchelon row_reduce(Matrix m);

std::size_t rank(const Matrix& m);

/// Columns form a basis of {v : m v = 0}; width cols(m) - rank(m).
Matrix kernel_basis(const Matrix& m);

/// Pivot columns of m: a basis of its column space drawn from its own columns.
Matrix image_basis(const Matrix& m);

/// Any x with m x = b, or nullopt. Throws std::invalid_argument when
/// rows(m) != rows(b).
std::optional<Matrix> solve(const Matrix& m, const Matrix& b);

std::optional<Matrix> inverse(const Matrix& m);

/// proj : F^rows -> F^dim, surjective, with kernel equal to the column space of m.
struct Cokernel {
  Matrix proj;
  std::size_t dim = 0;
};
Cokernel cokernel_presentation(const Matrix& m);

/// Unique q with q * proj_a = proj_b * map_ab. proj_a must be surjective.
/// Throws std::invalid_argument if map_ab does not carry ker(proj_a) into ker(proj_b).
Matrix induced_map_on_quotients(const Matrix& proj_a, const Matrix& map_ab, const Matrix& proj_b);

}  // namespace pm
