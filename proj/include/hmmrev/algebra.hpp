#pragma once

// Fixed-size dense linear algebra for three hidden states: 3-vectors, 3x3
// matrices and 3xK probability tables.

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace hmmrev {

/// Default numerical tolerance shared by every threshold decision.
inline constexpr double kTol = 1e-10;

/// Bound on the imaginary part that may be discarded when a quantity is
/// provably real but was evaluated in complex arithmetic.
inline constexpr double kImaginaryResidue = 1e-10;

struct Vec3 {
  std::array<double, 3> c{};

  constexpr double& operator[](std::size_t i) { return c[i]; }
  constexpr double operator[](std::size_t i) const { return c[i]; }

  static constexpr Vec3 ones() { return {{1.0, 1.0, 1.0}}; }
  static constexpr Vec3 unit(std::size_t i) {
    Vec3 v;
    v.c[i] = 1.0;
    return v;
  }

  double sum() const { return c[0] + c[1] + c[2]; }
  double max_abs() const;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

/// Row-major 3x3 matrix.
struct Mat3 {
  std::array<Vec3, 3> rows{};

  constexpr double& operator()(std::size_t i, std::size_t j) { return rows[i][j]; }
  constexpr double operator()(std::size_t i, std::size_t j) const { return rows[i][j]; }

  static Mat3 identity();
  static Mat3 diag(const Vec3& d);
  static Mat3 from_rows(std::initializer_list<std::initializer_list<double>> rows);

  Vec3 row(std::size_t i) const { return rows[i]; }
  Vec3 col(std::size_t j) const { return {{rows[0][j], rows[1][j], rows[2][j]}}; }
  Mat3 transposed() const;
  double trace() const { return rows[0][0] + rows[1][1] + rows[2][2]; }
  double max_abs() const;

  friend bool operator==(const Mat3&, const Mat3&) = default;
};

Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(double s, const Vec3& a);
double dot(const Vec3& a, const Vec3& b);
/// Entrywise product; multiplying a row vector by diag(b) is `hadamard(a, b)`.
Vec3 hadamard(const Vec3& a, const Vec3& b);

Mat3 operator+(const Mat3& a, const Mat3& b);
Mat3 operator-(const Mat3& a, const Mat3& b);
Mat3 operator*(double s, const Mat3& a);
Mat3 operator*(const Mat3& a, const Mat3& b);
/// Row vector times matrix.
Vec3 operator*(const Vec3& v, const Mat3& m);
/// Matrix times column vector.
Vec3 operator*(const Mat3& m, const Vec3& v);

/// Largest entrywise absolute difference.
double max_abs_diff(const Mat3& a, const Mat3& b);
double max_abs_diff(const Vec3& a, const Vec3& b);

/// Dense rows x cols table of reals (emission tables are 3 x K).
class Table {
 public:
  Table() = default;
  Table(std::size_t rows, std::size_t cols, double fill = 0.0);
  Table(std::initializer_list<std::initializer_list<double>> rows);
  explicit Table(const Mat3& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<double> row(std::size_t i) const;
  double max_abs() const;

  friend bool operator==(const Table&, const Table&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Pair of complex scalars, either both real or mutually conjugate.
struct ComplexPair {
  std::complex<double> first;
  std::complex<double> second;

  bool is_real(double tol = kImaginaryResidue) const {
    return std::abs(first.imag()) <= tol && std::abs(second.imag()) <= tol;
  }
};

/// Cofactor-expansion determinant.
double det3(const Mat3& m);

/// Determinant of the matrix whose columns are a, b, c.
double det_columns(const Vec3& a, const Vec3& b, const Vec3& c);

/// Numerical rank by full-pivot Gaussian elimination; a pivot counts when it
/// exceeds tol * max(1, largest magnitude entry).
int rank_with_tol(const Table& m, double tol = kTol);
int rank_with_tol(const Mat3& m, double tol = kTol);

/// Solves a x = b with partial pivoting. Throws Error{SingularSystem} when a
/// pivot falls below 1e-12 times the largest entry of `a`.
Vec3 solve_linear_3(const Mat3& a, const Vec3& b);

/// Returns the real part of `z` after checking that |Im z| <= residue * max(1, |z|).
/// Throws Error{ImaginaryResidue} otherwise.
double checked_real(std::complex<double> z, double residue = kImaginaryResidue);

}  // namespace hmmrev
