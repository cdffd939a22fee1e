#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "entorder/errors.hpp"

namespace entorder::linalg {

using Complex = std::complex<double>;

// Eigenvalues below this are treated as the operator's null space.
inline constexpr double kSupportCutoff = 1e-12;
// Max allowed deviation from A = A^dagger, per entry.
inline constexpr double kHermitianTol = 1e-10;
// Eigenvalues in (kEigClipFloor, 0) are round-off and may be clipped to 0.
inline constexpr double kEigClipFloor = -1e-8;

// Dense row-major complex matrix. Small dimensions only (<= 36x36 in
// practice), so no sparsity and no blocking anywhere.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols, Complex{0.0, 0.0}) {}

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::vector<Complex>& entries() { return entries_; }
  const std::vector<Complex>& entries() const { return entries_; }

  bool operator==(const ComplexMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && entries_ == o.entries_;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(Complex s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);

ComplexMatrix transpose(const ComplexMatrix& a);
ComplexMatrix conjugate(const ComplexMatrix& a);
ComplexMatrix adjoint(const ComplexMatrix& a);

Complex trace(const ComplexMatrix& a);
double frobenius_norm(const ComplexMatrix& a);
// max_ij |a_ij - conj(a_ji)|
double hermiticity_defect(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol);

// outer product |u><v|
ComplexMatrix outer(std::span<const Complex> u, std::span<const Complex> v);
// <u| a |u>
Complex expectation(const ComplexMatrix& a, std::span<const Complex> u);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // descending
  ComplexMatrix eigenvectors;       // orthonormal columns, same order
};

// Cyclic complex Jacobi. Throws NotHermitian when the symmetry defect
// exceeds kHermitianTol.
EigenDecomposition hermitian_eig(const ComplexMatrix& a);

enum class Subsystem { A, B };

ComplexMatrix partial_trace(const ComplexMatrix& rho, int dim_a, int dim_b, Subsystem keep);
ComplexMatrix partial_transpose(const ComplexMatrix& rho, int dim_a, int dim_b, Subsystem side);

struct MatrixLog {
  ComplexMatrix value;               // log2 on the support, 0 on the null space
  std::vector<bool> null_space;      // per eigenvalue, descending order
};

// Base-2 logarithm of a PSD Hermitian matrix restricted to its support.
// Throws NegativeEigenvalue below kEigClipFloor.
MatrixLog matrix_log_psd(const ComplexMatrix& a, double cutoff = kSupportCutoff);

// S(rho) = -sum lambda_i log2 lambda_i, in ebits; clamped to [0, log2 dim]
double von_neumann_entropy(const ComplexMatrix& rho);

// S(rho||sigma) in ebits; +infinity when supp(rho) is not contained in
// supp(sigma) (null-space overlap weight above 1e-9)
double quantum_relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma);

}  // namespace entorder::linalg
