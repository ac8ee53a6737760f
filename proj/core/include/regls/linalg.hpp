#pragma once

#include <Eigen/Dense>

#include "regls/errors.hpp"

namespace regls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin SVD A = U * diag(d) * V^T with U m-by-n column-orthonormal,
/// d nonincreasing and nonnegative, V n-by-n orthonormal.
struct SvdFactors {
  Matrix u;
  Vector d;
  Matrix v;
};

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
/// `ok` is false when a pivot fails; `failed_pivot` then holds its index.
struct Cholesky {
  Matrix l;
  bool ok = false;
  int failed_pivot = -1;

  double log_det() const;
  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;
};

/// Throws InvalidInputError if any entry of m is NaN or infinite.
void require_finite(const Matrix& m, const char* name);

SvdFactors svd(const Matrix& a);

/// Singular values at or below this threshold are treated as zero.
double rank_tolerance(const Matrix& a, const SvdFactors& f);

bool is_full_rank(const Matrix& a);
void require_full_rank(const Matrix& a, const char* context);

/// Moore-Penrose pseudo-inverse via SVD (requires rows >= cols).
Matrix pinv(const Matrix& a);

/// P = I - A A^+, the orthogonal projector onto the complement of range(A).
Matrix projector_perp(const Matrix& a);

/// Stacks the rows of M top-to-bottom into an (rows*cols)-vector.
Vector vec_rows(const Matrix& m);

/// The m-by-(m*n) block matrix X with x^T on the block diagonal, so that
/// X * vec_rows(D) == D * x for every m-by-n matrix D.
Matrix kron_id_rowvec(const Vector& x, int m);

Cholesky cholesky_factor(const Matrix& s);

/// Solves S X = B for symmetric positive definite S.
/// Throws NotPositiveDefiniteError (with the pivot index) when S is not PD.
Matrix solve_psd(const Matrix& s, const Matrix& b);

}  // namespace regls
