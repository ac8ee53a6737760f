#include "regls/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace regls {

double Cholesky::log_det() const {
  return 2.0 * l.diagonal().array().log().sum();
}

Vector Cholesky::solve(const Vector& b) const {
  Vector w = l.triangularView<Eigen::Lower>().solve(b);
  return l.transpose().triangularView<Eigen::Upper>().solve(w);
}

Matrix Cholesky::solve(const Matrix& b) const {
  Matrix w = l.triangularView<Eigen::Lower>().solve(b);
  return l.transpose().triangularView<Eigen::Upper>().solve(w);
}

void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) {
    throw InvalidInputError(std::string(name) + " contains NaN or Inf entries");
  }
}

SvdFactors svd(const Matrix& a) {
  require_finite(a, "svd input");
  if (a.rows() < a.cols()) {
    throw InvalidInputError("svd requires rows >= cols");
  }
  Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdFactors{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

double rank_tolerance(const Matrix& a, const SvdFactors& f) {
  const double dmax = f.d.size() > 0 ? f.d(0) : 0.0;
  return static_cast<double>(std::max(a.rows(), a.cols())) *
         std::numeric_limits<double>::epsilon() * dmax;
}

bool is_full_rank(const Matrix& a) {
  const SvdFactors f = svd(a);
  if (f.d.size() == 0) return false;
  return f.d(f.d.size() - 1) > rank_tolerance(a, f);
}

void require_full_rank(const Matrix& a, const char* context) {
  if (!is_full_rank(a)) {
    throw RankDeficientError(std::string(context) +
                             ": matrix is rank deficient (full-rank data "
                             "required)");
  }
}

Matrix pinv(const Matrix& a) {
  const SvdFactors f = svd(a);
  const double tol = rank_tolerance(a, f);
  Vector dinv = Vector::Zero(f.d.size());
  for (Eigen::Index i = 0; i < f.d.size(); ++i) {
    if (f.d(i) > tol) dinv(i) = 1.0 / f.d(i);
  }
  return f.v * dinv.asDiagonal() * f.u.transpose();
}

Matrix projector_perp(const Matrix& a) {
  const Matrix p = Matrix::Identity(a.rows(), a.rows()) - a * pinv(a);
  return 0.5 * (p + p.transpose());
}

Vector vec_rows(const Matrix& m) {
  Vector v(m.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      v(k++) = m(i, j);
    }
  }
  return v;
}

Matrix kron_id_rowvec(const Vector& x, int m) {
  const Eigen::Index n = x.size();
  Matrix out = Matrix::Zero(m, m * n);
  for (int i = 0; i < m; ++i) {
    out.block(i, i * n, 1, n) = x.transpose();
  }
  return out;
}

Cholesky cholesky_factor(const Matrix& s) {
  const Eigen::Index n = s.rows();
  Cholesky c;
  c.l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = s(j, j) - c.l.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) {
      c.ok = false;
      c.failed_pivot = static_cast<int>(j);
      return c;
    }
    c.l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v =
          s(i, j) - c.l.row(i).head(j).dot(c.l.row(j).head(j));
      c.l(i, j) = v / c.l(j, j);
    }
  }
  c.ok = true;
  return c;
}

Matrix solve_psd(const Matrix& s, const Matrix& b) {
  require_finite(s, "solve_psd lhs");
  require_finite(b, "solve_psd rhs");
  if (s.rows() != s.cols() || s.rows() != b.rows()) {
    throw InvalidInputError("solve_psd: dimension mismatch");
  }
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * (1.0 + s.cwiseAbs().maxCoeff())) {
    throw InvalidInputError("solve_psd: matrix is not symmetric");
  }
  const Cholesky c = cholesky_factor(0.5 * (s + s.transpose()));
  if (!c.ok) {
    throw NotPositiveDefiniteError(
        "solve_psd: pivot " + std::to_string(c.failed_pivot) +
            " is not positive",
        c.failed_pivot);
  }
  Matrix x = c.solve(b);
  // one step of iterative refinement
  x += c.solve(Matrix(b - s * x));
  return x;
}

}  // namespace regls
