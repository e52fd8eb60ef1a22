#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "selectkit/errors.hpp"

namespace selectkit {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Edit of a linear projection W (d_out x d_in). Concept embeddings are
// stored column-wise: C1 and Cstar are d_in x n1, C0 is d_in x n0.
template <typename Scalar>
struct EditProblem {
  Mat<Scalar> W;
  Mat<Scalar> C1;
  Mat<Scalar> Cstar;
  Mat<Scalar> C0;
  Scalar lambda = Scalar(0.1);

  void validate() const {
    const auto d_in = W.cols();
    if (W.size() == 0) throw PreconditionError("W is empty");
    if (C1.rows() != d_in || Cstar.rows() != d_in || (C0.cols() > 0 && C0.rows() != d_in)) {
      throw PreconditionError("embedding dimension does not match W columns (" +
                              std::to_string(d_in) + ")");
    }
    if (C1.cols() != Cstar.cols()) {
      throw PreconditionError("target and anchor embeddings differ in shape");
    }
    if (!(lambda >= Scalar(0)) || !std::isfinite(static_cast<double>(lambda))) {
      throw PreconditionError("lambda must be finite and >= 0");
    }
    if (!W.allFinite() || !C1.allFinite() || !Cstar.allFinite() || !C0.allFinite()) {
      throw PreconditionError("non-finite entries in edit problem");
    }
  }

  // M = C1 C1^T + lambda C0 C0^T
  Mat<Scalar> normal_matrix() const {
    Mat<Scalar> M = C1 * C1.transpose();
    if (C0.cols() > 0) M.noalias() += lambda * (C0 * C0.transpose());
    return M;
  }

  // B = W (Cstar - C1) C1^T
  Mat<Scalar> rhs() const { return W * (Cstar - C1) * C1.transpose(); }
};

template <typename Scalar>
struct LossTerms {
  Scalar total = 0;
  Scalar e1 = 0;
  Scalar e0 = 0;
};

template <typename Scalar>
struct EditSolution {
  Mat<Scalar> delta;
  Scalar total_loss = 0;
  Scalar e1 = 0;
  Scalar e0 = 0;
  Scalar conditioning = 0;  // smallest eigenvalue of M
  Eigen::Index rank = 0;    // eigenvalues of M kept by the solve
};

template <typename Scalar>
void check_delta_shape(const EditProblem<Scalar>& p, const Mat<Scalar>& delta) {
  if (delta.rows() != p.W.rows() || delta.cols() != p.W.cols()) {
    throw PreconditionError("delta shape " + std::to_string(delta.rows()) + "x" +
                            std::to_string(delta.cols()) + " does not match W " +
                            std::to_string(p.W.rows()) + "x" + std::to_string(p.W.cols()));
  }
}

template <typename Scalar>
LossTerms<Scalar> loss_eval(const EditProblem<Scalar>& p, const Mat<Scalar>& delta) {
  p.validate();
  check_delta_shape(p, delta);
  LossTerms<Scalar> out;
  out.e1 = ((p.W + delta) * p.C1 - p.W * p.Cstar).squaredNorm();
  out.e0 = p.C0.cols() == 0 ? Scalar(0) : (delta * p.C0).squaredNorm();
  out.total = out.e1 + p.lambda * out.e0;
  return out;
}

// dL/dDelta = 2 (Delta M - B)
template <typename Scalar>
Mat<Scalar> gradient(const EditProblem<Scalar>& p, const Mat<Scalar>& delta) {
  p.validate();
  check_delta_shape(p, delta);
  return Scalar(2) * (delta * p.normal_matrix() - p.rhs());
}

// Minimum-norm minimizer Delta = B M^+. B's rows lie in range(M), so this
// solves Delta M = B exactly even when M is rank-deficient.
template <typename Scalar>
EditSolution<Scalar> solve_closed_form(const EditProblem<Scalar>& p) {
  p.validate();
  const Mat<Scalar> M = p.normal_matrix();
  const Mat<Scalar> B = p.rhs();
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> eig(M);
  if (eig.info() != Eigen::Success) {
    throw SingularSystemError("eigendecomposition of the normal matrix failed", 0.0);
  }
  const auto& s = eig.eigenvalues();
  const auto& V = eig.eigenvectors();
  const Scalar smax = s.size() ? s.maxCoeff() : Scalar(0);
  const Scalar tol = Scalar(100) * static_cast<Scalar>(M.rows()) *
                     std::numeric_limits<Scalar>::epsilon() * std::max(smax, Scalar(0));

  EditSolution<Scalar> sol;
  sol.conditioning = s.size() ? s.minCoeff() : Scalar(0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inv = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol) {
      inv(i) = Scalar(1) / s(i);
      ++sol.rank;
    }
  }
  sol.delta = ((B * V) * inv.asDiagonal()) * V.transpose();

  const Scalar residual = (sol.delta * M - B).norm();
  const Scalar bound = std::sqrt(std::numeric_limits<Scalar>::epsilon()) * (Scalar(1) + B.norm());
  if (!std::isfinite(static_cast<double>(residual)) || residual > bound) {
    throw SingularSystemError("normal equations have no exact solution",
                              static_cast<double>(sol.conditioning));
  }
  const auto loss = loss_eval(p, sol.delta);
  sol.total_loss = loss.total;
  sol.e1 = loss.e1;
  sol.e0 = loss.e0;
  return sol;
}

template <typename Scalar>
struct OracleResult {
  Mat<Scalar> delta;
  int iterations = 0;
  Scalar grad_norm = 0;
};

// Plain gradient descent on L from Delta = 0. Independent of the closed form;
// used to check it.
template <typename Scalar>
OracleResult<Scalar> solve_gradient_oracle(const EditProblem<Scalar>& p, Scalar lr, int max_iters,
                                           Scalar tol) {
  p.validate();
  if (!(lr > Scalar(0))) throw PreconditionError("learning rate must be > 0");
  if (max_iters < 0) throw PreconditionError("max_iters must be >= 0");
  const Mat<Scalar> M = p.normal_matrix();
  const Mat<Scalar> B = p.rhs();
  OracleResult<Scalar> r;
  r.delta = Mat<Scalar>::Zero(p.W.rows(), p.W.cols());
  Mat<Scalar> g = Scalar(2) * (r.delta * M - B);
  r.grad_norm = g.norm();
  const Scalar start = r.grad_norm;
  for (; r.iterations < max_iters && r.grad_norm >= tol; ++r.iterations) {
    r.delta -= lr * g;
    g = Scalar(2) * (r.delta * M - B);
    r.grad_norm = g.norm();
    if (!std::isfinite(static_cast<double>(r.grad_norm)) ||
        r.grad_norm > Scalar(1e8) * (Scalar(1) + start)) {
      throw ConvergenceError("gradient descent diverged", static_cast<double>(r.grad_norm));
    }
  }
  if (r.grad_norm >= tol) {
    throw ConvergenceError("gradient descent did not converge in " + std::to_string(max_iters) +
                               " iterations",
                           static_cast<double>(r.grad_norm));
  }
  return r;
}

template <typename Scalar>
Mat<Scalar> apply_edit(const Mat<Scalar>& W, const Mat<Scalar>& delta) {
  if (W.rows() != delta.rows() || W.cols() != delta.cols()) {
    throw PreconditionError("apply_edit: shape mismatch");
  }
  return W + delta;
}

}  // namespace selectkit
